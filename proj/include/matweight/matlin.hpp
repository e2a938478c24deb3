// SPDX-License-Identifier: Apache-2.0
//
// Dense kernel for small (d <= 16) real matrices: the carrier type for
// weight values, averages, multiplier symbols and Carleson coefficients.
// Symmetric eigenproblems are solved by cyclic Jacobi.
#pragma once

#include <span>
#include <vector>

namespace matweight {

using Vec = std::vector<double>;

/// Eigenvalues below this fraction of the largest one mark a matrix as not PD.
inline constexpr double kPdFloor = 1e-13;

/// General dense matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::vector<double> row_major);

    static Matrix identity(int n);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const { return a_; }
    [[nodiscard]] std::span<double> data() { return a_; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] double trace() const;
    [[nodiscard]] bool all_finite() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& m);

/// Real symmetric matrix. Symmetry is exact: construction stores (M + M^T)/2.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);
    SymMatrix(int n, std::vector<double> row_major);
    explicit SymMatrix(const Matrix& m);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> d);

    [[nodiscard]] int dim() const { return m_.rows(); }
    double operator()(int i, int j) const { return m_(i, j); }
    void set(int i, int j, double v);

    [[nodiscard]] const Matrix& matrix() const { return m_; }
    operator const Matrix&() const { return m_; }  // NOLINT(google-explicit-constructor)

    [[nodiscard]] double trace() const { return m_.trace(); }
    [[nodiscard]] double frobenius() const { return frobenius_norm(m_); }

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

private:
    Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// X^T S X, symmetrized.
SymMatrix congruence(const SymMatrix& s, const Matrix& x);
/// Symmetric part of a * b * a for symmetric a, b.
SymMatrix sandwich(const SymMatrix& a, const SymMatrix& b);

double quad_form(const SymMatrix& m, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct EigenDecomp {
    Vec values;      // ascending
    Matrix vectors;  // orthonormal columns, vectors(:, k) pairs with values[k]

    [[nodiscard]] Vec column(int k) const;
};

EigenDecomp eig_sym(const SymMatrix& m);

/// Rebuilds Q f(Lambda) Q^T from a decomposition.
SymMatrix spectral_apply(const EigenDecomp& e, double (*f)(double));

SymMatrix sqrt_spd(const SymMatrix& m);
SymMatrix invsqrt_spd(const SymMatrix& m);
SymMatrix inverse_spd(const SymMatrix& m);

/// Throws NotPositiveDefinite unless lambda_min > kPdFloor * lambda_max.
void require_pd(const EigenDecomp& e, const char* what);
bool is_pd(const SymMatrix& m);

double lambda_min(const SymMatrix& m);
double lambda_max(const SymMatrix& m);

/// Largest singular value.
double op_norm(const Matrix& m);

struct GenEigExtremes {
    double min;
    double max;
};

/// Extremes of x^T A x / x^T B x for PD B.
GenEigExtremes gen_eig_extremes(const SymMatrix& a, const SymMatrix& b);

bool psd_leq(const SymMatrix& a, const SymMatrix& b, double tol);

}  // namespace matweight

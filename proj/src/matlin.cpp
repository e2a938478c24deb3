// SPDX-License-Identifier: Apache-2.0
#include "matweight/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "matweight/error.hpp"

namespace matweight {

namespace {

constexpr int kMaxJacobiSweeps = 50;
constexpr double kJacobiTol = 1e-14;

void require_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError("matrix shape mismatch");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw InputError("negative matrix dimension");
}

Matrix::Matrix(int rows, int cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), a_(std::move(row_major)) {
    if (rows < 0 || cols < 0) throw InputError("negative matrix dimension");
    if (a_.size() != static_cast<std::size_t>(rows) * cols) {
        throw InputError("matrix entry count " + std::to_string(a_.size()) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

bool Matrix::all_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InputError("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vec operator*(const Matrix& a, std::span<const double> x) {
    if (static_cast<std::size_t>(a.cols()) != x.size()) throw InputError("matvec shape mismatch");
    Vec y(static_cast<std::size_t>(a.rows()), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(int n) : m_(n, n) {}

SymMatrix::SymMatrix(int n, std::vector<double> row_major)
    : SymMatrix(Matrix(n, n, std::move(row_major))) {}

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
    if (!m.square()) throw InputError("symmetric matrix must be square");
    if (!m.all_finite()) throw InputError("matrix has non-finite entries");
    const int n = m.rows();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m_(i, j) = v;
            m_(j, i) = v;
        }
    }
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix s(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) s.m_(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return s;
}

void SymMatrix::set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    m_ *= s;
    return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix congruence(const SymMatrix& s, const Matrix& x) {
    return SymMatrix(x.transpose() * (s.matrix() * x));
}

SymMatrix sandwich(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.matrix() * (b.matrix() * a.matrix()));
}

double quad_form(const SymMatrix& m, std::span<const double> x) {
    const Vec mx = m.matrix() * x;
    return dot(mx, x);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Eigen decomposition

Vec EigenDecomp::column(int k) const {
    Vec c(static_cast<std::size_t>(vectors.rows()));
    for (int i = 0; i < vectors.rows(); ++i) c[i] = vectors(i, k);
    return c;
}

EigenDecomp eig_sym(const SymMatrix& m) {
    const int n = m.dim();
    Matrix a = m.matrix();
    Matrix v = Matrix::identity(n);
    const double fro = frobenius_norm(a);

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
        if (off_norm() <= kJacobiTol * fro) {
            converged = true;
            break;
        }
        if (sweep == kMaxJacobiSweeps) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Symmetric Schur rotation zeroing a(p, q).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        throw NonConvergence("Jacobi eigensolver did not converge in " +
                             std::to_string(kMaxJacobiSweeps) + " sweeps");
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

    EigenDecomp e;
    e.values.resize(static_cast<std::size_t>(n));
    e.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        e.values[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) e.vectors(i, k) = v(i, order[k]);
    }
    return e;
}

namespace {

SymMatrix rebuild(const EigenDecomp& e, std::span<const double> f_values) {
    const int n = static_cast<int>(e.values.size());
    Matrix r(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += e.vectors(i, k) * f_values[k] * e.vectors(j, k);
            r(i, j) = s;
            r(j, i) = s;
        }
    }
    return SymMatrix(r);
}

}  // namespace

SymMatrix spectral_apply(const EigenDecomp& e, double (*f)(double)) {
    Vec fv(e.values.size());
    for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = f(e.values[k]);
    return rebuild(e, fv);
}

void require_pd(const EigenDecomp& e, const char* what) {
    if (e.values.empty()) return;
    const double hi = e.values.back();
    const double lo = e.values.front();
    if (!(hi > 0.0) || !(lo > kPdFloor * hi)) {
        throw NotPositiveDefinite(std::string(what) + " is not positive definite (lambda_min=" +
                                  std::to_string(lo) + ", lambda_max=" + std::to_string(hi) + ")");
    }
}

bool is_pd(const SymMatrix& m) {
    const EigenDecomp e = eig_sym(m);
    return e.values.empty() || (e.values.back() > 0.0 && e.values.front() > kPdFloor * e.values.back());
}

SymMatrix sqrt_spd(const SymMatrix& m) {
    const EigenDecomp e = eig_sym(m);
    require_pd(e, "matrix");
    return spectral_apply(e, [](double x) { return std::sqrt(x); });
}

SymMatrix invsqrt_spd(const SymMatrix& m) {
    const EigenDecomp e = eig_sym(m);
    require_pd(e, "matrix");
    return spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
}

SymMatrix inverse_spd(const SymMatrix& m) {
    const EigenDecomp e = eig_sym(m);
    require_pd(e, "matrix");
    return spectral_apply(e, [](double x) { return 1.0 / x; });
}

double lambda_min(const SymMatrix& m) { return eig_sym(m).values.front(); }
double lambda_max(const SymMatrix& m) { return eig_sym(m).values.back(); }

double op_norm(const Matrix& m) {
    if (!m.all_finite()) throw InputError("op_norm: non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const SymMatrix gram(m.transpose() * m);
    return std::sqrt(std::max(0.0, lambda_max(gram)));
}

GenEigExtremes gen_eig_extremes(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw InputError("gen_eig_extremes: dimension mismatch");
    const SymMatrix r = invsqrt_spd(b);
    const EigenDecomp e = eig_sym(sandwich(r, a));
    return {e.values.front(), e.values.back()};
}

bool psd_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
    if (a.dim() != b.dim()) throw InputError("psd_leq: dimension mismatch");
    const double scale = std::max(1.0, op_norm(b.matrix()));
    return lambda_min(b - a) >= -tol * scale;
}

}  // namespace matweight

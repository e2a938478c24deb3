// SPDX-License-Identifier: Apache-2.0
//
// Dyadic model operators acting on Haar spectra: the shift, Haar multipliers,
// the weighted square function, disbalanced Haar bases and the D_W / M_W
// quadratic forms.
//
// The shift and multipliers act on Haar modes only; the mean component of the
// input is annihilated.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "matweight/dyadic.hpp"
#include "matweight/matlin.hpp"
#include "matweight/weights.hpp"

namespace matweight {

/// Matrices sigma_I on dyadic intervals; unset intervals carry the zero matrix.
class MultiplierSymbol {
public:
    explicit MultiplierSymbol(int dim);

    /// sigma_I = s * Id on every interval of level < depth.
    static MultiplierSymbol scalar(int dim, int depth, double s);
    /// Independent uniform +-Id on every interval of level < depth.
    static MultiplierSymbol random_signs(int dim, int depth, std::uint64_t seed);

    [[nodiscard]] int dim() const { return dim_; }
    void set(const DyadicIndex& i, Matrix m);
    [[nodiscard]] const Matrix& at(const DyadicIndex& i) const;
    [[nodiscard]] const std::map<DyadicIndex, Matrix>& entries() const { return entries_; }

private:
    int dim_;
    Matrix zero_;
    std::map<DyadicIndex, Matrix> entries_;
};

/// (1/sqrt 2) sum f^(I) (h_{I-} - h_{I+}); the output is one level deeper.
HaarSpectrum apply_shift(const HaarSpectrum& s);
/// L^2 adjoint of apply_shift; maps a spectrum of depth L to depth L - 1.
HaarSpectrum apply_shift_adjoint(const HaarSpectrum& s);

HaarSpectrum apply_multiplier(const MultiplierSymbol& sigma, const HaarSpectrum& s);
/// Coefficient-wise sigma_I^T.
HaarSpectrum apply_multiplier_adjoint(const MultiplierSymbol& sigma, const HaarSpectrum& s);

/// sup over internal I of ||<W>_I^{1/2} sigma_I <W>_I^{-1/2}||.
double sigma_norm(const MultiplierSymbol& sigma, const AveragesTree& t);
/// Same constant via the infimum definition:
/// sqrt(sup_I lambda_max(<W>^{-1/2} sigma^* <W> sigma <W>^{-1/2})).
double sigma_norm_infimum_form(const MultiplierSymbol& sigma, const AveragesTree& t);

/// ||S_W f||^2 = sum_I <<W>_I f^(I), f^(I)>. Spectrum depth may exceed the
/// weight depth by one (leaf intervals then use the leaf value of W).
double square_norm_sq(const HaarSpectrum& s, const AveragesTree& t, bool include_mean = false);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

/// Average of ||W^{1/2} T_sigma f||^2 over independent uniform sign sequences.
MonteCarloEstimate square_norm_mc(const HaarSpectrum& s, const WeightField& w, int trials, std::uint64_t seed);

/// Disbalanced Haar system on one interval: g^k = w^k h_I e^k + h^1_I A e^k.
struct DisbalancedBasis {
    DyadicIndex interval;
    EigenDecomp eig;    // eigenpairs of <W>_I, ascending
    Vec weights;        // w^k = ||<W>_I^{-1/2} e^k||
    Matrix transfer;    // A(W, I)
    std::vector<Vec> tilde;  // A(W, I) e^k

    [[nodiscard]] int dim() const { return static_cast<int>(weights.size()); }
    [[nodiscard]] Vec direction(int k) const { return eig.column(k); }

    /// Leaf values of g^k at `depth` (> interval level).
    [[nodiscard]] VectorField function(int k, int depth) const;
};

DisbalancedBasis disbalanced_basis(const AveragesTree& t, const DyadicIndex& i);

/// Largest leaf-wise residual of h_I e^k - [(w^k)^{-1} g^k - (w^k)^{-1} A h^1_I e^k].
double reconstruct_check(const AveragesTree& t, const DyadicIndex& i, int k);

struct QuadraticForms {
    double dw = 0.0;           // sum <<W>_I f^, f^>
    double mw = 0.0;           // ||f - <f>||^2_{L^2(W)}
    double dw_inv = 0.0;       // sum <<W>_I^{-1} f^, f^>
    double mw_inv = 0.0;       // ||f - <f>||^2_{L^2(W^{-1})}
    double mw_full = 0.0;      // ||f||^2_{L^2(W)}
    double mw_inv_full = 0.0;  // ||f||^2_{L^2(W^{-1})}
};

QuadraticForms quadratic_forms(const HaarSpectrum& s, const AveragesTree& t);

}  // namespace matweight

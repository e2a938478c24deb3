// SPDX-License-Identifier: Apache-2.0
//
// Finite-depth values of the constants tracked for matrix-weighted dyadic
// operators: square function equivalence constants, the Treil-Volberg
// embedding, the S1/S2/S3 split, operator norms of the shift and of Haar
// multipliers, Carleson embedding versus testing constants and the matrix
// testing ratio.
//
// Unless stated otherwise, every constant lives on the zero-mean subspace of
// the leaf space at the weight depth.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "matweight/dyadic.hpp"
#include "matweight/matlin.hpp"
#include "matweight/operators.hpp"
#include "matweight/spectral.hpp"
#include "matweight/weights.hpp"

namespace matweight {

// ---------------------------------------------------------------------------
// Square function constants

struct SquareOptions {
    bool include_mean = false;
    Method method = Method::automatic;
};

struct SquareConstants {
    double c_up = 1.0;   // sup <D_W f, f> / <M_W f, f>
    double c_low = 1.0;  // sup <M_W f, f> / <D_W f, f>
    std::size_t state_dim = 0;
    bool dense = true;
};

SquareConstants square_constants(const AveragesTree& t, const SquareOptions& opts = {});

/// Applies the M_W form in Haar coordinates: coefficients of W * synthesize(x).
/// x and y hold d values per internal node, preceded by the mean when
/// include_mean is set.
void apply_mw(const AveragesTree& t, bool include_mean, std::span<const double> x, std::span<double> y);

struct InverseEquivalence {
    double direct = 1.0;   // sup <M_W f, f> / <D_W f, f>
    double inverse = 1.0;  // sup <D_W^{-1} g, g> / <M_W^{-1} g, g>
    double residual = 0.0; // |direct - inverse|
};

/// Dense only; state dimension is limited to kDenseLimit.
InverseEquivalence inverse_equivalence_check(const AveragesTree& t);

/// max_I lambda_max(<W^{-1}>_I^{1/2} <W>_I <W^{-1}>_I^{1/2}) / [W]_{A2}.
double dw_dominance_gap(const AveragesTree& t);

// ---------------------------------------------------------------------------
// Treil-Volberg embedding and the S1/S2/S3 split

struct TvEmbedding {
    double lhs = 0.0;
    double ratio = 0.0;  // lhs / ([W] log[W] ||f||^2)
};

/// f coarser than the weight is refined; finer is rejected.
TvEmbedding tv_embedding_ratio(const AveragesTree& t, const VectorField& f);

/// sup over f of lhs / ||f||^2 (exact, via the Carleson embedding constant).
double tv_embedding_constant(const AveragesTree& t, Method method = Method::automatic);

struct S123 {
    double s1 = 0.0;
    double s2 = 0.0;           // 2 sum |<f, g>| |<f, A h^1 e>|
    double s2_bound = 0.0;     // 2 sqrt(S1 S3)
    double s3 = 0.0;           // A(W,I) h^1 inner-product form
    double s3_averaged = 0.0;  // averaged form through <W>^{-1/2} W^ <W>^{-1/2}
    double total = 0.0;        // sum (w^k)^2 |<f, h_I e^k>|^2
};

S123 s123_decomposition(const AveragesTree& t, const VectorField& f);

// ---------------------------------------------------------------------------
// Weighted operator norms

/// ||Sh||_{L^2(W) -> L^2(W)} from the leaf space at the weight depth to one
/// level deeper.
double shift_norm(const AveragesTree& t, Method method = Method::automatic);
double multiplier_norm(const MultiplierSymbol& sigma, const AveragesTree& t, Method method = Method::automatic);

struct NecessityBound {
    double bound = 0.0;          // max tested ||T f||_W / ||f||_W
    double identity_residual = 0.0;
};

/// Evaluates T_sigma on f = <W>_I^{-1/2} h_I e for every internal I, with e
/// ranging over the standard basis and the extremal direction. The residual
/// compares the computed norms with their closed forms.
NecessityBound multiplier_necessity_bound(const MultiplierSymbol& sigma, const AveragesTree& t);

// ---------------------------------------------------------------------------
// Carleson embedding

class CarlesonSequence {
public:
    explicit CarlesonSequence(int dim);

    [[nodiscard]] int dim() const { return dim_; }
    /// Throws InputError unless m is PSD (lambda_min >= -1e-12 lambda_max).
    void set(const DyadicIndex& i, const SymMatrix& m);
    [[nodiscard]] const SymMatrix* find(const DyadicIndex& i) const;
    [[nodiscard]] const std::map<DyadicIndex, SymMatrix>& entries() const { return entries_; }

private:
    int dim_;
    std::map<DyadicIndex, SymMatrix> entries_;
};

struct CarlesonConstants {
    double c_embed = 0.0;
    double c_test = 0.0;
    [[nodiscard]] double ratio() const { return c_test > 0.0 ? c_embed / c_test : 0.0; }
};

CarlesonConstants carleson_constants(const CarlesonSequence& a, const AveragesTree& t,
                                     Method method = Method::automatic);

/// |I| alpha_I <W>_I^{-1} with alpha_I = ||<W>^{-1/2}(<W>_- - <W>_+)<W>^{-1/2}||^2.
CarlesonSequence tv_sequence(const AveragesTree& t);

// ---------------------------------------------------------------------------
// Matrix testing condition

/// sup_J lambda_max(<W>_J^{-1/2} ((1/|J|) sum_{I in J} W^(I) <W>_I^{-1} W^(I)) <W>_J^{-1/2}).
double testing_numerator(const AveragesTree& t);
double testing_ratio(const AveragesTree& t);

// ---------------------------------------------------------------------------

struct BoundsReport {
    double a2 = 1.0;
    double c_up = 1.0;
    double c_low = 1.0;
    double shift_norm = 0.0;
    double tsigma_norm = 0.0;
    double tv_ratio = 0.0;
    double testing_ratio = 0.0;
    double carleson_ratio = 0.0;

    int depth = 0;
    int dim = 0;
    std::string family;
    std::uint64_t seed = 0;

    /// [W] log[W] and [W]^2 log[W] with the floored logarithm.
    [[nodiscard]] double c_w() const { return a2 * log_floor(a2); }
    [[nodiscard]] double b_w() const { return a2 * a2 * log_floor(a2); }
};

}  // namespace matweight

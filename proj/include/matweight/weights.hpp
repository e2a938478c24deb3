// SPDX-License-Identifier: Apache-2.0
//
// Matrix weights on the dyadic tree: leaf-level SPD fields, cached interval
// averages, the A2 characteristic, eigenvalue truncation, the dyadic
// Christ-Goldberg maximal function and the built-in weight families.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "matweight/dyadic.hpp"
#include "matweight/matlin.hpp"

namespace matweight {

/// SPD-matrix valued function, constant on each level-`depth` leaf.
class WeightField {
public:
    WeightField() = default;
    /// Throws NotPositiveDefinite if any leaf fails the PD floor.
    WeightField(int dim, int depth, std::vector<SymMatrix> leaves);

    static WeightField constant(const SymMatrix& m, int depth);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::int64_t leaves() const { return leaf_count(depth_); }
    [[nodiscard]] double leaf_length() const { return std::ldexp(1.0, -depth_); }
    [[nodiscard]] const SymMatrix& leaf(std::int64_t i) const { return leaves_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<SymMatrix>& leaf_values() const { return leaves_; }

    /// Leaves split into equal halves down to `depth`.
    [[nodiscard]] WeightField refined(int depth) const;
    [[nodiscard]] WeightField scaled(double c) const;

private:
    int dim_ = 0;
    int depth_ = 0;
    std::vector<SymMatrix> leaves_;
};

/// Cached spectral data of <W>_I and <W^{-1}>_I for every tree interval
/// (levels 0..depth, leaves included).
struct NodeData {
    SymMatrix avg;           // <W>_I
    SymMatrix avg_inv;       // <W^{-1}>_I
    EigenDecomp eig;         // of <W>_I
    SymMatrix sqrt;          // <W>_I^{1/2}
    SymMatrix invsqrt;       // <W>_I^{-1/2}
    SymMatrix inverse;       // <W>_I^{-1}
    SymMatrix avg_inv_sqrt;  // <W^{-1}>_I^{1/2}
};

class AveragesTree {
public:
    explicit AveragesTree(WeightField w);

    [[nodiscard]] const WeightField& field() const { return field_; }
    [[nodiscard]] int dim() const { return field_.dim(); }
    [[nodiscard]] int depth() const { return field_.depth(); }

    [[nodiscard]] const NodeData& node(const DyadicIndex& i) const { return node_at(i.heap()); }
    [[nodiscard]] const NodeData& node_at(std::int64_t slot) const { return nodes_[static_cast<std::size_t>(slot)]; }
    [[nodiscard]] std::int64_t nodes() const { return static_cast<std::int64_t>(nodes_.size()); }

    /// Node data of leaf i; its avg is W on the leaf.
    [[nodiscard]] const NodeData& leaf(std::int64_t i) const { return node_at(internal_count(depth()) + i); }

private:
    WeightField field_;
    std::vector<NodeData> nodes_;
};

/// W^(I) = (1/2)|I|^{1/2} (<W>_{I+} - <W>_{I-}) for an interval with children in the tree.
SymMatrix weight_haar_coeff(const AveragesTree& t, const DyadicIndex& i);

/// ||<W>_I^{1/2} <W^{-1}>_I^{1/2}||^2 on one interval.
double a2_at(const AveragesTree& t, const DyadicIndex& i);
/// Supremum of a2_at over every tree interval, leaves included.
double a2_characteristic(const AveragesTree& t);

/// max(1, log x); the floored logarithm used in every reported ratio.
inline double log_floor(double x) { return std::max(1.0, std::log(x)); }

struct TruncatedLeaf {
    SymMatrix value;            // (1/n)P1 + P2 W P2 + n P3
    SymMatrix inverse_formula;  // n P1 + P2 W^{-1} P2 + (1/n) P3
};

/// Eigenvalue truncation of one matrix at level n > 1.
TruncatedLeaf truncate_leaf(const SymMatrix& w, double n);
WeightField truncate(const WeightField& w, double n);

/// L^2(W) inner product; f, g and W are aligned at the finest of their depths.
double weighted_inner(const VectorField& f, const VectorField& g, const WeightField& w);
double weighted_norm_sq(const VectorField& f, const WeightField& w);
/// ||f||^2 in L^2(W^{-1}).
double inverse_weighted_norm_sq(const VectorField& f, const WeightField& w);

/// Per-leaf sup over tree intervals I containing the leaf of
/// (1/|I|) \int_I ||W(x)^{1/2} W(y)^{-1/2} f(y)|| dy.
std::vector<double> dyadic_maximal(const VectorField& f, const WeightField& w);

// ---------------------------------------------------------------------------
// Weight families

enum class Family { constant, two_value, rotation, random_martingale };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// One member of a family. `param` is the scale c for constant (c * Id),
/// t for two_value and rotation, and the Frobenius step for random_martingale.
struct WeightFamily {
    Family family = Family::constant;
    double param = 1.0;
    int depth = 1;
    int dim = 1;
    std::uint64_t seed = 0;
};

struct GenerateStats {
    int rejections = 0;
};

WeightField generate(const WeightFamily& spec, GenerateStats* stats = nullptr);

WeightField two_value_weight(double t, int depth);
WeightField rotation_weight(double t, int depth);
WeightField random_martingale_weight(int dim, int depth, double step, std::uint64_t seed,
                                     GenerateStats* stats = nullptr);

}  // namespace matweight

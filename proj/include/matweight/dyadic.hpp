// SPDX-License-Identifier: Apache-2.0
//
// Finite dyadic tree over [0,1): interval addressing, Haar analysis and
// synthesis of piecewise-constant vector fields, bottom-up averages.
//
// Nodes are stored in heap order: the interval (level j, position k) lives at
// slot 2^j - 1 + k, so children of slot s are 2s+1 (left) and 2s+2 (right).
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "matweight/matlin.hpp"

namespace matweight {

/// Deepest tree the library will build (2^24 leaves).
inline constexpr int kMaxDepth = 24;

struct DyadicIndex {
    int level = 0;
    std::int64_t position = 0;

    [[nodiscard]] std::int64_t heap() const { return (std::int64_t{1} << level) - 1 + position; }
    static DyadicIndex from_heap(std::int64_t slot);

    [[nodiscard]] double length() const { return std::ldexp(1.0, -level); }
    [[nodiscard]] double left_end() const { return std::ldexp(static_cast<double>(position), -level); }

    [[nodiscard]] DyadicIndex left() const { return {level + 1, 2 * position}; }
    [[nodiscard]] DyadicIndex right() const { return {level + 1, 2 * position + 1}; }
    [[nodiscard]] DyadicIndex parent() const { return {level - 1, position / 2}; }

    /// Leaves at `depth` covered by this interval: [first, first + count).
    [[nodiscard]] std::int64_t first_leaf(int depth) const { return position << (depth - level); }
    [[nodiscard]] std::int64_t leaf_count(int depth) const { return std::int64_t{1} << (depth - level); }

    /// Value of h_I on leaf `leaf` at `depth` (zero outside I).
    [[nodiscard]] double haar_value(int depth, std::int64_t leaf) const;

    [[nodiscard]] bool contains(const DyadicIndex& other) const;

    bool valid() const { return level >= 0 && level <= kMaxDepth && position >= 0 && position < (std::int64_t{1} << level); }

    auto operator<=>(const DyadicIndex&) const = default;
};

inline std::int64_t node_count(int depth) { return (std::int64_t{2} << depth) - 1; }
inline std::int64_t internal_count(int depth) { return (std::int64_t{1} << depth) - 1; }
inline std::int64_t leaf_count(int depth) { return std::int64_t{1} << depth; }

/// Piecewise-constant R^d valued function, one vector per level-`depth` leaf.
class VectorField {
public:
    VectorField() = default;
    VectorField(int dim, int depth);
    VectorField(int dim, int depth, std::vector<double> values);

    static VectorField constant(int depth, std::span<const double> v);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::int64_t leaves() const { return leaf_count(depth_); }
    [[nodiscard]] double leaf_length() const { return std::ldexp(1.0, -depth_); }

    [[nodiscard]] std::span<const double> leaf(std::int64_t i) const {
        return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<double> leaf(std::int64_t i) {
        return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }

    /// Same function at a finer depth.
    [[nodiscard]] VectorField refined(int depth) const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator*=(double s);

private:
    int dim_ = 0;
    int depth_ = 0;
    std::vector<double> values_;
};

/// Plain L^2([0,1), R^d) norm squared, exact for piecewise constants.
double l2_norm_sq(const VectorField& f);
double l2_inner(const VectorField& f, const VectorField& g);

/// Mean plus Haar coefficients f^(I) = \int_I f h_I for every interval of
/// level < depth(). A spectrum of depth L synthesizes at any leaf depth >= L.
class HaarSpectrum {
public:
    HaarSpectrum() = default;
    HaarSpectrum(int dim, int depth);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int depth() const { return depth_; }
    /// Deepest level carrying a coefficient; -1 for a mean-only spectrum.
    [[nodiscard]] int max_level() const { return depth_ - 1; }
    [[nodiscard]] std::int64_t intervals() const { return internal_count(depth_); }

    [[nodiscard]] std::span<const double> mean() const { return mean_; }
    [[nodiscard]] std::span<double> mean() { return mean_; }

    [[nodiscard]] std::span<const double> coeff(const DyadicIndex& i) const { return coeff_at(i.heap()); }
    [[nodiscard]] std::span<double> coeff(const DyadicIndex& i) { return coeff_at(i.heap()); }
    [[nodiscard]] std::span<const double> coeff_at(std::int64_t slot) const {
        return {coeffs_.data() + slot * dim_, static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<double> coeff_at(std::int64_t slot) {
        return {coeffs_.data() + slot * dim_, static_cast<std::size_t>(dim_)};
    }

    [[nodiscard]] std::span<const double> coefficients() const { return coeffs_; }
    [[nodiscard]] std::span<double> coefficients() { return coeffs_; }

    /// Same spectrum with zero coefficients appended down to `depth`.
    [[nodiscard]] HaarSpectrum extended(int depth) const;

    /// Sum of squared coefficient norms (mean excluded).
    [[nodiscard]] double coefficient_energy() const;

private:
    int dim_ = 0;
    int depth_ = 0;
    Vec mean_;
    std::vector<double> coeffs_;
};

HaarSpectrum analyze(const VectorField& f);
VectorField synthesize(const HaarSpectrum& s, int depth);
inline VectorField synthesize(const HaarSpectrum& s) { return synthesize(s, s.depth()); }

/// Per-node averages <f>_I in heap order over levels 0..depth, d values per node.
class NodeAverages {
public:
    NodeAverages(int dim, int depth);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::span<const double> at(const DyadicIndex& i) const { return at(i.heap()); }
    [[nodiscard]] std::span<const double> at(std::int64_t slot) const {
        return {values_.data() + slot * dim_, static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<double> at(std::int64_t slot) {
        return {values_.data() + slot * dim_, static_cast<std::size_t>(dim_)};
    }

private:
    int dim_;
    int depth_;
    std::vector<double> values_;
};

NodeAverages averages(const VectorField& f);

}  // namespace matweight

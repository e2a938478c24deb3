// SPDX-License-Identifier: Apache-2.0
#include "matweight/dyadic.hpp"

#include <algorithm>
#include <string>

#include "matweight/error.hpp"

namespace matweight {

namespace {

void check_depth(int depth) {
    if (depth < 0 || depth > kMaxDepth) {
        throw InputError("depth " + std::to_string(depth) + " outside [0, " + std::to_string(kMaxDepth) + "]");
    }
}

void check_dim(int dim) {
    if (dim <= 0) throw InputError("dimension must be positive, got " + std::to_string(dim));
}

}  // namespace

DyadicIndex DyadicIndex::from_heap(std::int64_t slot) {
    int level = 0;
    while ((std::int64_t{2} << level) - 1 <= slot) ++level;
    return {level, slot - ((std::int64_t{1} << level) - 1)};
}

double DyadicIndex::haar_value(int depth, std::int64_t leaf) const {
    const std::int64_t first = first_leaf(depth);
    const std::int64_t count = leaf_count(depth);
    if (leaf < first || leaf >= first + count) return 0.0;
    const double amplitude = std::sqrt(std::ldexp(1.0, level));
    return leaf - first < count / 2 ? -amplitude : amplitude;
}

bool DyadicIndex::contains(const DyadicIndex& other) const {
    if (other.level < level) return false;
    return (other.position >> (other.level - level)) == position;
}

// ---------------------------------------------------------------------------

VectorField::VectorField(int dim, int depth) : dim_(dim), depth_(depth) {
    check_dim(dim);
    check_depth(depth);
    values_.assign(static_cast<std::size_t>(leaf_count(depth) * dim), 0.0);
}

VectorField::VectorField(int dim, int depth, std::vector<double> values)
    : dim_(dim), depth_(depth), values_(std::move(values)) {
    check_dim(dim);
    check_depth(depth);
    if (values_.size() != static_cast<std::size_t>(leaf_count(depth) * dim)) {
        throw InputError("vector field expects " + std::to_string(leaf_count(depth)) + " leaves of dimension " +
                         std::to_string(dim));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw InputError("vector field has non-finite values");
    }
}

VectorField VectorField::constant(int depth, std::span<const double> v) {
    VectorField f(static_cast<int>(v.size()), depth);
    for (std::int64_t i = 0; i < f.leaves(); ++i) std::copy(v.begin(), v.end(), f.leaf(i).begin());
    return f;
}

VectorField VectorField::refined(int depth) const {
    if (depth < depth_) throw InputError("cannot refine a field to a coarser depth");
    VectorField r(dim_, depth);
    const int shift = depth - depth_;
    for (std::int64_t i = 0; i < r.leaves(); ++i) {
        const auto src = leaf(i >> shift);
        std::copy(src.begin(), src.end(), r.leaf(i).begin());
    }
    return r;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    if (o.dim_ != dim_ || o.depth_ != depth_) throw InputError("vector field shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double l2_norm_sq(const VectorField& f) { return l2_inner(f, f); }

double l2_inner(const VectorField& f, const VectorField& g) {
    if (f.dim() != g.dim() || f.depth() != g.depth()) throw InputError("vector field shape mismatch");
    return dot(f.values(), g.values()) * f.leaf_length();
}

// ---------------------------------------------------------------------------

HaarSpectrum::HaarSpectrum(int dim, int depth) : dim_(dim), depth_(depth) {
    check_dim(dim);
    check_depth(depth);
    mean_.assign(static_cast<std::size_t>(dim), 0.0);
    coeffs_.assign(static_cast<std::size_t>(internal_count(depth) * dim), 0.0);
}

HaarSpectrum HaarSpectrum::extended(int depth) const {
    if (depth < depth_) throw InputError("cannot truncate a spectrum by extension");
    HaarSpectrum s(dim_, depth);
    std::copy(mean_.begin(), mean_.end(), s.mean_.begin());
    std::copy(coeffs_.begin(), coeffs_.end(), s.coeffs_.begin());
    return s;
}

double HaarSpectrum::coefficient_energy() const { return dot(coeffs_, coeffs_); }

// ---------------------------------------------------------------------------

NodeAverages::NodeAverages(int dim, int depth) : dim_(dim), depth_(depth) {
    values_.assign(static_cast<std::size_t>(node_count(depth) * dim), 0.0);
}

NodeAverages averages(const VectorField& f) {
    const int d = f.dim();
    const int depth = f.depth();
    NodeAverages avg(d, depth);
    const std::int64_t first_leaf_slot = internal_count(depth);
    for (std::int64_t i = 0; i < f.leaves(); ++i) {
        const auto src = f.leaf(i);
        std::copy(src.begin(), src.end(), avg.at(first_leaf_slot + i).begin());
    }
    for (std::int64_t slot = first_leaf_slot - 1; slot >= 0; --slot) {
        const auto l = avg.at(2 * slot + 1);
        const auto r = avg.at(2 * slot + 2);
        auto out = avg.at(slot);
        for (int c = 0; c < d; ++c) out[c] = 0.5 * (l[c] + r[c]);
    }
    return avg;
}

HaarSpectrum analyze(const VectorField& f) {
    const int d = f.dim();
    const NodeAverages avg = averages(f);
    HaarSpectrum s(d, f.depth());
    const auto root = avg.at(std::int64_t{0});
    std::copy(root.begin(), root.end(), s.mean().begin());
    for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
        const double scale = 0.5 * std::sqrt(DyadicIndex::from_heap(slot).length());
        const auto l = avg.at(2 * slot + 1);
        const auto r = avg.at(2 * slot + 2);
        auto c = s.coeff_at(slot);
        for (int k = 0; k < d; ++k) c[k] = scale * (r[k] - l[k]);
    }
    return s;
}

VectorField synthesize(const HaarSpectrum& s, int depth) {
    check_depth(depth);
    if (depth < s.depth()) {
        throw InputError("synthesis depth " + std::to_string(depth) + " cannot resolve a spectrum of depth " +
                         std::to_string(s.depth()));
    }
    const int d = s.dim();
    // Top-down: <f>_{I+-} = <f>_I +- f^(I) |I|^{-1/2}.
    std::vector<double> level(s.mean().begin(), s.mean().end());
    std::vector<double> next;
    for (int j = 0; j < depth; ++j) {
        const std::int64_t count = std::int64_t{1} << j;
        next.assign(static_cast<std::size_t>(2 * count * d), 0.0);
        const double amp = std::sqrt(std::ldexp(1.0, j));
        for (std::int64_t k = 0; k < count; ++k) {
            const double* parent = level.data() + k * d;
            double* left = next.data() + 2 * k * d;
            double* right = left + d;
            if (j < s.depth()) {
                const auto c = s.coeff(DyadicIndex{j, k});
                for (int m = 0; m < d; ++m) {
                    left[m] = parent[m] - amp * c[m];
                    right[m] = parent[m] + amp * c[m];
                }
            } else {
                for (int m = 0; m < d; ++m) left[m] = right[m] = parent[m];
            }
        }
        level.swap(next);
    }
    return VectorField(d, depth, std::move(level));
}

}  // namespace matweight

// SPDX-License-Identifier: Apache-2.0
#include "matweight/operators.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "matweight/error.hpp"

namespace matweight {

namespace {

void require_dim(int a, int b, const char* what) {
    if (a != b) throw InputError(std::string(what) + ": dimension mismatch");
}

// Node of the weight tree that carries <W>_I for a coefficient at `slot`.
const NodeData& weight_node(const AveragesTree& t, std::int64_t slot) {
    const DyadicIndex i = DyadicIndex::from_heap(slot);
    if (i.level > t.depth()) throw InputError("spectrum is deeper than the weight resolves");
    return t.node(i);
}

HaarSpectrum zero_mean(HaarSpectrum s) {
    for (double& v : s.mean()) v = 0.0;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

MultiplierSymbol::MultiplierSymbol(int dim) : dim_(dim), zero_(dim, dim) {
    if (dim <= 0) throw InputError("symbol dimension must be positive");
}

MultiplierSymbol MultiplierSymbol::scalar(int dim, int depth, double s) {
    MultiplierSymbol sigma(dim);
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        sigma.set(DyadicIndex::from_heap(slot), s * Matrix::identity(dim));
    }
    return sigma;
}

MultiplierSymbol MultiplierSymbol::random_signs(int dim, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    MultiplierSymbol sigma(dim);
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        sigma.set(DyadicIndex::from_heap(slot), (coin(rng) ? 1.0 : -1.0) * Matrix::identity(dim));
    }
    return sigma;
}

void MultiplierSymbol::set(const DyadicIndex& i, Matrix m) {
    if (!i.valid()) throw InputError("symbol interval is not a dyadic interval of [0,1)");
    if (m.rows() != dim_ || m.cols() != dim_) throw InputError("symbol matrix has wrong dimension");
    if (!m.all_finite()) throw InputError("symbol matrix has non-finite entries");
    entries_[i] = std::move(m);
}

const Matrix& MultiplierSymbol::at(const DyadicIndex& i) const {
    const auto it = entries_.find(i);
    return it == entries_.end() ? zero_ : it->second;
}

// ---------------------------------------------------------------------------

HaarSpectrum apply_shift(const HaarSpectrum& s) {
    HaarSpectrum out(s.dim(), s.depth() + 1);
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
        const auto c = s.coeff_at(slot);
        auto l = out.coeff_at(2 * slot + 1);
        auto rr = out.coeff_at(2 * slot + 2);
        for (int k = 0; k < s.dim(); ++k) {
            l[k] += r * c[k];
            rr[k] -= r * c[k];
        }
    }
    return out;
}

HaarSpectrum apply_shift_adjoint(const HaarSpectrum& s) {
    if (s.depth() < 1) return HaarSpectrum(s.dim(), 0);
    HaarSpectrum out(s.dim(), s.depth() - 1);
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::int64_t slot = 0; slot < out.intervals(); ++slot) {
        const auto l = s.coeff_at(2 * slot + 1);
        const auto rr = s.coeff_at(2 * slot + 2);
        auto c = out.coeff_at(slot);
        for (int k = 0; k < s.dim(); ++k) c[k] = r * (l[k] - rr[k]);
    }
    return out;
}

namespace {

HaarSpectrum multiply(const MultiplierSymbol& sigma, const HaarSpectrum& s, bool transpose) {
    require_dim(sigma.dim(), s.dim(), "multiplier");
    HaarSpectrum out(s.dim(), s.depth());
    const int d = s.dim();
    for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
        const Matrix& m = sigma.at(DyadicIndex::from_heap(slot));
        const auto c = s.coeff_at(slot);
        auto o = out.coeff_at(slot);
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += (transpose ? m(j, i) : m(i, j)) * c[j];
            o[i] = acc;
        }
    }
    return out;
}

}  // namespace

HaarSpectrum apply_multiplier(const MultiplierSymbol& sigma, const HaarSpectrum& s) {
    return multiply(sigma, s, false);
}

HaarSpectrum apply_multiplier_adjoint(const MultiplierSymbol& sigma, const HaarSpectrum& s) {
    return multiply(sigma, s, true);
}

double sigma_norm(const MultiplierSymbol& sigma, const AveragesTree& t) {
    require_dim(sigma.dim(), t.dim(), "sigma_norm");
    double best = 0.0;
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const NodeData& n = t.node_at(slot);
        const Matrix& m = sigma.at(DyadicIndex::from_heap(slot));
        best = std::max(best, op_norm(n.sqrt.matrix() * m * n.invsqrt.matrix()));
    }
    return best;
}

double sigma_norm_infimum_form(const MultiplierSymbol& sigma, const AveragesTree& t) {
    require_dim(sigma.dim(), t.dim(), "sigma_norm");
    double best = 0.0;
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const NodeData& n = t.node_at(slot);
        const Matrix& m = sigma.at(DyadicIndex::from_heap(slot));
        // <W>^{-1/2} sigma^T <W> sigma <W>^{-1/2}
        const Matrix inner = m * n.invsqrt.matrix();
        best = std::max(best, lambda_max(congruence(n.avg, inner)));
    }
    return std::sqrt(std::max(0.0, best));
}

double square_norm_sq(const HaarSpectrum& s, const AveragesTree& t, bool include_mean) {
    require_dim(s.dim(), t.dim(), "square function");
    double sum = 0.0;
    for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
        sum += quad_form(weight_node(t, slot).avg, s.coeff_at(slot));
    }
    if (include_mean) sum += quad_form(t.node_at(0).avg, s.mean());
    return sum;
}

MonteCarloEstimate square_norm_mc(const HaarSpectrum& s, const WeightField& w, int trials, std::uint64_t seed) {
    require_dim(s.dim(), w.dim(), "square function");
    if (trials < 1) throw InputError("square_norm_mc needs at least one trial");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const int depth = std::max(s.depth(), w.depth());
    double sum = 0.0, sum_sq = 0.0;
    HaarSpectrum signed_s(s.dim(), s.depth());
    for (int trial = 0; trial < trials; ++trial) {
        for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
            const double sign = coin(rng) ? 1.0 : -1.0;
            const auto c = s.coeff_at(slot);
            auto o = signed_s.coeff_at(slot);
            for (int k = 0; k < s.dim(); ++k) o[k] = sign * c[k];
        }
        const double v = weighted_norm_sq(synthesize(signed_s, depth), w);
        sum += v;
        sum_sq += v * v;
    }
    MonteCarloEstimate est;
    est.trials = trials;
    est.mean = sum / trials;
    if (trials > 1) {
        const double var = std::max(0.0, (sum_sq - trials * est.mean * est.mean) / (trials - 1));
        est.std_error = std::sqrt(var / trials);
    }
    return est;
}

// ---------------------------------------------------------------------------

VectorField DisbalancedBasis::function(int k, int depth) const {
    if (depth <= interval.level) throw InputError("disbalanced function needs depth below its interval");
    const int d = dim();
    VectorField g(d, depth);
    const Vec e = direction(k);
    const double inv_len = 1.0 / interval.length();
    const std::int64_t first = interval.first_leaf(depth);
    for (std::int64_t leaf = first; leaf < first + interval.leaf_count(depth); ++leaf) {
        const double h = interval.haar_value(depth, leaf);
        auto out = g.leaf(leaf);
        for (int m = 0; m < d; ++m) out[m] = weights[k] * h * e[m] + inv_len * tilde[k][m];
    }
    return g;
}

DisbalancedBasis disbalanced_basis(const AveragesTree& t, const DyadicIndex& i) {
    if (!i.valid() || i.level >= t.depth()) throw InputError("disbalanced basis needs an internal interval");
    const NodeData& n = t.node(i);
    DisbalancedBasis b;
    b.interval = i;
    b.eig = n.eig;
    const int d = t.dim();
    b.weights.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) b.weights[k] = norm2(n.invsqrt.matrix() * std::span<const double>(b.eig.column(k)));
    const SymMatrix diff = t.node(i.left()).avg - t.node(i.right()).avg;
    b.transfer = (0.5 * std::sqrt(i.length())) * (n.inverse.matrix() * diff.matrix() * n.invsqrt.matrix());
    for (int k = 0; k < d; ++k) b.tilde.push_back(b.transfer * std::span<const double>(b.eig.column(k)));
    return b;
}

double reconstruct_check(const AveragesTree& t, const DyadicIndex& i, int k) {
    const DisbalancedBasis b = disbalanced_basis(t, i);
    if (k < 0 || k >= b.dim()) throw InputError("reconstruct_check: basis index out of range");
    const int depth = t.depth();
    const VectorField g = b.function(k, depth);
    const Vec e = b.direction(k);
    const Vec ae = b.tilde[k];
    const double inv_w = 1.0 / b.weights[k];
    const double inv_len = 1.0 / i.length();
    double worst = 0.0;
    for (std::int64_t leaf = 0; leaf < leaf_count(depth); ++leaf) {
        const double h = i.haar_value(depth, leaf);
        const double h1 = i.contains(DyadicIndex{depth, leaf}) ? inv_len : 0.0;
        const auto gl = g.leaf(leaf);
        for (int m = 0; m < b.dim(); ++m) {
            const double rhs = inv_w * gl[m] - inv_w * h1 * ae[m];
            worst = std::max(worst, std::abs(h * e[m] - rhs));
        }
    }
    return worst;
}

QuadraticForms quadratic_forms(const HaarSpectrum& s, const AveragesTree& t) {
    require_dim(s.dim(), t.dim(), "quadratic forms");
    QuadraticForms q;
    for (std::int64_t slot = 0; slot < s.intervals(); ++slot) {
        const NodeData& n = weight_node(t, slot);
        q.dw += quad_form(n.avg, s.coeff_at(slot));
        q.dw_inv += quad_form(n.inverse, s.coeff_at(slot));
    }
    const int depth = std::max(s.depth(), t.depth());
    const VectorField centered = synthesize(zero_mean(s), depth);
    const VectorField full = synthesize(s, depth);
    q.mw = weighted_norm_sq(centered, t.field());
    q.mw_inv = inverse_weighted_norm_sq(centered, t.field());
    q.mw_full = weighted_norm_sq(full, t.field());
    q.mw_inv_full = inverse_weighted_norm_sq(full, t.field());
    return q;
}

}  // namespace matweight

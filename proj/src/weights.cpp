// SPDX-License-Identifier: Apache-2.0
#include "matweight/weights.hpp"

#include <numbers>
#include <random>

#include "matweight/error.hpp"

namespace matweight {

namespace {

constexpr int kMaxLeafRedraws = 1000;

std::int64_t leaf_for(std::int64_t leaf, int from_depth, int to_depth) { return leaf >> (from_depth - to_depth); }

}  // namespace

WeightField::WeightField(int dim, int depth, std::vector<SymMatrix> leaves)
    : dim_(dim), depth_(depth), leaves_(std::move(leaves)) {
    if (dim <= 0) throw InputError("weight dimension must be positive");
    if (depth < 0 || depth > kMaxDepth) throw InputError("weight depth out of range");
    if (leaves_.size() != static_cast<std::size_t>(leaf_count(depth))) {
        throw InputError("weight expects " + std::to_string(leaf_count(depth)) + " leaves, got " +
                         std::to_string(leaves_.size()));
    }
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
        if (leaves_[i].dim() != dim) throw InputError("weight leaf " + std::to_string(i) + " has wrong dimension");
        const EigenDecomp e = eig_sym(leaves_[i]);
        require_pd(e, ("weight leaf " + std::to_string(i)).c_str());
    }
}

WeightField WeightField::constant(const SymMatrix& m, int depth) {
    return WeightField(m.dim(), depth, std::vector<SymMatrix>(static_cast<std::size_t>(leaf_count(depth)), m));
}

WeightField WeightField::refined(int depth) const {
    if (depth < depth_) throw InputError("cannot refine a weight to a coarser depth");
    std::vector<SymMatrix> out;
    out.reserve(static_cast<std::size_t>(leaf_count(depth)));
    for (std::int64_t i = 0; i < leaf_count(depth); ++i) out.push_back(leaf(leaf_for(i, depth, depth_)));
    WeightField w;
    w.dim_ = dim_;
    w.depth_ = depth;
    w.leaves_ = std::move(out);
    return w;
}

WeightField WeightField::scaled(double c) const {
    if (!(c > 0.0)) throw InputError("weight scale must be positive");
    WeightField w = *this;
    for (auto& m : w.leaves_) m *= c;
    return w;
}

// ---------------------------------------------------------------------------

AveragesTree::AveragesTree(WeightField w) : field_(std::move(w)) {
    const int depth = field_.depth();
    nodes_.resize(static_cast<std::size_t>(node_count(depth)));
    const std::int64_t first_leaf = internal_count(depth);
    for (std::int64_t i = 0; i < field_.leaves(); ++i) {
        NodeData& n = nodes_[static_cast<std::size_t>(first_leaf + i)];
        n.avg = field_.leaf(i);
        n.avg_inv = inverse_spd(n.avg);
    }
    for (std::int64_t slot = first_leaf - 1; slot >= 0; --slot) {
        NodeData& n = nodes_[static_cast<std::size_t>(slot)];
        const NodeData& l = nodes_[static_cast<std::size_t>(2 * slot + 1)];
        const NodeData& r = nodes_[static_cast<std::size_t>(2 * slot + 2)];
        n.avg = 0.5 * (l.avg + r.avg);
        n.avg_inv = 0.5 * (l.avg_inv + r.avg_inv);
    }
    for (auto& n : nodes_) {
        n.eig = eig_sym(n.avg);
        require_pd(n.eig, "interval average of W");
        n.sqrt = spectral_apply(n.eig, [](double x) { return std::sqrt(x); });
        n.invsqrt = spectral_apply(n.eig, [](double x) { return 1.0 / std::sqrt(x); });
        n.inverse = spectral_apply(n.eig, [](double x) { return 1.0 / x; });
        n.avg_inv_sqrt = sqrt_spd(n.avg_inv);
    }
}

SymMatrix weight_haar_coeff(const AveragesTree& t, const DyadicIndex& i) {
    if (!i.valid() || i.level >= t.depth()) {
        throw InputError("weight Haar coefficient needs an interval with children in the tree");
    }
    const double scale = 0.5 * std::sqrt(i.length());
    return scale * (t.node(i.right()).avg - t.node(i.left()).avg);
}

double a2_at(const AveragesTree& t, const DyadicIndex& i) {
    const NodeData& n = t.node(i);
    const double r = op_norm(n.sqrt.matrix() * n.avg_inv_sqrt.matrix());
    return r * r;
}

double a2_characteristic(const AveragesTree& t) {
    double best = 0.0;
    for (std::int64_t slot = 0; slot < t.nodes(); ++slot) {
        best = std::max(best, a2_at(t, DyadicIndex::from_heap(slot)));
    }
    return best;
}

// ---------------------------------------------------------------------------

TruncatedLeaf truncate_leaf(const SymMatrix& w, double n) {
    if (!(n > 1.0)) throw InputError("truncation level n must exceed 1");
    const int d = w.dim();
    const EigenDecomp e = eig_sym(w);
    require_pd(e, "weight value");
    SymMatrix p1(d), p2(d), p3(d);
    for (int k = 0; k < d; ++k) {
        const Vec v = e.column(k);
        SymMatrix* target = e.values[k] <= 1.0 / n ? &p1 : (e.values[k] >= n ? &p3 : &p2);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) target->set(i, j, (*target)(i, j) + v[i] * v[j]);
    }
    const SymMatrix winv = spectral_apply(e, [](double x) { return 1.0 / x; });
    TruncatedLeaf out;
    out.value = (1.0 / n) * p1 + sandwich(p2, w) + n * p3;
    out.inverse_formula = n * p1 + sandwich(p2, winv) + (1.0 / n) * p3;
    return out;
}

WeightField truncate(const WeightField& w, double n) {
    std::vector<SymMatrix> out;
    out.reserve(static_cast<std::size_t>(w.leaves()));
    for (std::int64_t i = 0; i < w.leaves(); ++i) out.push_back(truncate_leaf(w.leaf(i), n).value);
    return WeightField(w.dim(), w.depth(), std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

double weighted_form(const VectorField& f, const VectorField& g, const WeightField& w, bool inverse) {
    if (f.dim() != w.dim() || g.dim() != w.dim()) throw InputError("function and weight dimensions differ");
    const int depth = std::max({f.depth(), g.depth(), w.depth()});
    const VectorField fa = f.depth() == depth ? f : f.refined(depth);
    const VectorField ga = g.depth() == depth ? g : g.refined(depth);
    std::vector<SymMatrix> inverses;
    if (inverse) {
        inverses.reserve(static_cast<std::size_t>(w.leaves()));
        for (const auto& m : w.leaf_values()) inverses.push_back(inverse_spd(m));
    }
    double sum = 0.0;
    for (std::int64_t i = 0; i < leaf_count(depth); ++i) {
        const std::int64_t wl = leaf_for(i, depth, w.depth());
        const SymMatrix& m = inverse ? inverses[static_cast<std::size_t>(wl)] : w.leaf(wl);
        sum += dot(m.matrix() * fa.leaf(i), ga.leaf(i));
    }
    return sum * std::ldexp(1.0, -depth);
}

}  // namespace

double weighted_inner(const VectorField& f, const VectorField& g, const WeightField& w) {
    return weighted_form(f, g, w, false);
}

double weighted_norm_sq(const VectorField& f, const WeightField& w) { return weighted_form(f, f, w, false); }

double inverse_weighted_norm_sq(const VectorField& f, const WeightField& w) { return weighted_form(f, f, w, true); }

std::vector<double> dyadic_maximal(const VectorField& f, const WeightField& w) {
    if (f.dim() != w.dim()) throw InputError("function and weight dimensions differ");
    const int depth = std::max(f.depth(), w.depth());
    const VectorField fa = f.depth() == depth ? f : f.refined(depth);
    const std::int64_t n = leaf_count(depth);

    std::vector<SymMatrix> sqrt_w, invsqrt_w;
    for (const auto& m : w.leaf_values()) {
        const EigenDecomp e = eig_sym(m);
        require_pd(e, "weight leaf");
        sqrt_w.push_back(spectral_apply(e, [](double x) { return std::sqrt(x); }));
        invsqrt_w.push_back(spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); }));
    }
    // g(y) = W(y)^{-1/2} f(y)
    std::vector<Vec> g(static_cast<std::size_t>(n));
    for (std::int64_t y = 0; y < n; ++y) {
        g[static_cast<std::size_t>(y)] = invsqrt_w[static_cast<std::size_t>(leaf_for(y, depth, w.depth()))].matrix() * fa.leaf(y);
    }

    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t x = 0; x < n; ++x) {
        const Matrix& sx = sqrt_w[static_cast<std::size_t>(leaf_for(x, depth, w.depth()))].matrix();
        double best = 0.0;
        // Ancestors of x from the leaf upward; running sums reuse the child's total.
        double running = 0.0;
        std::int64_t lo = x, hi = x + 1;
        running = norm2(sx * std::span<const double>(g[static_cast<std::size_t>(x)]));
        best = running;
        for (int level = depth - 1; level >= 0; --level) {
            const std::int64_t span_len = std::int64_t{1} << (depth - level);
            const std::int64_t first = (x >> (depth - level)) << (depth - level);
            for (std::int64_t y = first; y < first + span_len; ++y) {
                if (y >= lo && y < hi) continue;
                running += norm2(sx * std::span<const double>(g[static_cast<std::size_t>(y)]));
            }
            lo = first;
            hi = first + span_len;
            best = std::max(best, running / static_cast<double>(span_len));
        }
        out[static_cast<std::size_t>(x)] = best;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view family_name(Family f) {
    switch (f) {
        case Family::constant: return "constant";
        case Family::two_value: return "two_value";
        case Family::rotation: return "rotation";
        case Family::random_martingale: return "random_martingale";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::constant, Family::two_value, Family::rotation, Family::random_martingale}) {
        if (family_name(f) == name) return f;
    }
    throw InputError("unknown weight family '" + std::string(name) + "'");
}

WeightField two_value_weight(double t, int depth) {
    if (!(t > 0.0)) throw InputError("two_value parameter t must be positive");
    if (depth < 1) throw InputError("two_value needs depth >= 1");
    std::vector<SymMatrix> leaves;
    const std::int64_t n = leaf_count(depth);
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = i < n / 2 ? t : 1.0 / t;
        leaves.push_back(SymMatrix(1, {v}));
    }
    return WeightField(1, depth, std::move(leaves));
}

WeightField rotation_weight(double t, int depth) {
    if (!(t > 0.0)) throw InputError("rotation parameter t must be positive");
    if (depth < 1) throw InputError("rotation needs depth >= 1");
    std::vector<SymMatrix> leaves;
    const std::int64_t n = leaf_count(depth);
    for (std::int64_t j = 0; j < n; ++j) {
        const double theta = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        const double c = std::cos(theta), s = std::sin(theta);
        Matrix r(2, 2, {c, -s, s, c});
        const SymMatrix diag = SymMatrix::diagonal(std::vector<double>{t, 1.0 / t});
        leaves.push_back(congruence(diag, r.transpose()));
    }
    return WeightField(2, depth, std::move(leaves));
}

WeightField random_martingale_weight(int dim, int depth, double step, std::uint64_t seed, GenerateStats* stats) {
    if (dim <= 0) throw InputError("random_martingale needs a positive dimension");
    if (depth < 1) throw InputError("random_martingale needs depth >= 1");
    if (!(step >= 0.0) || !std::isfinite(step)) throw InputError("random_martingale step must be finite and >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto increment = [&] {
        SymMatrix g(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) g.set(i, j, gauss(rng));
        const double fro = g.frobenius();
        if (fro > 0.0) g *= step / fro;
        return g;
    };

    std::vector<SymMatrix> logs(static_cast<std::size_t>(node_count(depth)), SymMatrix(dim));
    const std::int64_t first_leaf = internal_count(depth);
    std::vector<SymMatrix> leaves;
    leaves.reserve(static_cast<std::size_t>(leaf_count(depth)));
    int rejections = 0;
    for (std::int64_t slot = 1; slot < node_count(depth); ++slot) {
        const SymMatrix& parent = logs[static_cast<std::size_t>((slot - 1) / 2)];
        logs[static_cast<std::size_t>(slot)] = parent + increment();
        if (slot < first_leaf) continue;
        for (int attempt = 0;; ++attempt) {
            const EigenDecomp e = eig_sym(logs[static_cast<std::size_t>(slot)]);
            // exp(L) fails the PD floor when its eigenvalue spread is too wide.
            if (e.values.back() - e.values.front() < -std::log(kPdFloor)) {
                leaves.push_back(spectral_apply(e, [](double x) { return std::exp(x); }));
                break;
            }
            if (attempt == kMaxLeafRedraws) throw NumericalError("random_martingale: leaf redraw limit reached");
            ++rejections;
            logs[static_cast<std::size_t>(slot)] = parent + increment();
        }
    }
    if (stats) stats->rejections = rejections;
    return WeightField(dim, depth, std::move(leaves));
}

WeightField generate(const WeightFamily& spec, GenerateStats* stats) {
    if (stats) *stats = {};
    switch (spec.family) {
        case Family::constant:
            if (!(spec.param > 0.0)) throw InputError("constant family scale must be positive");
            if (spec.depth < 1) throw InputError("constant family needs depth >= 1");
            return WeightField::constant(spec.param * SymMatrix::identity(spec.dim), spec.depth);
        case Family::two_value:
            if (spec.dim != 1) throw InputError("two_value family is scalar (dim 1)");
            return two_value_weight(spec.param, spec.depth);
        case Family::rotation:
            if (spec.dim != 2) throw InputError("rotation family is 2x2 (dim 2)");
            return rotation_weight(spec.param, spec.depth);
        case Family::random_martingale:
            return random_martingale_weight(spec.dim, spec.depth, spec.param, spec.seed, stats);
    }
    throw InputError("unknown family");
}

}  // namespace matweight

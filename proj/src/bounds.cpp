// SPDX-License-Identifier: Apache-2.0
#include "matweight/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matweight/error.hpp"

namespace matweight {

namespace {

// Block-diagonal action x_I -> B_I x_I over consecutive d-blocks.
void apply_blocks(const std::vector<const SymMatrix*>& blocks, int d, std::span<const double> x, std::span<double> y) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Matrix& m = *blocks[b];
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += m(i, j) * x[b * d + j];
            y[b * d + i] = acc;
        }
    }
}

std::vector<const SymMatrix*> coefficient_blocks(const AveragesTree& t, bool include_mean, SymMatrix NodeData::*which) {
    std::vector<const SymMatrix*> blocks;
    if (include_mean) blocks.push_back(&(t.node_at(0).*which));
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) blocks.push_back(&(t.node_at(slot).*which));
    return blocks;
}

std::size_t coefficient_dim(const AveragesTree& t, bool include_mean) {
    return static_cast<std::size_t>((internal_count(t.depth()) + (include_mean ? 1 : 0)) * t.dim());
}

// Leaf values x_l -> factor * P_l x_l where P_l is W^{1/2} or W^{-1/2} of the
// weight leaf covering leaf l at `depth`.
VectorField lift(const AveragesTree& t, int depth, std::span<const double> x, bool inverse_root, double factor) {
    const int d = t.dim();
    const int shift = depth - t.depth();
    VectorField f(d, depth);
    for (std::int64_t l = 0; l < f.leaves(); ++l) {
        const NodeData& w = t.leaf(l >> shift);
        const Matrix& p = inverse_root ? w.invsqrt.matrix() : w.sqrt.matrix();
        auto out = f.leaf(l);
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += p(i, j) * x[l * d + j];
            out[i] = factor * acc;
        }
    }
    return f;
}

void lower(const AveragesTree& t, const VectorField& f, bool inverse_root, double factor, std::span<double> y) {
    const int d = t.dim();
    const int shift = f.depth() - t.depth();
    for (std::int64_t l = 0; l < f.leaves(); ++l) {
        const NodeData& w = t.leaf(l >> shift);
        const Matrix& p = inverse_root ? w.invsqrt.matrix() : w.sqrt.matrix();
        const auto in = f.leaf(l);
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += p(i, j) * in[j];
            y[l * d + i] = factor * acc;
        }
    }
}

using FieldOp = std::function<VectorField(const VectorField&)>;

// Largest singular value of W_out^{1/2} S W_in^{-1/2} in orthonormal leaf
// coordinates, where S maps depth `in_depth` fields to `out_depth` fields and
// adj is its L^2 adjoint.
double weighted_norm(const AveragesTree& t, int in_depth, int out_depth, const FieldOp& op, const FieldOp& adj,
                     Method method) {
    const int d = t.dim();
    const std::size_t n = static_cast<std::size_t>(leaf_count(in_depth) * d);
    const std::size_t m = static_cast<std::size_t>(leaf_count(out_depth) * d);
    const double in_up = std::sqrt(std::ldexp(1.0, in_depth));
    const double out_up = std::sqrt(std::ldexp(1.0, out_depth));
    auto forward = [&](std::span<const double> x, std::span<double> y) {
        lower(t, op(lift(t, in_depth, x, true, in_up)), false, 1.0 / out_up, y);
    };
    if (use_dense(method, n)) return dense_singular_max(assemble(forward, n, m), m, n);
    Vec mid(m);
    auto gram = [&](std::span<const double> x, std::span<double> y) {
        forward(x, mid);
        lower(t, adj(lift(t, out_depth, mid, false, out_up)), true, 1.0 / in_up, y);
    };
    return std::sqrt(std::max(0.0, lanczos_max(gram, n).value));
}

}  // namespace

// ---------------------------------------------------------------------------

void apply_mw(const AveragesTree& t, bool include_mean, std::span<const double> x, std::span<double> y) {
    const int d = t.dim();
    const int depth = t.depth();
    HaarSpectrum s(d, depth);
    std::size_t off = 0;
    if (include_mean) {
        std::copy_n(x.begin(), d, s.mean().begin());
        off = static_cast<std::size_t>(d);
    }
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(off), x.end(), s.coefficients().begin());
    VectorField f = synthesize(s, depth);
    for (std::int64_t l = 0; l < f.leaves(); ++l) {
        const Vec wf = t.leaf(l).avg.matrix() * std::span<const double>(f.leaf(l));
        std::copy(wf.begin(), wf.end(), f.leaf(l).begin());
    }
    const HaarSpectrum out = analyze(f);
    if (include_mean) std::copy(out.mean().begin(), out.mean().end(), y.begin());
    std::copy(out.coefficients().begin(), out.coefficients().end(), y.begin() + static_cast<std::ptrdiff_t>(off));
}

SquareConstants square_constants(const AveragesTree& t, const SquareOptions& opts) {
    const int d = t.dim();
    const std::size_t n = coefficient_dim(t, opts.include_mean);
    SquareConstants out;
    out.state_dim = n;
    if (n == 0) return out;
    auto mw = [&](std::span<const double> x, std::span<double> y) { apply_mw(t, opts.include_mean, x, y); };

    if (use_dense(opts.method, n)) {
        const std::vector<double> m = assemble(mw, n, n);
        std::vector<double> dmat(n * n, 0.0);
        const auto blocks = coefficient_blocks(t, opts.include_mean, &NodeData::avg);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) dmat[(b * d + i) * n + b * d + j] = (*blocks[b])(i, j);
            }
        }
        const Vec ev = dense_generalized_eigenvalues(m, dmat, n);
        out.c_low = ev.back();
        out.c_up = 1.0 / ev.front();
        out.dense = true;
        return out;
    }

    const auto half = coefficient_blocks(t, opts.include_mean, &NodeData::invsqrt);
    Vec u(n), v(n);
    auto c_op = [&](std::span<const double> x, std::span<double> y) {
        apply_blocks(half, d, x, u);
        mw(u, v);
        apply_blocks(half, d, v, y);
    };
    out.c_low = lanczos_max(c_op, n).value;
    Vec guess(n);
    auto c_inv = [&](std::span<const double> x, std::span<double> y) {
        std::fill(guess.begin(), guess.end(), 0.0);
        conjugate_gradient(c_op, x, guess);
        std::copy(guess.begin(), guess.end(), y.begin());
    };
    out.c_up = lanczos_max(c_inv, n).value;
    out.dense = false;
    return out;
}

InverseEquivalence inverse_equivalence_check(const AveragesTree& t) {
    const int d = t.dim();
    const std::size_t n = coefficient_dim(t, false);
    InverseEquivalence out;
    if (n == 0) return out;
    if (n > kDenseLimit) throw InputError("inverse_equivalence_check is limited to state dimension 4096");
    auto mw = [&](std::span<const double> x, std::span<double> y) { apply_mw(t, false, x, y); };
    const std::vector<double> m = assemble(mw, n, n);
    std::vector<double> dmat(n * n, 0.0), dinv(n * n, 0.0);
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const NodeData& nd = t.node_at(slot);
        const std::size_t b = static_cast<std::size_t>(slot * d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                dmat[(b + i) * n + b + j] = nd.avg(i, j);
                dinv[(b + i) * n + b + j] = nd.inverse(i, j);
            }
        }
    }
    out.direct = dense_generalized_eigenvalues(m, dmat, n).back();
    out.inverse = dense_generalized_eigenvalues(dinv, dense_spd_inverse(m, n), n).back();
    out.residual = std::abs(out.direct - out.inverse);
    return out;
}

double dw_dominance_gap(const AveragesTree& t) {
    const double a2 = a2_characteristic(t);
    double best = internal_count(t.depth()) == 0 ? 1.0 : 0.0;
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const NodeData& n = t.node_at(slot);
        best = std::max(best, lambda_max(sandwich(n.avg_inv_sqrt, n.avg)));
    }
    return best / a2;
}

// ---------------------------------------------------------------------------

namespace {

double tv_alpha(const AveragesTree& t, const DyadicIndex& i) {
    const NodeData& n = t.node(i);
    const SymMatrix diff = t.node(i.left()).avg - t.node(i.right()).avg;
    const double s = op_norm(sandwich(n.invsqrt, diff));
    return s * s;
}

VectorField at_weight_depth(const AveragesTree& t, const VectorField& f, const char* what) {
    if (f.dim() != t.dim()) throw InputError(std::string(what) + ": function dimension does not match the weight");
    if (f.depth() > t.depth()) throw InputError(std::string(what) + ": function is finer than the weight");
    return f.depth() == t.depth() ? f : f.refined(t.depth());
}

}  // namespace

TvEmbedding tv_embedding_ratio(const AveragesTree& t, const VectorField& f_in) {
    const VectorField f = at_weight_depth(t, f_in, "embedding");
    const int d = t.dim();
    VectorField phi(d, f.depth());
    for (std::int64_t l = 0; l < f.leaves(); ++l) {
        const Vec v = t.leaf(l).sqrt.matrix() * f.leaf(l);
        std::copy(v.begin(), v.end(), phi.leaf(l).begin());
    }
    const NodeAverages avg = averages(phi);
    TvEmbedding out;
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        const Vec v = t.node(i).invsqrt.matrix() * avg.at(slot);
        out.lhs += i.length() * tv_alpha(t, i) * dot(v, v);
    }
    const double a2 = a2_characteristic(t);
    const double fnorm = l2_norm_sq(f);
    out.ratio = fnorm > 0.0 ? out.lhs / (a2 * log_floor(a2) * fnorm) : 0.0;
    return out;
}

CarlesonSequence tv_sequence(const AveragesTree& t) {
    CarlesonSequence a(t.dim());
    for (std::int64_t slot = 0; slot < internal_count(t.depth()); ++slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        a.set(i, (i.length() * tv_alpha(t, i)) * t.node(i).inverse);
    }
    return a;
}

double tv_embedding_constant(const AveragesTree& t, Method method) {
    return carleson_constants(tv_sequence(t), t, method).c_embed;
}

S123 s123_decomposition(const AveragesTree& t, const VectorField& f_in) {
    const VectorField f = at_weight_depth(t, f_in, "s123");
    const int d = t.dim();
    const int depth = t.depth();
    const HaarSpectrum coeffs = analyze(f);
    const NodeAverages avg = averages(f);
    const double leaf_len = f.leaf_length();
    S123 out;
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        const DisbalancedBasis b = disbalanced_basis(t, i);
        const NodeData& n = t.node(i);
        const SymMatrix what = weight_haar_coeff(t, i);
        const SymMatrix normalized = sandwich(n.invsqrt, what);
        const Vec scaled_avg = n.invsqrt.matrix() * avg.at(slot);
        const std::int64_t first = i.first_leaf(depth);
        const std::int64_t count = i.leaf_count(depth);
        for (int k = 0; k < d; ++k) {
            const Vec e = b.direction(k);
            const double w = b.weights[k];
            // <f, g^k> and <f, A h^1 e^k> by leaf quadrature over I.
            double fg = 0.0, fa = 0.0;
            for (std::int64_t l = first; l < first + count; ++l) {
                const double h = i.haar_value(depth, l);
                const auto fl = f.leaf(l);
                for (int m = 0; m < d; ++m) {
                    const double flat = b.tilde[k][m] / i.length();
                    fg += leaf_len * fl[m] * (w * h * e[m] + flat);
                    fa += leaf_len * fl[m] * flat;
                }
            }
            const double fh = dot(coeffs.coeff_at(slot), e);
            const Vec target = normalized.matrix() * std::span<const double>(e);
            const double averaged = dot(scaled_avg, target);
            out.total += w * w * fh * fh;
            out.s1 += fg * fg;
            out.s2 += 2.0 * std::abs(fg) * std::abs(fa);
            out.s3 += fa * fa;
            out.s3_averaged += averaged * averaged;
        }
    }
    out.s2_bound = 2.0 * std::sqrt(out.s1 * out.s3);
    return out;
}

// ---------------------------------------------------------------------------

double shift_norm(const AveragesTree& t, Method method) {
    const int n = t.depth();
    if (n + 1 > kMaxDepth) throw InputError("shift norm needs one level of depth beyond the weight");
    const FieldOp op = [n](const VectorField& f) { return synthesize(apply_shift(analyze(f)), n + 1); };
    const FieldOp adj = [n](const VectorField& g) { return synthesize(apply_shift_adjoint(analyze(g)), n); };
    return weighted_norm(t, n, n + 1, op, adj, method);
}

double multiplier_norm(const MultiplierSymbol& sigma, const AveragesTree& t, Method method) {
    if (sigma.dim() != t.dim()) throw InputError("multiplier: symbol dimension does not match the weight");
    const int n = t.depth();
    const FieldOp op = [&sigma, n](const VectorField& f) { return synthesize(apply_multiplier(sigma, analyze(f)), n); };
    const FieldOp adj = [&sigma, n](const VectorField& g) {
        return synthesize(apply_multiplier_adjoint(sigma, analyze(g)), n);
    };
    return weighted_norm(t, n, n, op, adj, method);
}

NecessityBound multiplier_necessity_bound(const MultiplierSymbol& sigma, const AveragesTree& t) {
    if (sigma.dim() != t.dim()) throw InputError("multiplier: symbol dimension does not match the weight");
    const int d = t.dim();
    const int depth = t.depth();
    NecessityBound out;
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        const NodeData& n = t.node(i);
        const Matrix& s = sigma.at(i);
        const SymMatrix gram = congruence(n.avg, s * n.invsqrt.matrix());
        std::vector<Vec> directions;
        for (int k = 0; k < d; ++k) {
            Vec e(static_cast<std::size_t>(d), 0.0);
            e[k] = 1.0;
            directions.push_back(e);
        }
        directions.push_back(eig_sym(gram).column(d - 1));
        for (const Vec& e : directions) {
            HaarSpectrum spec(d, depth);
            const Vec x = n.invsqrt.matrix() * std::span<const double>(e);
            std::copy(x.begin(), x.end(), spec.coeff_at(slot).begin());
            const double in = weighted_norm_sq(synthesize(spec, depth), t.field());
            const double image = weighted_norm_sq(synthesize(apply_multiplier(sigma, spec), depth), t.field());
            const double ee = dot(e, e);
            const double expected = quad_form(gram, e);
            const double scale = std::max(1.0, std::max(ee, expected));
            out.identity_residual = std::max(out.identity_residual, std::abs(in - ee) / scale);
            out.identity_residual = std::max(out.identity_residual, std::abs(image - expected) / scale);
            out.bound = std::max(out.bound, std::sqrt(std::max(0.0, image / in)));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

CarlesonSequence::CarlesonSequence(int dim) : dim_(dim) {
    if (dim <= 0) throw InputError("sequence dimension must be positive");
}

void CarlesonSequence::set(const DyadicIndex& i, const SymMatrix& m) {
    if (!i.valid()) throw InputError("sequence interval is not a dyadic interval of [0,1)");
    if (m.dim() != dim_) throw InputError("sequence matrix has wrong dimension");
    const EigenDecomp e = eig_sym(m);
    const double top = std::max(0.0, e.values.back());
    if (e.values.front() < -1e-12 * top || (top == 0.0 && e.values.front() < 0.0)) {
        throw InputError("sequence matrix at level " + std::to_string(i.level) + ", position " +
                         std::to_string(i.position) + " is not positive semidefinite");
    }
    entries_.insert_or_assign(i, m);
}

const SymMatrix* CarlesonSequence::find(const DyadicIndex& i) const {
    const auto it = entries_.find(i);
    return it == entries_.end() ? nullptr : &it->second;
}

CarlesonConstants carleson_constants(const CarlesonSequence& a, const AveragesTree& t, Method method) {
    if (a.dim() != t.dim()) throw InputError("carleson: sequence dimension does not match the weight");
    const int d = t.dim();
    const int depth = t.depth();
    const std::int64_t internal = internal_count(depth);
    for (const auto& [i, m] : a.entries()) {
        if (i.level >= depth) throw InputError("carleson: sequence entry below the internal tree of the weight");
    }
    CarlesonConstants out;

    // Testing constant: bottom-up subtree sums of <W>_I A_I <W>_I.
    std::vector<SymMatrix> sums(static_cast<std::size_t>(internal), SymMatrix(d));
    for (std::int64_t slot = internal - 1; slot >= 0; --slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        SymMatrix& s = sums[static_cast<std::size_t>(slot)];
        if (const SymMatrix* m = a.find(i)) s = sandwich(t.node(i).avg, *m);
        if (i.level + 1 < depth) {
            s += sums[static_cast<std::size_t>(2 * slot + 1)];
            s += sums[static_cast<std::size_t>(2 * slot + 2)];
        }
        const SymMatrix local = (1.0 / i.length()) * sandwich(t.node(i).invsqrt, s);
        out.c_test = std::max(out.c_test, lambda_max(local));
    }

    // Embedding constant on the leaf space of L^2(W^{-1}).
    const std::size_t n = static_cast<std::size_t>(leaf_count(depth) * d);
    const double up = std::sqrt(std::ldexp(1.0, depth));
    std::vector<std::pair<std::int64_t, const SymMatrix*>> active;
    for (const auto& [i, m] : a.entries()) active.emplace_back(i.heap(), &m);
    NodeAverages down(d, depth);
    auto gram = [&](std::span<const double> x, std::span<double> y) {
        const NodeAverages avg = averages(lift(t, depth, x, false, up));
        for (std::int64_t slot = 0; slot < node_count(depth); ++slot) {
            auto z = down.at(slot);
            std::fill(z.begin(), z.end(), 0.0);
        }
        for (const auto& [slot, m] : active) {
            const Vec v = m->matrix() * avg.at(slot);
            const double inv_len = 1.0 / DyadicIndex::from_heap(slot).length();
            auto z = down.at(slot);
            for (int k = 0; k < d; ++k) z[k] += inv_len * v[k];
        }
        for (std::int64_t slot = 1; slot < node_count(depth); ++slot) {
            const auto parent = down.at((slot - 1) / 2);
            auto z = down.at(slot);
            for (int k = 0; k < d; ++k) z[k] += parent[k];
        }
        VectorField leaves(d, depth);
        for (std::int64_t l = 0; l < leaves.leaves(); ++l) {
            const auto z = down.at(internal + l);
            std::copy(z.begin(), z.end(), leaves.leaf(l).begin());
        }
        lower(t, leaves, false, 1.0 / up, y);
    };
    if (active.empty()) return out;
    if (use_dense(method, n)) {
        out.c_embed = std::max(0.0, dense_eigenvalues(assemble(gram, n, n), n).back());
    } else {
        out.c_embed = std::max(0.0, lanczos_max(gram, n).value);
    }
    return out;
}

// ---------------------------------------------------------------------------

double testing_numerator(const AveragesTree& t) {
    const int d = t.dim();
    const int depth = t.depth();
    const std::int64_t internal = internal_count(depth);
    std::vector<SymMatrix> sums(static_cast<std::size_t>(internal), SymMatrix(d));
    double best = 0.0;
    for (std::int64_t slot = internal - 1; slot >= 0; --slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        SymMatrix& s = sums[static_cast<std::size_t>(slot)];
        s = congruence(t.node(i).inverse, weight_haar_coeff(t, i));
        if (i.level + 1 < depth) {
            s += sums[static_cast<std::size_t>(2 * slot + 1)];
            s += sums[static_cast<std::size_t>(2 * slot + 2)];
        }
        best = std::max(best, lambda_max((1.0 / i.length()) * sandwich(t.node(i).invsqrt, s)));
    }
    return best;
}

double testing_ratio(const AveragesTree& t) {
    const double a2 = a2_characteristic(t);
    return testing_numerator(t) / (a2 * a2);
}

}  // namespace matweight

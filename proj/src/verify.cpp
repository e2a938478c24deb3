// SPDX-License-Identifier: Apache-2.0
#include "matweight/verify.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "matweight/bounds.hpp"
#include "matweight/error.hpp"
#include "matweight/experiments.hpp"
#include "matweight/io.hpp"
#include "matweight/operators.hpp"
#include "matweight/weights.hpp"

namespace matweight {

int VerifyReport::passed() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed() ? 1 : 0;
    return n;
}

int VerifyReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

void print_report(std::ostream& out, const VerifyReport& r) {
    for (const auto& c : r.checks) {
        out << (c.passed() ? "PASS " : "FAIL ") << c.name << " cases=" << c.cases << " worst=" << format_number(c.worst);
        if (!c.passed()) out << " failures=" << c.failures << " detail=" << c.detail;
        out << '\n';
    }
    out << "checks=" << r.checks.size() << " passed=" << r.passed() << " failed=" << r.failed() << '\n';
}

namespace {

class Recorder {
public:
    // `metric` is the quantity compared against the tolerance (for reporting).
    void record(const std::string& name, bool ok, double metric, const std::function<std::string()>& detail) {
        auto [it, inserted] = index_.try_emplace(name, checks_.size());
        if (inserted) {
            checks_.emplace_back();
            checks_.back().name = name;
        }
        CheckResult& c = checks_[it->second];
        ++c.cases;
        if (std::isfinite(metric)) c.worst = std::max(c.worst, metric);
        if (!ok) {
            if (c.failures == 0) c.detail = detail();
            ++c.failures;
        }
    }

    // |a - b| <= tol * max(1, |b|)
    void close(const std::string& name, double a, double b, double tol, const std::string& ctx) {
        const double err = std::abs(a - b) / std::max(1.0, std::abs(b));
        record(name, err <= tol, err, [&] { return ctx + " got " + format_number(a) + " expected " + format_number(b); });
    }

    void at_most(const std::string& name, double a, double bound, const std::string& ctx) {
        record(name, a <= bound, a, [&] { return ctx + " value " + format_number(a) + " exceeds " + format_number(bound); });
    }

    std::vector<CheckResult> take() { return std::move(checks_); }

private:
    std::map<std::string, std::size_t> index_;
    std::vector<CheckResult> checks_;
};

using Rng = std::mt19937_64;

Matrix random_matrix(Rng& rng, int d) {
    std::normal_distribution<double> g;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    return m;
}

SymMatrix random_psd(Rng& rng, int d, double shift) {
    const Matrix g = random_matrix(rng, d);
    return SymMatrix(g * g.transpose()) + shift * SymMatrix::identity(d);
}

Matrix random_orthogonal(Rng& rng, int d) { return eig_sym(random_psd(rng, d, 0.0)).vectors; }

VectorField random_field(Rng& rng, int d, int depth) {
    std::normal_distribution<double> g;
    VectorField f(d, depth);
    for (double& v : f.values()) v = g(rng);
    return f;
}

MultiplierSymbol random_symbol(Rng& rng, int d, int depth) {
    MultiplierSymbol s(d);
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        s.set(DyadicIndex::from_heap(slot), random_matrix(rng, d));
    }
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string describe(int trial, int d, int depth) {
    std::ostringstream s;
    s << "trial " << trial << " (d=" << d << ", depth=" << depth << ")";
    return s.str();
}

void check_matlin(Recorder& r, Rng& rng, int d, const std::string& ctx) {
    const SymMatrix m = random_psd(rng, d, 0.05);
    const SymMatrix root = sqrt_spd(m);
    r.at_most("matlin.sqrt_roundtrip", frobenius_norm(root.matrix() * root.matrix() - m.matrix()) / m.frobenius(), 1e-9, ctx);
    const EigenDecomp e = eig_sym(m);
    const double cond = e.values.back() / e.values.front();
    const SymMatrix inv_root = invsqrt_spd(m);
    r.at_most("matlin.invsqrt_roundtrip",
              frobenius_norm(inv_root.matrix() * m.matrix() * inv_root.matrix() - Matrix::identity(d)) / cond, 1e-9, ctx);
    Matrix lam(d, d);
    for (int k = 0; k < d; ++k) lam(k, k) = e.values[k];
    const double recon = frobenius_norm(e.vectors * lam * e.vectors.transpose() - m.matrix());
    r.at_most("matlin.eig_reconstruction", recon / std::max(1.0, m.frobenius()), 1e-12, ctx);
    r.at_most("matlin.eig_orthonormal", frobenius_norm(e.vectors.transpose() * e.vectors - Matrix::identity(d)), 1e-12, ctx);

    const Matrix g = random_matrix(rng, d);
    r.at_most("matlin.op_norm_transpose", rel(op_norm(g.transpose()), op_norm(g)), 1e-12, ctx);

    const SymMatrix a1 = random_psd(rng, d, 1e-6), a2 = random_psd(rng, d, 1e-6);
    const double lambda = std::pow(op_norm(sqrt_spd(a1).matrix() * sqrt_spd(a2).matrix()), 2);
    const double tr = (a1.matrix() * a2.matrix()).trace();
    r.record("matlin.trace_band", lambda <= tr * (1 + 1e-9) && tr <= d * lambda * (1 + 1e-9), tr / lambda,
             [&] { return ctx + " trace " + format_number(tr) + " lambda " + format_number(lambda); });

    const SymMatrix b1 = a1 + random_psd(rng, d, 0.0), b2 = a2 + random_psd(rng, d, 0.0);
    const double tb = (b1.matrix() * b2.matrix()).trace();
    r.at_most("matlin.trace_order", tr - tb, 1e-9, ctx);

    const SymMatrix p = random_psd(rng, d, 0.1);
    r.close("matlin.gen_eig_reciprocal", gen_eig_extremes(m, p).max, 1.0 / gen_eig_extremes(p, m).min, 1e-9, ctx);
}

void check_dyadic(Recorder& r, Rng& rng, int d, int depth, const std::string& ctx) {
    const VectorField f = random_field(rng, d, depth);
    const HaarSpectrum s = analyze(f);
    r.close("dyadic.parseval", l2_norm_sq(f), dot(s.mean(), s.mean()) + s.coefficient_energy(), 1e-12, ctx);
    const VectorField back = synthesize(s, depth);
    double err = 0.0;
    for (std::size_t i = 0; i < f.values().size(); ++i) err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
    r.at_most("dyadic.roundtrip", err, 1e-12, ctx);
    if (depth <= 4) {
        double worst = 0.0;
        for (std::int64_t a = 0; a < internal_count(depth); ++a) {
            for (std::int64_t b = a; b < internal_count(depth); ++b) {
                const DyadicIndex i = DyadicIndex::from_heap(a), j = DyadicIndex::from_heap(b);
                double ip = 0.0;
                for (std::int64_t l = 0; l < leaf_count(depth); ++l) ip += i.haar_value(depth, l) * j.haar_value(depth, l);
                ip *= std::ldexp(1.0, -depth);
                worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
            }
        }
        r.at_most("dyadic.haar_orthonormality", worst, 1e-12, ctx);
    }
}

void check_weights(Recorder& r, Rng& rng, const WeightField& w, const AveragesTree& t, const std::string& ctx) {
    const int d = w.dim();
    double mid = 0.0, roots = 0.0, jensen = 1e300;
    for (std::int64_t slot = 0; slot < internal_count(w.depth()); ++slot) {
        const SymMatrix half = 0.5 * (t.node_at(2 * slot + 1).avg + t.node_at(2 * slot + 2).avg);
        const NodeData& n = t.node_at(slot);
        mid = std::max(mid, frobenius_norm(n.avg.matrix() - half.matrix()) / n.avg.frobenius());
    }
    for (std::int64_t slot = 0; slot < t.nodes(); ++slot) {
        const NodeData& n = t.node_at(slot);
        roots = std::max(roots, frobenius_norm(n.sqrt.matrix() * n.sqrt.matrix() - n.avg.matrix()) / n.avg.frobenius());
        jensen = std::min(jensen, lambda_min(sandwich(n.sqrt, n.avg_inv)));
    }
    r.at_most("weights.midpoint_recursion", mid, 1e-14, ctx);
    r.at_most("weights.average_sqrt", roots, 1e-10, ctx);
    r.record("weights.jensen", jensen >= 1 - 1e-9, 1 - jensen, [&] { return ctx + " lambda_min " + format_number(jensen); });

    const double a2 = a2_characteristic(t);
    r.record("weights.a2_at_least_one", a2 >= 1 - 1e-9, 1 - a2, [&] { return ctx + " a2 " + format_number(a2); });
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    r.close("weights.a2_scale_invariance", a2_characteristic(AveragesTree(w.scaled(scale(rng)))), a2, 1e-10, ctx);
    const Matrix q = random_orthogonal(rng, d);
    std::vector<SymMatrix> rotated;
    for (const auto& m : w.leaf_values()) rotated.push_back(congruence(m, q));
    r.close("weights.a2_rotation_invariance", a2_characteristic(AveragesTree(WeightField(d, w.depth(), rotated))), a2,
            1e-10, ctx);
    r.close("weights.a2_constant", a2_characteristic(AveragesTree(WeightField::constant(w.leaf(0), w.depth()))), 1.0,
            1e-10, ctx);
    if (w.depth() < kMaxDepth) {
        r.close("weights.a2_refinement", a2_characteristic(AveragesTree(w.refined(w.depth() + 1))), a2, 1e-10, ctx);
    }

    std::uniform_real_distribution<double> level(1.2, 6.0);
    const double n = level(rng);
    double inv_err = 0.0, band = 0.0;
    for (const auto& m : w.leaf_values()) {
        const TruncatedLeaf tl = truncate_leaf(m, n);
        const SymMatrix inv = inverse_spd(tl.value);
        inv_err = std::max(inv_err, frobenius_norm(inv.matrix() - tl.inverse_formula.matrix()) / inv.frobenius());
        const EigenDecomp e = eig_sym(tl.value);
        band = std::max({band, (1.0 / n - e.values.front()) * n, (e.values.back() - n) / n});
    }
    r.at_most("weights.truncation_inverse_formula", inv_err, 1e-9, ctx);
    r.at_most("weights.truncation_band", band, 1e-12, ctx);
    const AveragesTree tn(truncate(w, n));
    double trace_gap = -1e300;
    for (std::int64_t slot = 0; slot < t.nodes(); ++slot) {
        const double lhs = (tn.node_at(slot).avg.matrix() * tn.node_at(slot).avg_inv.matrix()).trace();
        const double rhs = 2.0 * d + (t.node_at(slot).avg.matrix() * t.node_at(slot).avg_inv.matrix()).trace();
        trace_gap = std::max(trace_gap, (lhs - rhs) / rhs);
    }
    r.at_most("weights.truncation_trace", trace_gap, 1e-9, ctx);

    // W = Id and f constant: the maximal function is the constant |v|.
    const VectorField one = VectorField::constant(w.depth(), std::vector<double>(static_cast<std::size_t>(d), 1.0));
    const auto mf = dyadic_maximal(one, WeightField::constant(SymMatrix::identity(d), w.depth()));
    double mf_err = 0.0;
    for (double v : mf) mf_err = std::max(mf_err, std::abs(v - std::sqrt(static_cast<double>(d))));
    r.at_most("weights.maximal_identity", mf_err, 1e-12, ctx);
}

void check_operators(Recorder& r, Rng& rng, const AveragesTree& t, bool monte_carlo, const std::string& ctx) {
    const int d = t.dim();
    const int depth = t.depth();
    const VectorField f = random_field(rng, d, depth);
    const HaarSpectrum s = analyze(f);

    const HaarSpectrum sh = apply_shift(s);
    r.close("operators.shift_parseval", sh.coefficient_energy(), s.coefficient_energy(), 1e-12, ctx);
    const double sq = square_norm_sq(s, t);
    r.record("operators.shift_isometry", rel(square_norm_sq(sh, t), sq) <= 1e-10, rel(square_norm_sq(sh, t), sq),
             [&] { return ctx; });

    const MultiplierSymbol sigma = random_symbol(rng, d, depth);
    const double sn = sigma_norm(sigma, t);
    const double contracted = square_norm_sq(apply_multiplier(sigma, s), t);
    r.at_most("operators.multiplier_contraction", contracted / (sn * sn * sq), 1 + 1e-10, ctx);
    r.close("operators.sigma_norm_forms", sigma_norm_infimum_form(sigma, t), sn, 1e-9, ctx);
    const NecessityBound nb = multiplier_necessity_bound(sigma, t);
    r.at_most("operators.necessity_identities", nb.identity_residual, 1e-10, ctx);
    r.close("operators.necessity_attains_sigma_norm", nb.bound, sn, 1e-9, ctx);

    const QuadraticForms q = quadratic_forms(s, t);
    r.close("operators.dw_is_square_norm", q.dw, sq, 1e-12, ctx);

    // Disbalanced Haar system.
    std::vector<std::pair<DyadicIndex, VectorField>> gs;
    double weight_err = 0.0, max_norm = 0.0, recon = 0.0;
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        const DyadicIndex i = DyadicIndex::from_heap(slot);
        const DisbalancedBasis b = disbalanced_basis(t, i);
        for (int k = 0; k < d; ++k) {
            const Vec e = b.direction(k);
            const double w1 = 1.0 / norm2(t.node(i).sqrt.matrix() * std::span<const double>(e));
            weight_err = std::max(weight_err, std::abs(w1 - b.weights[k]) / b.weights[k]);
            VectorField g = b.function(k, depth);
            max_norm = std::max(max_norm, std::sqrt(weighted_norm_sq(g, t.field())));
            recon = std::max(recon, reconstruct_check(t, i, k));
            if (depth <= 6) gs.emplace_back(i, std::move(g));
        }
    }
    r.at_most("operators.disbalanced_weight_forms", weight_err, 1e-10, ctx);
    r.at_most("operators.disbalanced_norm_bound", max_norm, 5 + 1e-9, ctx);
    r.at_most("operators.reconstruction", recon, 1e-10, ctx);
    if (!gs.empty()) {
        double worst = 0.0;
        for (std::size_t a = 0; a < gs.size(); ++a) {
            for (std::size_t b = a + 1; b < gs.size(); ++b) {
                if (gs[a].first == gs[b].first) continue;
                worst = std::max(worst, std::abs(weighted_inner(gs[a].second, gs[b].second, t.field())));
            }
        }
        r.at_most("operators.disbalanced_orthogonality", worst, 1e-9, ctx);
    }

    if (monte_carlo) {
        const MonteCarloEstimate mc = square_norm_mc(s, t.field(), 2000, rng());
        const double z = std::abs(mc.mean - sq) / (mc.std_error + 1e-12 * sq);
        r.at_most("operators.square_mc_band", z, 5.0, ctx);
    }
}

void check_bounds(Recorder& r, Rng& rng, const WeightField& w, const AveragesTree& t, const std::string& ctx) {
    const int d = w.dim();
    const int depth = w.depth();
    const double a2 = a2_characteristic(t);
    const double lg = log_floor(a2);

    const SquareConstants sc = square_constants(t, {false, Method::dense});
    r.record("bounds.square_constants_at_least_one", sc.c_up >= 1 - 1e-9 && sc.c_low >= 1 - 1e-9,
             1 - std::min(sc.c_up, sc.c_low), [&] { return ctx; });
    const SquareConstants sp = square_constants(t, {false, Method::power});
    r.at_most("bounds.square_power_vs_dense", std::max(rel(sp.c_up, sc.c_up), rel(sp.c_low, sc.c_low)), 1e-6, ctx);

    const InverseEquivalence ie = inverse_equivalence_check(t);
    r.at_most("bounds.inverse_equivalence", ie.residual / ie.direct, 1e-8, ctx);
    r.at_most("bounds.dw_dominance", dw_dominance_gap(t), 1 + 1e-9, ctx);

    const VectorField f = random_field(rng, d, depth);
    const S123 s = s123_decomposition(t, f);
    const QuadraticForms q = quadratic_forms(analyze(f), t);
    r.close("bounds.s123_total_is_dw_inv", s.total, q.dw_inv, 1e-10, ctx);
    r.close("bounds.s3_forms_agree", s.s3, s.s3_averaged, 1e-9, ctx);
    r.at_most("bounds.s123_chain", s.total - (s.s1 + s.s2_bound + s.s3), 1e-9 * std::max(1.0, s.total), ctx);
    r.at_most("bounds.s2_below_bound", s.s2 - s.s2_bound, 1e-9 * std::max(1.0, s.s2_bound), ctx);

    const TvEmbedding tv = tv_embedding_ratio(t, f);
    const double tv_sup = tv_embedding_constant(t, Method::dense);
    r.at_most("bounds.tv_below_sup", tv.lhs / l2_norm_sq(f), tv_sup * (1 + 1e-9) + 1e-12, ctx);

    CarlesonSequence seq(d);
    std::bernoulli_distribution keep(0.5);
    for (std::int64_t slot = 0; slot < internal_count(depth); ++slot) {
        if (keep(rng)) seq.set(DyadicIndex::from_heap(slot), random_psd(rng, d, 0.0));
    }
    for (const CarlesonSequence& a : {seq, tv_sequence(t)}) {
        const CarlesonConstants cd = carleson_constants(a, t, Method::dense);
        const CarlesonConstants cp = carleson_constants(a, t, Method::power);
        r.at_most("bounds.carleson_test_below_embed", cd.c_test - cd.c_embed, 1e-9 * std::max(1.0, cd.c_embed), ctx);
        r.at_most("bounds.carleson_power_vs_dense", cd.c_embed > 0 ? rel(cp.c_embed, cd.c_embed) : cp.c_embed, 1e-6, ctx);
    }

    const double shd = shift_norm(t, Method::dense);
    const double shp = shift_norm(t, Method::power);
    r.at_most("bounds.shift_power_vs_dense", rel(shp, shd), 1e-6, ctx);
    const MultiplierSymbol sigma = random_symbol(rng, d, depth);
    const double mnd = multiplier_norm(sigma, t, Method::dense);
    const double mnp = multiplier_norm(sigma, t, Method::power);
    r.at_most("bounds.multiplier_power_vs_dense", rel(mnp, mnd), 1e-6, ctx);
    const double sn = sigma_norm(sigma, t);
    r.record("bounds.multiplier_necessity", mnd >= multiplier_necessity_bound(sigma, t).bound * (1 - 1e-8), sn / mnd,
             [&] { return ctx + " norm " + format_number(mnd) + " below sigma bound " + format_number(sn); });

    const double num = testing_numerator(t);
    if (depth < kMaxDepth) {
        const AveragesTree fine(w.refined(depth + 1));
        const SquareConstants sf = square_constants(fine, {false, Method::dense});
        r.close("bounds.refinement_c_up", sf.c_up, sc.c_up, 1e-10, ctx);
        r.close("bounds.refinement_c_low", sf.c_low, sc.c_low, 1e-10, ctx);
        r.close("bounds.refinement_testing", testing_numerator(fine), num, 1e-10, ctx);
        r.close("bounds.refinement_c_test", carleson_constants(seq, fine, Method::dense).c_test,
                carleson_constants(seq, t, Method::dense).c_test, 1e-10, ctx);
    }
    if (d == 1) {
        const SquareConstants scaled = square_constants(AveragesTree(w.scaled(7.5)), {false, Method::dense});
        r.close("bounds.scalar_scale_invariance", scaled.c_up, sc.c_up, 1e-9, ctx);
        r.close("bounds.scalar_scale_invariance", scaled.c_low, sc.c_low, 1e-9, ctx);
    }
    if (a2 <= 100.0) {
        const bool ok = sc.c_up <= 10 * a2 * a2 * lg && sc.c_low <= 10 * a2 * lg &&
                        shd * shd <= 10 * a2 * a2 * a2 * lg * lg && mnd <= 10 * sn * std::pow(a2, 1.5) * lg;
        const double worst = std::max({sc.c_up / (a2 * a2 * lg), sc.c_low / (a2 * lg), shd * shd / (a2 * a2 * a2 * lg * lg),
                                       mnd / (sn * std::pow(a2, 1.5) * lg)});
        r.record("bounds.shape_sanity", ok, worst, [&] { return ctx + " weight " + to_json(w).dump(); });
    }
}

void check_experiments(Recorder& r, Rng& rng) {
    std::uniform_real_distribution<double> u(0.5, 50.0);
    std::vector<double> xs, ys, scaled;
    for (int i = 0; i < 8; ++i) {
        xs.push_back(u(rng));
        ys.push_back(u(rng));
    }
    const double c = u(rng);
    for (double y : ys) scaled.push_back(c * y);
    r.at_most("experiments.fit_scale_invariance",
              std::abs(fit_exponent(xs, ys).slope - fit_exponent(xs, scaled).slope), 1e-12, "fit");

    const FamilySpec spec{Family::random_martingale, {0.2, 1.0, 3, false}, 3, 2, rng()};
    SweepOptions opts;
    opts.measures = parse_measures("all");
    std::ostringstream a, b;
    write_csv(a, run_sweep(spec, opts), opts.measures);
    write_csv(b, run_sweep(spec, opts), opts.measures);
    r.record("experiments.sweep_determinism", a.str() == b.str(), 0.0, [] { return std::string("csv differs"); });
}

template <class T>
double roundtrip_gap(const T& value, T (*load)(const nlohmann::json&)) {
    const nlohmann::json j = to_json(value);
    const nlohmann::json back = to_json(load(nlohmann::json::parse(j.dump())));
    return j == back ? 0.0 : 1.0;
}

void check_roundtrip(Recorder& r, Rng& rng, const WeightField& w) {
    const int d = w.dim();
    r.at_most("cli.roundtrip_weight", roundtrip_gap(w, weight_from_json), 0.0, "weight");
    r.at_most("cli.roundtrip_function", roundtrip_gap(random_field(rng, d, w.depth()), function_from_json), 0.0, "function");
    r.at_most("cli.roundtrip_symbol", roundtrip_gap(random_symbol(rng, d, w.depth()), symbol_from_json), 0.0, "symbol");
    CarlesonSequence seq(d);
    seq.set({0, 0}, random_psd(rng, d, 0.0));
    r.at_most("cli.roundtrip_sequence", roundtrip_gap(seq, sequence_from_json), 0.0, "sequence");
}

void check_fixtures(Recorder& r, const std::string& dir) {
    namespace fs = std::filesystem;
    auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
    const AveragesTree id(load_weight(path("const_id.json")));
    const AveragesTree two(load_weight(path("two_leaf_1_4.json")));
    const AveragesTree four(load_weight(path("four_leaf_1119.json")));
    r.close("fixtures.a2_constant", a2_characteristic(id), 1.0, 1e-12, "const_id");
    r.close("fixtures.a2_two_leaf", a2_characteristic(two), 1.5625, 1e-12, "two_leaf_1_4");
    r.close("fixtures.a2_four_leaf", a2_characteristic(four), 25.0 / 9.0, 1e-12, "four_leaf_1119");
    const SquareConstants sc = square_constants(four);
    const double rho = 2.0 * std::numbers::sqrt2 / std::sqrt(15.0);
    r.close("fixtures.square_constants", sc.c_low, 1.0 + rho, 1e-10, "four_leaf_1119 c_low");
    r.close("fixtures.square_constants", sc.c_up, 1.0 / (1.0 - rho), 1e-10, "four_leaf_1119 c_up");
    r.close("fixtures.testing_ratio", testing_ratio(two), 0.9 / (1.5625 * 1.5625 * 2.5), 1e-12, "two_leaf_1_4");
    r.close("fixtures.transfer_matrix", disbalanced_basis(two, {0, 0}).transfer(0, 0), -0.6 / std::sqrt(2.5), 1e-12,
            "two_leaf_1_4");
    const VectorField ones = load_function(path("ones_d1.json"));
    const VectorField haar = load_function(path("haar_root_d1.json"));
    r.close("fixtures.tv_lhs", tv_embedding_ratio(two, ones).lhs, 1.296, 1e-12, "two_leaf_1_4 with ones");
    r.close("fixtures.s123_total", s123_decomposition(two, haar).total, 0.4, 1e-12, "two_leaf_1_4 with haar");
    const MultiplierSymbol sigma = load_symbol(path("symbol_scaled_d2.json"));
    r.close("fixtures.multiplier_identity_weight", multiplier_norm(sigma, id), sigma_norm(sigma, id), 1e-9, "const_id");
    const CarlesonSequence seq = load_sequence(path("sequence_root_d2.json"));
    const CarlesonConstants cc = carleson_constants(seq, id);
    r.close("fixtures.carleson_root", cc.c_embed, 3.0, 1e-10, "const_id root sequence");
    r.close("fixtures.carleson_root", cc.c_test, 3.0, 1e-10, "const_id root sequence");
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opts) {
    if (opts.depth < 1 || opts.depth > 8) throw InputError("verify: depth must be in [1, 8]");
    if (opts.dim < 1 || opts.dim > 4) throw InputError("verify: dim must be in [1, 4]");
    if (opts.trials < 1) throw InputError("verify: trials must be positive");
    Recorder r;
    for (int trial = 0; trial < opts.trials; ++trial) {
        Rng rng(opts.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(trial));
        const int d = 1 + trial % opts.dim;
        const int depth = 1 + (trial / opts.dim) % opts.depth;
        const std::string ctx = describe(trial, d, depth);
        try {
            std::uniform_real_distribution<double> step(0.2, 1.0);
            const WeightField w = random_martingale_weight(d, depth, step(rng), rng());
            const AveragesTree t(w);
            check_matlin(r, rng, d, ctx);
            check_dyadic(r, rng, d, depth, ctx);
            check_weights(r, rng, w, t, ctx);
            check_operators(r, rng, t, trial % 5 == 0, ctx);
            check_bounds(r, rng, w, t, ctx);
            if (trial == 0) check_roundtrip(r, rng, w);
        } catch (const std::exception& e) {
            r.record("verify.no_exceptions", false, 1.0, [&] { return ctx + ": " + e.what(); });
        }
    }
    {
        Rng rng(opts.seed);
        try {
            check_experiments(r, rng);
        } catch (const std::exception& e) {
            r.record("verify.no_exceptions", false, 1.0, [&] { return std::string("experiments: ") + e.what(); });
        }
    }
    if (!opts.fixtures.empty()) {
        try {
            check_fixtures(r, opts.fixtures);
        } catch (const std::exception& e) {
            r.record("fixtures.load", false, 1.0, [&] { return std::string(e.what()); });
        }
    }
    return {r.take()};
}

}  // namespace matweight

// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "matweight/bounds.hpp"
#include "matweight/io.hpp"
#include "matweight/operators.hpp"
#include "matweight/verify.hpp"
#include "matweight/weights.hpp"
#include "support/oracle.hpp"

using namespace matweight;
namespace fs = std::filesystem;

namespace {

// Tolerances, pinned.
constexpr double kFixtureA2Tol = 1e-12;
constexpr double kFixtureTol = 1e-4;
constexpr double kOracleRel = 1e-6;
constexpr double kMonteCarloSigmas = 5.0;
constexpr int kMonteCarloTrials = 10000;
constexpr double kScalarRel = 1e-12;
constexpr double kShapeSlack = 10.0;
constexpr double kShapeA2Cap = 100.0;
constexpr double kIdentityBudgetSeconds = 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

WeightField scalar_weight(const oracle::Scalar& s) {
    std::vector<SymMatrix> leaves;
    for (double x : s.w) leaves.push_back(SymMatrix(1, {x}));
    return WeightField(1, s.depth, std::move(leaves));
}

// 1. Exact identities over the randomized suite, d in {1,2,3}, depth <= 6.
Outcome exact_identities() {
    Outcome o;
    VerifyOptions opts;
    opts.depth = 6;
    opts.dim = 3;
    opts.seed = 20240611;
    opts.trials = 72;
    const auto start = std::chrono::steady_clock::now();
    const VerifyReport rep = run_verify(opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::set<std::string> required{
        "dyadic.parseval",
        "dyadic.haar_orthonormality",
        "weights.midpoint_recursion",
        "operators.disbalanced_orthogonality",
        "operators.disbalanced_norm_bound",
        "operators.reconstruction",
        "operators.shift_isometry",
        "operators.multiplier_contraction",
        "operators.necessity_identities",
        "bounds.inverse_equivalence",
        "bounds.dw_dominance",
        "weights.truncation_inverse_formula",
        "weights.truncation_trace",
        "weights.truncation_band",
        "matlin.trace_band",
        "matlin.trace_order",
    };
    std::set<std::string> seen;
    for (const CheckResult& c : rep.checks) {
        if (required.contains(c.name) && c.cases > 0) seen.insert(c.name);
        if (!c.passed()) o.fail(c.name + ": " + c.detail);
    }
    for (const std::string& name : required) {
        if (!seen.contains(name)) o.fail(name + " never exercised");
    }
    if (secs > kIdentityBudgetSeconds) o.fail("runtime " + format_number(secs) + " s over budget");
    if (o.pass) {
        o.detail = std::to_string(rep.checks.size()) + " checks, " + std::to_string(opts.trials) + " weights, " +
                   format_number(std::round(secs * 100) / 100) + " s";
    }
    return o;
}

// 2. Derived-value regression fixtures.
Outcome fixtures() {
    Outcome o;
    auto expect = [&](const char* what, double got, double want, double tol) {
        if (!(std::abs(got - want) <= tol)) o.fail(std::string(what) + " = " + format_number(got) + ", want " + format_number(want));
    };
    const std::string dir = MATWEIGHT_FIXTURES;
    const AveragesTree two(load_weight(dir + "/two_leaf_1_4.json"));
    const AveragesTree four(load_weight(dir + "/four_leaf_1119.json"));
    expect("a2(1,4)", a2_characteristic(two), 1.5625, kFixtureA2Tol);
    expect("a2(1,1,1,9)", a2_characteristic(four), 25.0 / 9.0, kFixtureA2Tol);

    // D^{-1/2} M D^{-1/2} from D = diag(3,1,5), M = [[3,0,2r2],[0,1,0],[2r2,0,5]]
    const double r = 2.0 * std::sqrt(2.0), dd[3] = {3, 1, 5}, m[9] = {3, 0, r, 0, 1, 0, r, 0, 5};
    oracle::Dense c(9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) c[i * 3 + j] = m[i * 3 + j] / std::sqrt(dd[i] * dd[j]);
    }
    const auto ev = oracle::jacobi_eigenvalues(c, 3);
    const SquareConstants sc = square_constants(four);
    expect("c_up", sc.c_up, 3.70782, kFixtureTol);
    expect("c_low", sc.c_low, 1.73030, kFixtureTol);
    expect("c_up vs pencil", sc.c_up, 1.0 / ev.front(), 1e-12);
    expect("c_low vs pencil", sc.c_low, ev.back(), 1e-12);
    expect("testing_ratio(1,4)", testing_ratio(two), 0.14745, kFixtureTol);
    expect("A(W,root)", disbalanced_basis(two, {0, 0}).transfer(0, 0), -0.37947, kFixtureTol);
    if (o.pass) {
        o.detail = "c_up=" + format_number(sc.c_up) + " c_low=" + format_number(sc.c_low) +
                   " testing=" + format_number(testing_ratio(two));
    }
    return o;
}

// 3. Power iteration against the dense eigensolver, and the Monte-Carlo square function.
Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(303);
    double worst = 0.0;
    int cases = 0;
    auto cmp = [&](const std::string& what, double power, double dense) {
        const double e = std::abs(power - dense) / std::max(std::abs(dense), 1e-12);
        worst = std::max(worst, e);
        ++cases;
        if (!(e <= kOracleRel)) o.fail(what + " power " + format_number(power) + " dense " + format_number(dense));
    };
    const std::pair<int, int> shapes[] = {{1, 1}, {1, 3}, {1, 6}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 2}, {3, 4}};
    for (const auto& [d, depth] : shapes) {
        for (int rep = 0; rep < 2; ++rep) {
            std::uniform_real_distribution<double> step(0.2, 1.0);
            const AveragesTree t(random_martingale_weight(d, depth, step(rng), rng()));
            const std::string tag = "d=" + std::to_string(d) + " depth=" + std::to_string(depth) + " ";
            const SquareConstants sd = square_constants(t, {false, Method::dense});
            const SquareConstants sp = square_constants(t, {false, Method::power});
            cmp(tag + "c_up", sp.c_up, sd.c_up);
            cmp(tag + "c_low", sp.c_low, sd.c_low);
            cmp(tag + "shift", shift_norm(t, Method::power), shift_norm(t, Method::dense));
            const MultiplierSymbol sigma = MultiplierSymbol::random_signs(d, depth, rng());
            cmp(tag + "tsigma", multiplier_norm(sigma, t, Method::power), multiplier_norm(sigma, t, Method::dense));
            const double tvd = tv_embedding_constant(t, Method::dense);
            if (tvd > 1e-12) cmp(tag + "tv", tv_embedding_constant(t, Method::power), tvd);
            const CarlesonSequence seq = tv_sequence(t);
            const double ce = carleson_constants(seq, t, Method::dense).c_embed;
            if (ce > 1e-12) cmp(tag + "carleson", carleson_constants(seq, t, Method::power).c_embed, ce);
        }
    }
    double worst_z = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        const int d = 1 + rep % 3, depth = 2 + rep % 4;
        const WeightField w = random_martingale_weight(d, depth, 0.8, rng());
        std::normal_distribution<double> g;
        std::vector<double> v(static_cast<std::size_t>(d) << depth);
        for (double& x : v) x = g(rng);
        const HaarSpectrum s = analyze(VectorField(d, depth, v));
        const MonteCarloEstimate mc = square_norm_mc(s, w, kMonteCarloTrials, rng());
        const double exact = square_norm_sq(s, AveragesTree(w));
        const double z = std::abs(mc.mean - exact) / mc.std_error;
        worst_z = std::max(worst_z, z);
        if (!(z <= kMonteCarloSigmas)) o.fail("monte carlo " + format_number(z) + " standard errors off");
    }
    if (o.pass) {
        o.detail = std::to_string(cases) + " comparisons, worst rel " + format_number(worst) + ", worst mc z " +
                   format_number(worst_z);
    }
    return o;
}

// 4. d = 1 pipeline against the plain scalar oracle.
Outcome scalar_cross_check() {
    Outcome o;
    std::mt19937_64 rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int depth = 1 + trial % 6;
        const oracle::Scalar s = oracle::random_scalar(rng, depth, 0.3 + 0.1 * (trial % 8));
        const AveragesTree t(scalar_weight(s));
        const std::uint64_t seed = rng();
        const MultiplierSymbol sigma = MultiplierSymbol::random_signs(1, depth, seed);
        const SquareConstants sc = square_constants(t);
        const oracle::SquarePair ref = oracle::square(s);
        const std::pair<const char*, std::pair<double, double>> pairs[] = {
            {"a2", {a2_characteristic(t), oracle::a2(s)}},
            {"c_up", {sc.c_up, ref.c_up}},
            {"c_low", {sc.c_low, ref.c_low}},
            {"shift_norm", {shift_norm(t), oracle::shift_norm(s)}},
            {"tsigma_norm", {multiplier_norm(sigma, t), oracle::multiplier_norm(s, [&](int j, int k) {
                                 return sigma.at({j, k})(0, 0);
                             })}},
            {"tv_sup", {tv_embedding_constant(t), oracle::tv_sup(s)}},
            {"testing_ratio", {testing_ratio(t), oracle::testing_ratio(s)}},
        };
        for (const auto& [name, v] : pairs) {
            // values that vanish are compared absolutely
            const double e = std::abs(v.first - v.second) / std::max(std::abs(v.second), 1.0);
            worst = std::max(worst, e);
            if (!(e <= kScalarRel)) {
                o.fail(std::string(name) + " depth " + std::to_string(depth) + ": " + format_number(v.first) + " vs " +
                       format_number(v.second));
            }
        }
    }
    if (o.pass) o.detail = "20 weights, 7 quantities, worst rel " + format_number(worst);
    return o;
}

// 5. Bound-shape sanity with slack 10.
Outcome bound_shapes() {
    Outcome o;
    std::mt19937_64 rng(505);
    int weights = 0;
    double worst = 0.0;
    auto check = [&](const WeightField& w, const std::string& tag) {
        const AveragesTree t(w);
        const double a = a2_characteristic(t);
        if (a > kShapeA2Cap) return;
        ++weights;
        const double lg = log_floor(a);
        const SquareConstants sc = square_constants(t);
        const double sh = shift_norm(t);
        const MultiplierSymbol sigma = MultiplierSymbol::random_signs(w.dim(), w.depth(), rng());
        const double sn = sigma_norm(sigma, t);
        const double ratios[] = {sc.c_up / (a * a * lg), sc.c_low / (a * lg), sh * sh / (a * a * a * lg * lg),
                                 multiplier_norm(sigma, t) / (sn * std::pow(a, 1.5) * lg)};
        for (double q : ratios) {
            worst = std::max(worst, q);
            if (!(q <= kShapeSlack)) {
                std::cout << "shape violation " << tag << " weight " << to_json(w).dump() << '\n';
                o.fail(tag + " ratio " + format_number(q));
            }
        }
    };
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + trial % 3, depth = 1 + (trial / 3) % 5;
        std::uniform_real_distribution<double> step(0.2, 1.5);
        check(random_martingale_weight(d, depth, step(rng), rng()), "random_martingale trial " + std::to_string(trial));
    }
    for (double p : {1.5, 3.0, 6.0, 9.5}) {
        check(two_value_weight(p, 5), "two_value " + format_number(p));
        check(rotation_weight(p, 5), "rotation " + format_number(p));
    }
    if (weights < 50) o.fail("only " + std::to_string(weights) + " weights under the A2 cap");
    if (o.pass) o.detail = std::to_string(weights) + " weights, worst shape ratio " + format_number(worst);
    return o;
}

int shell(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// 6. Byte-identical sweeps and a clean verify on the shipped fixtures.
Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "matweight_acceptance";
    fs::create_directories(dir);
    const std::string cli = MATWEIGHT_CLI;
    const std::string sweep = cli + " sweep --family random_martingale --range 0.2:1.4:6 --depth 4 --dim 2 --seed 99 --measure all";
    const fs::path a = dir / "a.csv", b = dir / "b.csv";
    if (shell(sweep + " --out " + a.string()) != 0 || shell(sweep + " --threads 4 --out " + b.string()) != 0) {
        o.fail("sweep exited nonzero");
    } else if (slurp(a) != slurp(b) || slurp(a).empty()) {
        o.fail("sweep output differs between runs");
    }
    const int code = shell(cli + " verify --depth 5 --dim 2 --seed 7 --trials 50 --fixtures " + MATWEIGHT_FIXTURES);
    if (code != 0) o.fail("verify exited " + std::to_string(code));
    if (o.pass) o.detail = "sweep csv " + std::to_string(slurp(a).size()) + " bytes identical, verify exit 0";
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"1 exact identities", exact_identities},
        {"2 regression fixtures", fixtures},
        {"3 oracle equivalence", oracle_equivalence},
        {"4 scalar cross-check", scalar_cross_check},
        {"5 bound-shape sanity", bound_shapes},
        {"6 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed;
}

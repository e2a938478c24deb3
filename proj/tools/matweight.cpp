// SPDX-License-Identifier: Apache-2.0
//
// matweight: command-line front end over the matweight library.
// Every subcommand prints key=value lines on stdout.
// Exit codes: 0 ok, 1 invalid input, 2 numerical failure or failed verify.
#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "matweight/bounds.hpp"
#include "matweight/error.hpp"
#include "matweight/experiments.hpp"
#include "matweight/io.hpp"
#include "matweight/operators.hpp"
#include "matweight/verify.hpp"
#include "matweight/weights.hpp"

#ifndef MATWEIGHT_FIXTURE_DIR
#define MATWEIGHT_FIXTURE_DIR ""
#endif

using namespace matweight;

namespace {

void put(const std::string& key, double v) { std::cout << key << '=' << format_number(v) << '\n'; }
void put(const std::string& key, long long v) { std::cout << key << '=' << v << '\n'; }
void put(const std::string& key, const std::string& v) { std::cout << key << '=' << v << '\n'; }

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::automatic;
    if (s == "dense") return Method::dense;
    if (s == "power") return Method::power;
    throw InputError("method: expected auto, dense or power");
}

void put_weight_summary(const AveragesTree& t) {
    put("dim", static_cast<long long>(t.dim()));
    put("depth", static_cast<long long>(t.depth()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-weighted dyadic operator constants"};
    app.require_subcommand(1, 1);

    std::string weight, function, sigma, sequence, out, method = "auto";
    bool include_mean = false;

    auto* a2 = app.add_subcommand("a2", "matrix A2 characteristic");
    a2->add_option("--weight", weight, "weight JSON")->required();

    auto* square = app.add_subcommand("square-bounds", "square function equivalence constants");
    square->add_option("--weight", weight, "weight JSON")->required();
    square->add_flag("--include-mean", include_mean, "include the mean mode");
    square->add_option("--method", method, "auto|dense|power");

    auto* shift = app.add_subcommand("shift-norm", "norm of the dyadic shift on L^2(W)");
    shift->add_option("--weight", weight, "weight JSON")->required();
    shift->add_option("--method", method, "auto|dense|power");

    auto* mult = app.add_subcommand("multiplier-norm", "norm of a Haar multiplier on L^2(W)");
    mult->add_option("--weight", weight, "weight JSON")->required();
    mult->add_option("--sigma", sigma, "symbol JSON")->required();
    mult->add_option("--method", method, "auto|dense|power");

    auto* embed = app.add_subcommand("embedding", "Treil-Volberg embedding sum");
    embed->add_option("--weight", weight, "weight JSON")->required();
    embed->add_option("--function", function, "function JSON")->required();
    embed->add_option("--method", method, "auto|dense|power");

    auto* s123 = app.add_subcommand("s123", "S1/S2/S3 decomposition");
    s123->add_option("--weight", weight, "weight JSON")->required();
    s123->add_option("--function", function, "function JSON")->required();

    auto* testing = app.add_subcommand("testing", "matrix testing ratio");
    testing->add_option("--weight", weight, "weight JSON")->required();

    auto* carleson = app.add_subcommand("carleson", "Carleson embedding and testing constants");
    carleson->add_option("--weight", weight, "weight JSON")->required();
    carleson->add_option("--sequence", sequence, "sequence JSON")->required();
    carleson->add_option("--method", method, "auto|dense|power");

    double level = 0.0;
    auto* trunc = app.add_subcommand("truncate", "eigenvalue truncation of a weight");
    trunc->add_option("--weight", weight, "weight JSON")->required();
    trunc->add_option("--n", level, "truncation level > 1")->required();
    trunc->add_option("--out", out, "output weight JSON")->required();

    auto* maximal = app.add_subcommand("maximal", "dyadic Christ-Goldberg maximal function");
    maximal->add_option("--weight", weight, "weight JSON")->required();
    maximal->add_option("--function", function, "function JSON")->required();

    std::string family, range, measures = "a2";
    int depth = 4, dim = 1, threads = 1;
    std::uint64_t seed = 0;
    bool timing = false;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep over a weight family");
    sweep->add_option("--family", family, "constant|two_value|rotation|random_martingale")->required();
    sweep->add_option("--range", range, "a:b:n[:geom]")->required();
    sweep->add_option("--depth", depth, "tree depth");
    sweep->add_option("--dim", dim, "matrix dimension (default: implied by the family, else 1)");
    sweep->add_option("--seed", seed, "random seed");
    sweep->add_option("--measure", measures, "comma list of a2,square,shift,tsigma,tv,testing or all");
    sweep->add_option("--out", out, "CSV path")->required();
    sweep->add_option("--threads", threads, "worker threads");
    sweep->add_option("--method", method, "auto|dense|power");
    sweep->add_flag("--timing", timing, "record wall-clock runtime_ms");

    VerifyOptions vopts;
    auto* verify = app.add_subcommand("verify", "randomized invariant suite");
    verify->add_option("--depth", vopts.depth, "largest depth");
    verify->add_option("--dim", vopts.dim, "largest dimension");
    verify->add_option("--seed", vopts.seed, "random seed");
    verify->add_option("--trials", vopts.trials, "random weights");
    verify->add_option("--fixtures", vopts.fixtures, "fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        const Method m = parse_method(method);
        if (*a2) {
            const AveragesTree t(load_weight(weight));
            put("a2", a2_characteristic(t));
            put_weight_summary(t);
        } else if (*square) {
            const AveragesTree t(load_weight(weight));
            const SquareConstants sc = square_constants(t, {include_mean, m});
            const double a = a2_characteristic(t);
            put("c_low", sc.c_low);
            put("c_up", sc.c_up);
            put("a2", a);
            put("c_up_over_b_w", sc.c_up / (a * a * log_floor(a)));
            put("c_low_over_c_w", sc.c_low / (a * log_floor(a)));
            put("state_dim", static_cast<long long>(sc.state_dim));
            put("method", std::string(sc.dense ? "dense" : "power"));
        } else if (*shift) {
            const AveragesTree t(load_weight(weight));
            const double s = shift_norm(t, m);
            const double a = a2_characteristic(t);
            put("shift_norm", s);
            put("a2", a);
            put("shift_sq_over_shape", s * s / (a * a * a * log_floor(a) * log_floor(a)));
        } else if (*mult) {
            const AveragesTree t(load_weight(weight));
            const MultiplierSymbol sym = load_symbol(sigma);
            const double n = multiplier_norm(sym, t, m);
            const double sn = sigma_norm(sym, t);
            const double a = a2_characteristic(t);
            put("tsigma_norm", n);
            put("sigma_norm", sn);
            put("necessity_bound", multiplier_necessity_bound(sym, t).bound);
            put("a2", a);
            if (sn > 0.0) put("tsigma_over_shape", n / (sn * std::pow(a, 1.5) * log_floor(a)));
        } else if (*embed) {
            const AveragesTree t(load_weight(weight));
            const TvEmbedding tv = tv_embedding_ratio(t, load_function(function));
            const double a = a2_characteristic(t);
            const double sup = tv_embedding_constant(t, m);
            put("lhs", tv.lhs);
            put("ratio", tv.ratio);
            put("sup", sup);
            put("sup_ratio", sup / (a * log_floor(a)));
            put("a2", a);
        } else if (*s123) {
            const AveragesTree t(load_weight(weight));
            const VectorField f = load_function(function);
            const S123 s = s123_decomposition(t, f);
            put("s1", s.s1);
            put("s2", s.s2);
            put("s2_bound", s.s2_bound);
            put("s3", s.s3);
            put("s3_averaged", s.s3_averaged);
            put("total", s.total);
            put("dw_inv", quadratic_forms(analyze(f.depth() == t.depth() ? f : f.refined(t.depth())), t).dw_inv);
        } else if (*testing) {
            const AveragesTree t(load_weight(weight));
            put("testing_ratio", testing_ratio(t));
            put("testing_numerator", testing_numerator(t));
            put("a2", a2_characteristic(t));
        } else if (*carleson) {
            const AveragesTree t(load_weight(weight));
            const CarlesonConstants c = carleson_constants(load_sequence(sequence), t, m);
            put("c_embed", c.c_embed);
            put("c_test", c.c_test);
            put("ratio", c.ratio());
        } else if (*trunc) {
            const WeightField w = load_weight(weight);
            const WeightField wn = truncate(w, level);
            write_json(out, to_json(wn));
            const double a = a2_characteristic(AveragesTree(w));
            const double an = a2_characteristic(AveragesTree(wn));
            put("a2", a);
            put("a2_truncated", an);
            put("ratio", an / a);
            put("out", out);
        } else if (*maximal) {
            const std::vector<double> mf = dyadic_maximal(load_function(function), load_weight(weight));
            for (std::size_t i = 0; i < mf.size(); ++i) put("leaf_" + std::to_string(i), mf[i]);
            put("max", *std::max_element(mf.begin(), mf.end()));
        } else if (*sweep) {
            const Family fam = parse_family(family);
            // rotation and two_value fix their own dimension
            if (sweep->count("--dim") == 0) dim = fam == Family::rotation ? 2 : fam == Family::two_value ? 1 : dim;
            FamilySpec spec{fam, ParamGrid::parse(range), depth, dim, seed};
            SweepOptions opts;
            opts.measures = parse_measures(measures);
            opts.method = m;
            opts.threads = threads;
            opts.timing = timing;
            const std::vector<SweepRow> rows = run_sweep(spec, opts);
            std::ostringstream csv;
            write_csv(csv, rows, opts.measures);
            std::ofstream file(out);
            if (!(file << csv.str())) throw InputError("out: cannot write " + out);
            const long long failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
            put("rows", static_cast<long long>(rows.size()));
            put("failed", failed);
            for (const SweepRow& r : rows) {
                if (r.failed) std::cerr << "row param=" << format_number(r.param) << " failed: " << r.error << '\n';
            }
            const std::pair<const char*, Measure> columns[] = {
                {"c_up", Measure::square},      {"c_low", Measure::square}, {"shift_norm", Measure::shift},
                {"tsigma_norm", Measure::tsigma}, {"tv_ratio", Measure::tv}, {"testing_ratio", Measure::testing}};
            for (const auto& [column, measure] : columns) {
                if (!opts.measures.contains(Measure::a2) || !opts.measures.contains(measure)) continue;
                const std::string k = std::string("fit.") + column;
                try {
                    const FitReport rep = fit_report(rows, column);
                    put(k + ".slope", rep.raw.slope);
                    put(k + ".intercept", rep.raw.intercept);
                    put(k + ".r2", rep.raw.r2);
                    put(k + ".excluded", static_cast<long long>(rep.excluded));
                    for (const ResidualFit& res : rep.residuals) {
                        put(k + ".residual_" + format_number(res.base_slope) + ".slope", res.fit.slope);
                    }
                } catch (const InputError& e) {
                    put(k, std::string("refused"));
                    std::cerr << k << ": " << e.what() << '\n';
                }
            }
            put("out", out);
        } else if (*verify) {
            if (vopts.fixtures.empty() && std::filesystem::is_directory(MATWEIGHT_FIXTURE_DIR)) {
                vopts.fixtures = MATWEIGHT_FIXTURE_DIR;
            }
            const VerifyReport rep = run_verify(vopts);
            print_report(std::cout, rep);
            return rep.ok() ? 0 : 2;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

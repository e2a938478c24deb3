// SPDX-License-Identifier: Apache-2.0
#include "matweight/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "matweight/bounds.hpp"
#include "matweight/error.hpp"
#include "matweight/io.hpp"
#include "matweight/operators.hpp"

namespace matweight {

namespace {

double parse_double(std::string_view s, const char* field) {
    try {
        std::size_t used = 0;
        const std::string str(s);
        const double v = std::stod(str, &used);
        if (used != str.size() || !std::isfinite(v)) throw std::invalid_argument(str);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string(field) + ": expected a number, got '" + std::string(s) + "'");
    }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = text.find(sep, pos);
        parts.push_back(text.substr(pos, next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

SweepRow compute_row(const FamilySpec& spec, double param, const SweepOptions& opts) {
    SweepRow row;
    row.family = std::string(family_name(spec.family));
    row.param = param;
    row.depth = spec.depth;
    row.dim = spec.dim;
    const auto start = std::chrono::steady_clock::now();
    try {
        GenerateStats stats;
        const AveragesTree t(generate({spec.family, param, spec.depth, spec.dim, spec.seed}, &stats));
        row.rejections = stats.rejections;
        const auto& m = opts.measures;
        const double a2 = a2_characteristic(t);
        if (m.contains(Measure::a2)) row.a2 = a2;
        if (m.contains(Measure::square)) {
            const SquareConstants sc = square_constants(t, {false, opts.method});
            row.c_up = sc.c_up;
            row.c_low = sc.c_low;
        }
        if (m.contains(Measure::shift)) row.shift_norm = shift_norm(t, opts.method);
        if (m.contains(Measure::tsigma)) {
            row.tsigma_norm = multiplier_norm(MultiplierSymbol::random_signs(spec.dim, spec.depth, spec.seed), t,
                                              opts.method);
        }
        if (m.contains(Measure::tv)) row.tv_ratio = tv_embedding_constant(t, opts.method) / (a2 * log_floor(a2));
        if (m.contains(Measure::testing)) row.testing_ratio = testing_ratio(t);
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    if (opts.timing) {
        row.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
}

std::optional<double> column_value(const SweepRow& r, std::string_view column) {
    if (column == "a2") return r.a2;
    if (column == "c_up") return r.c_up;
    if (column == "c_low") return r.c_low;
    if (column == "shift_norm") return r.shift_norm;
    if (column == "tsigma_norm") return r.tsigma_norm;
    if (column == "tv_ratio") return r.tv_ratio;
    if (column == "testing_ratio") return r.testing_ratio;
    throw InputError("unknown sweep column '" + std::string(column) + "'");
}

}  // namespace

ParamGrid ParamGrid::parse(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) throw InputError("range: expected a:b:n or a:b:n:geom");
    ParamGrid g;
    g.start = parse_double(parts[0], "range start");
    g.stop = parse_double(parts[1], "range stop");
    const double count = parse_double(parts[2], "range count");
    if (count < 1 || count != std::floor(count) || count > 1e6) throw InputError("range count must be a positive integer");
    g.count = static_cast<int>(count);
    if (parts.size() == 4) {
        if (parts[3] == "geom") {
            g.geometric = true;
        } else if (parts[3] != "lin") {
            throw InputError("range spacing must be 'geom' or 'lin'");
        }
    }
    if (g.geometric && (g.start <= 0.0 || g.stop <= 0.0)) throw InputError("range: geometric grid needs positive ends");
    return g;
}

std::vector<double> ParamGrid::values() const {
    std::vector<double> v;
    if (count <= 1) return {start};
    for (int i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / (count - 1);
        v.push_back(geometric ? start * std::pow(stop / start, s) : start + s * (stop - start));
    }
    v.back() = stop;
    return v;
}

MeasureSet parse_measures(std::string_view text) {
    MeasureSet out;
    for (const auto name : split(text, ',')) {
        if (name == "all") {
            out.insert({Measure::a2, Measure::square, Measure::shift, Measure::tsigma, Measure::tv, Measure::testing});
        } else if (name == "a2") {
            out.insert(Measure::a2);
        } else if (name == "square") {
            out.insert(Measure::square);
        } else if (name == "shift") {
            out.insert(Measure::shift);
        } else if (name == "tsigma") {
            out.insert(Measure::tsigma);
        } else if (name == "tv") {
            out.insert(Measure::tv);
        } else if (name == "testing") {
            out.insert(Measure::testing);
        } else {
            throw InputError("measure: unknown name '" + std::string(name) + "'");
        }
    }
    return out;
}

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::a2: return "a2";
        case Measure::square: return "square";
        case Measure::shift: return "shift";
        case Measure::tsigma: return "tsigma";
        case Measure::tv: return "tv";
        case Measure::testing: return "testing";
    }
    return "?";
}

std::vector<SweepRow> run_sweep(const FamilySpec& spec, const SweepOptions& opts) {
    const std::vector<double> params = spec.grid.values();
    std::vector<SweepRow> rows(params.size());
    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(params.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < params.size(); ++i) rows[i] = compute_row(spec, params[i], opts);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < params.size(); i = next++) rows[i] = compute_row(spec, params[i], opts);
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, const MeasureSet& measures) {
    out << kCsvHeader << '\n';
    auto cell = [&](const std::optional<double>& v, bool measured, bool failed) {
        out << ',';
        if (!measured) return;
        if (failed || !v) {
            out << "nan";
        } else {
            out << format_number(*v);
        }
    };
    for (const SweepRow& r : rows) {
        out << r.family << ',' << format_number(r.param) << ',' << r.depth << ',' << r.dim;
        cell(r.a2, measures.contains(Measure::a2), r.failed);
        cell(r.c_up, measures.contains(Measure::square), r.failed);
        cell(r.c_low, measures.contains(Measure::square), r.failed);
        cell(r.shift_norm, measures.contains(Measure::shift), r.failed);
        cell(r.tsigma_norm, measures.contains(Measure::tsigma), r.failed);
        cell(r.tv_ratio, measures.contains(Measure::tv), r.failed);
        cell(r.testing_ratio, measures.contains(Measure::testing), r.failed);
        out << ',' << format_number(r.runtime_ms) << '\n';
    }
}

ExponentFit fit_exponent(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputError("fit_exponent: xs and ys differ in length");
    if (xs.size() < 2) throw InputError("fit_exponent: need at least two points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw InputError("fit_exponent: values must be positive and finite");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx <= 1e-24 * std::max(1.0, mx * mx) * static_cast<double>(n)) {
        throw InputError("fit_exponent: x values have no spread in log scale");
    }
    ExponentFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

FitReport fit_report(const std::vector<SweepRow>& rows, std::string_view column) {
    FitReport rep;
    rep.column = std::string(column);
    std::vector<double> xs, ys;
    for (const SweepRow& r : rows) {
        const auto y = column_value(r, column);
        if (r.failed || !r.a2 || !y || !(*r.a2 > 0.0) || !(*y > 0.0)) {
            ++rep.excluded;
            continue;
        }
        xs.push_back(*r.a2);
        ys.push_back(*y);
    }
    rep.raw = fit_exponent(xs, ys);
    for (const double base : {1.0, 1.5, 2.0}) {
        std::vector<double> scaled(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) scaled[i] = ys[i] / (std::pow(xs[i], base) * log_floor(xs[i]));
        rep.residuals.push_back({base, fit_exponent(xs, scaled)});
    }
    return rep;
}

}  // namespace matweight

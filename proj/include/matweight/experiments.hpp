// SPDX-License-Identifier: Apache-2.0
//
// Parameter sweeps over weight families, CSV output and log-log exponent fits.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matweight/spectral.hpp"
#include "matweight/weights.hpp"

namespace matweight {

struct ParamGrid {
    double start = 1.0;
    double stop = 1.0;
    int count = 1;
    bool geometric = false;

    /// "a:b:n" or "a:b:n:geom" (also "lin").
    static ParamGrid parse(std::string_view text);
    [[nodiscard]] std::vector<double> values() const;
};

enum class Measure { a2, square, shift, tsigma, tv, testing };

using MeasureSet = std::set<Measure>;

/// Comma-separated measure names; "all" selects every measure.
MeasureSet parse_measures(std::string_view text);
std::string_view measure_name(Measure m);

struct FamilySpec {
    Family family = Family::constant;
    ParamGrid grid;
    int depth = 1;
    int dim = 1;
    std::uint64_t seed = 0;
};

struct SweepRow {
    std::string family;
    double param = 0.0;
    int depth = 0;
    int dim = 0;
    std::optional<double> a2, c_up, c_low, shift_norm, tsigma_norm, tv_ratio, testing_ratio;
    double runtime_ms = 0.0;
    int rejections = 0;
    bool failed = false;
    std::string error;
};

struct SweepOptions {
    MeasureSet measures{Measure::a2};
    Method method = Method::automatic;
    int threads = 1;
    /// Wall-clock timings make CSV output run-dependent; off by default.
    bool timing = false;
};

/// One row per grid value in parameter order. A failing row is recorded with
/// its error and the sweep continues.
std::vector<SweepRow> run_sweep(const FamilySpec& spec, const SweepOptions& opts = {});

inline constexpr std::string_view kCsvHeader =
    "family,param,depth,dim,a2,c_up,c_low,shift_norm,tsigma_norm,tv_ratio,testing_ratio,runtime_ms";

/// Unmeasured columns are empty; failed rows carry "nan" in measured columns.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, const MeasureSet& measures);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least squares of log y on log x. Throws InputError on non-positive values,
/// fewer than two points or zero variance in log x.
ExponentFit fit_exponent(std::span<const double> xs, std::span<const double> ys);

struct ResidualFit {
    double base_slope = 0.0;
    ExponentFit fit;  // of y / (x^base_slope max(1, log x)) against x
};

struct FitReport {
    std::string column;
    ExponentFit raw;
    std::vector<ResidualFit> residuals;
    int excluded = 0;  // failed or non-positive rows
};

/// Fits a measured column against the a2 column. Column names follow the CSV.
FitReport fit_report(const std::vector<SweepRow>& rows, std::string_view column);

}  // namespace matweight

// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "matweight/error.hpp"
#include "matweight/experiments.hpp"

using namespace matweight;

TEST(Experiments, GridParsing) {
    const ParamGrid g = ParamGrid::parse("1:16:5:geom");
    EXPECT_TRUE(g.geometric);
    const auto v = g.values();
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v.front(), 1.0);
    EXPECT_NEAR(v[1], 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(v.back(), 16.0);
    const auto lin = ParamGrid::parse("0:1:3").values();
    EXPECT_DOUBLE_EQ(lin[1], 0.5);
    EXPECT_EQ(ParamGrid::parse("2:3:1").values(), std::vector<double>{2.0});
    EXPECT_THROW(ParamGrid::parse("1:2"), InputError);
    EXPECT_THROW(ParamGrid::parse("0:2:3:geom"), InputError);
    EXPECT_THROW(ParamGrid::parse("1:2:x"), InputError);
    EXPECT_THROW(ParamGrid::parse("1:2:3:log"), InputError);
}

TEST(Experiments, Measures) {
    EXPECT_EQ(parse_measures("all").size(), 6u);
    EXPECT_EQ(parse_measures("a2,tv"), (MeasureSet{Measure::a2, Measure::tv}));
    EXPECT_THROW(parse_measures("a2,bogus"), InputError);
    EXPECT_EQ(measure_name(Measure::testing), "testing");
}

TEST(Experiments, FitExact) {
    const std::vector<double> xs{1.5, 2, 4, 9};
    std::vector<double> sq, lin;
    for (double x : xs) {
        sq.push_back(x * x);
        lin.push_back(3.7 * x);
    }
    const ExponentFit a = fit_exponent(xs, sq);
    EXPECT_NEAR(a.slope, 2.0, 1e-12);
    EXPECT_NEAR(a.r2, 1.0, 1e-12);
    const ExponentFit b = fit_exponent(xs, lin);
    EXPECT_NEAR(b.slope, 1.0, 1e-12);
    EXPECT_NEAR(b.intercept, std::log(3.7), 1e-12);
}

TEST(Experiments, FitScaleInvariance) {
    const std::vector<double> xs{1.2, 2.5, 3.1, 7.9}, ys{1.0, 3.2, 2.9, 11.0};
    std::vector<double> scaled;
    for (double y : ys) scaled.push_back(42.0 * y);
    EXPECT_NEAR(fit_exponent(xs, scaled).slope, fit_exponent(xs, ys).slope, 1e-12);
}

TEST(Experiments, FitRefusals) {
    EXPECT_THROW(fit_exponent(std::vector<double>{2.0}, std::vector<double>{1.0}), InputError);
    EXPECT_THROW(fit_exponent(std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 3.0}), InputError);
    EXPECT_THROW(fit_exponent(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 3.0}), InputError);
}

TEST(Experiments, ConstantFamilySweep) {
    FamilySpec spec{Family::constant, ParamGrid::parse("1:5:3"), 3, 2, 1};
    SweepOptions opts;
    opts.measures = parse_measures("a2,square");
    for (const SweepRow& r : run_sweep(spec, opts)) {
        EXPECT_FALSE(r.failed);
        EXPECT_NEAR(*r.a2, 1.0, 1e-10);
        EXPECT_NEAR(*r.c_up, 1.0, 1e-10);
        EXPECT_NEAR(*r.c_low, 1.0, 1e-10);
        EXPECT_FALSE(r.shift_norm.has_value());
    }
}

TEST(Experiments, DegenerateGridRefusesFit) {
    FamilySpec spec{Family::two_value, ParamGrid::parse("1:1:1"), 3, 1, 0};
    SweepOptions opts;
    opts.measures = parse_measures("a2,square");
    EXPECT_THROW(fit_report(run_sweep(spec, opts), "c_up"), InputError);
}

TEST(Experiments, TwoValueA2Monotone) {
    FamilySpec spec{Family::two_value, ParamGrid::parse("1.1:16:12:geom"), 6, 1, 0};
    const auto rows = run_sweep(spec);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(*rows[i].a2, *rows[i - 1].a2);
}

TEST(Experiments, CsvDeterministicAcrossThreads) {
    FamilySpec spec{Family::random_martingale, ParamGrid::parse("0.2:1.0:5"), 3, 2, 17};
    SweepOptions opts;
    opts.measures = parse_measures("all");
    std::ostringstream a, b;
    write_csv(a, run_sweep(spec, opts), opts.measures);
    opts.threads = 4;
    write_csv(b, run_sweep(spec, opts), opts.measures);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, kCsvHeader.size()), kCsvHeader);
}

TEST(Experiments, CsvLeavesUnmeasuredEmpty) {
    FamilySpec spec{Family::constant, ParamGrid::parse("2:2:1"), 2, 1, 0};
    SweepOptions opts;
    std::ostringstream out;
    write_csv(out, run_sweep(spec, opts), opts.measures);
    const std::string row = out.str().substr(kCsvHeader.size() + 1);
    EXPECT_EQ(row.rfind("constant,2.0,2,1,1.0", 0), 0u);
    EXPECT_EQ(row.substr(row.size() - 11), ",,,,,,,0.0\n");
}

TEST(Experiments, FailedRowsAreKept) {
    FamilySpec spec{Family::two_value, ParamGrid::parse("-1:2:2"), 2, 1, 0};
    const auto rows = run_sweep(spec);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].failed);
    EXPECT_FALSE(rows[1].failed);
    std::ostringstream out;
    write_csv(out, rows, SweepOptions{}.measures);
    EXPECT_NE(out.str().find("two_value,-1.0,2,1,nan"), std::string::npos);
}

TEST(Experiments, FitReportResiduals) {
    FamilySpec spec{Family::two_value, ParamGrid::parse("1.5:8:6:geom"), 4, 1, 0};
    SweepOptions opts;
    opts.measures = parse_measures("a2,square");
    const FitReport rep = fit_report(run_sweep(spec, opts), "c_up");
    EXPECT_EQ(rep.residuals.size(), 3u);
    EXPECT_EQ(rep.excluded, 0);
    EXPECT_NEAR(rep.residuals[0].fit.slope + 1.0, rep.residuals[2].fit.slope + 2.0, 1e-12);
}

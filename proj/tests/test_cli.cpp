// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::map<std::string, std::string> kv;
};

CliRun run(const std::string& args) {
    CliRun r;
    const std::string cmd = std::string(MATWEIGHT_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), p) != nullptr) r.out += buf;
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
}

std::string fixture(const std::string& name) { return std::string(MATWEIGHT_FIXTURES) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "matweight_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, A2OnIdentity) {
    const CliRun r = run("a2 --weight " + fixture("const_id.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("a2=1.0\n"), std::string::npos);
}

TEST(Cli, SquareBoundsFourLeaf) {
    const CliRun r = run("square-bounds --weight " + fixture("four_leaf_1119.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.kv.at("c_low")), 1.73030, 1e-4);
    EXPECT_NEAR(std::stod(r.kv.at("c_up")), 3.70782, 1e-4);
    const CliRun p = run("square-bounds --method power --weight " + fixture("four_leaf_1119.json"));
    EXPECT_NEAR(std::stod(p.kv.at("c_low")), std::stod(r.kv.at("c_low")), 1e-6);
    EXPECT_EQ(p.kv.at("method"), "power");
}

TEST(Cli, EverySubcommandReports) {
    const std::string w1 = fixture("two_leaf_1_4.json"), id = fixture("const_id.json");
    EXPECT_NEAR(std::stod(run("testing --weight " + w1).kv.at("testing_ratio")), 0.14745, 1e-4);
    EXPECT_NEAR(std::stod(run("embedding --weight " + w1 + " --function " + fixture("ones_d1.json")).kv.at("lhs")), 1.296,
                1e-12);
    EXPECT_NEAR(std::stod(run("s123 --weight " + w1 + " --function " + fixture("haar_root_d1.json")).kv.at("total")), 0.4,
                1e-12);
    EXPECT_NEAR(std::stod(run("shift-norm --weight " + id).kv.at("shift_norm")), 1.0, 1e-12);
    EXPECT_NEAR(std::stod(run("multiplier-norm --weight " + id + " --sigma " + fixture("symbol_scaled_d2.json"))
                              .kv.at("tsigma_norm")),
                2.0, 1e-12);
    EXPECT_NEAR(std::stod(run("carleson --weight " + id + " --sequence " + fixture("sequence_root_d2.json")).kv.at("c_embed")),
                3.0, 1e-12);
    const CliRun m = run("maximal --weight " + w1 + " --function " + fixture("step_d1.json"));
    EXPECT_EQ(m.code, 0);
    EXPECT_TRUE(m.kv.contains("leaf_1"));
}

TEST(Cli, TruncateWritesWeight) {
    const fs::path out = scratch("trunc.json");
    const CliRun r = run("truncate --weight " + fixture("four_leaf_1119.json") + " --n 3 --out " + out.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(slurp(out).find("\"kind\": \"weight\""), std::string::npos);
    EXPECT_EQ(run("a2 --weight " + out.string()).code, 0);
    EXPECT_EQ(run("truncate --weight " + fixture("four_leaf_1119.json") + " --n 0.5 --out " + out.string()).code, 1);
}

TEST(Cli, SweepIsByteIdentical) {
    const fs::path a = scratch("a.csv"), b = scratch("b.csv");
    const std::string base = "sweep --family random_martingale --range 0.2:1.2:4 --depth 3 --dim 2 --seed 5 --measure all";
    const CliRun ra = run(base + " --out " + a.string());
    const CliRun rb = run(base + " --threads 3 --out " + b.string());
    ASSERT_EQ(ra.code, 0);
    ASSERT_EQ(rb.code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).substr(0, slurp(a).find('\n')),
              "family,param,depth,dim,a2,c_up,c_low,shift_norm,tsigma_norm,tv_ratio,testing_ratio,runtime_ms");
    EXPECT_TRUE(ra.kv.contains("fit.c_up.slope"));
}

TEST(Cli, SweepRefusesDegenerateFit) {
    const CliRun r = run("sweep --family two_value --range 1:1:1 --depth 3 --measure a2,square --out " + scratch("d.csv").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.kv.at("fit.c_up"), "refused");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("a2").code, 1);
    EXPECT_EQ(run("nosuch").code, 1);
    EXPECT_EQ(run("a2 --weight /nonexistent.json").code, 1);
    const fs::path bad = scratch("bad.json");
    std::ofstream(bad) << R"({"kind":"weight","dim":1,"depth":1,"leaves":[[1]]})";
    EXPECT_EQ(run("a2 --weight " + bad.string()).code, 1);
    const fs::path npd = scratch("npd.json");
    std::ofstream(npd) << R"({"kind":"weight","dim":1,"depth":1,"leaves":[[1],[-2]]})";
    EXPECT_EQ(run("a2 --weight " + npd.string()).code, 2);
    EXPECT_EQ(run("square-bounds --method sideways --weight " + fixture("const_id.json")).code, 1);
}

TEST(Cli, VerifyPasses) {
    const CliRun r = run("verify --depth 5 --dim 2 --seed 7 --trials 50 --fixtures " + std::string(MATWEIGHT_FIXTURES));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(" failed=0\n"), std::string::npos);
}

TEST(Cli, SweepDimensionFollowsFamily) {
    const fs::path out = scratch("rot.csv");
    const CliRun r = run("sweep --family rotation --range 1.5:4:3:geom --depth 3 --measure a2 --out " + out.string());
    EXPECT_EQ(r.kv.at("failed"), "0");
    EXPECT_NE(slurp(out).find("rotation,1.5,3,2,"), std::string::npos);
    EXPECT_EQ(run("sweep --family rotation --range 1.5:4:3 --dim 3 --out " + out.string()).kv.at("failed"), "3");
}

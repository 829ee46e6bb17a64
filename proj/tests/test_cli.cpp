#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pvfree/cli.hpp"

using namespace pvfree;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(PVFREE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    Run r{-1, {}};
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "pvfree_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, SchemeFromMasses) {
    const auto r = run_cli("scheme --m0 1 --m1 2 --m2 3");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["c"][0].get<double>(), 1.0, 1e-15);
    EXPECT_NEAR(j["c"][1].get<double>(), -1.6, 1e-15);
    EXPECT_NEAR(j["c"][2].get<double>(), 0.6, 1e-15);
    EXPECT_GT(j["cutoff"].get<double>(), 1.0);
}

TEST(Cli, SchemeJsonRoundTrip) {
    const auto path = scratch("scheme.json");
    ASSERT_EQ(run_cli("scheme --m0 1 --cutoff 50 --json " + path.string()).code, 0);
    const auto s = scheme_from_json(slurp(path));
    EXPECT_NEAR(s.cutoff / 50.0, 1.0, 1e-10);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli("frobnicate").code, 2);
    EXPECT_EQ(run_cli("").code, 2);
    EXPECT_EQ(run_cli("scheme --m0 1").code, 2);
    EXPECT_EQ(run_cli("table --beta 1").code, 2);
    EXPECT_EQ(run_cli("table --quantity foo --beta 1 --k-min 0 --k-max 1 --samples 2 --out x.csv").code, 2);
}

TEST(Cli, RuntimeErrors) {
    EXPECT_EQ(run_cli("scheme --m0 1 --m1 1 --m2 3").code, 3);
    EXPECT_EQ(run_cli("uehling --k -1").code, 3);
    EXPECT_EQ(run_cli("energy --field /nonexistent/f.json --beta 1 --out x.json").code, 3);
}

TEST(Cli, Uehling) {
    const auto r = run_cli("uehling --k 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.out), 0.0192353209028294045, 1e-15);
}

TEST(Cli, VerifyTheta) {
    const auto r = run_cli("verify --suite theta");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("failures: []"), std::string::npos);
}

TEST(Cli, Table) {
    const auto path = scratch("table.csv");
    ASSERT_EQ(run_cli("table --quantity m0 --beta 1 --k-min 0 --k-max 2 --samples 3 --out " + path.string()).code, 0);
    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,M0,MT,Gamma,Gamma_over_k2,err");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 2), "0,");
    EXPECT_NE(line.find("0.0954649791364044"), std::string::npos);
    int rows = 1;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Cli, EnergyReport) {
    const auto field = scratch("field.json");
    const auto report = scratch("report.json");
    {
        std::ofstream f(field);
        f << write_grid_field(gaussian_test_field(1.0, 1.0, {8, 8, 8}, {10, 10, 10}));
    }
    const auto r = run_cli("energy --field " + field.string() + " --beta 1 --out " + report.string());
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(slurp(report));
    for (const char* key : {"f2_total", "magnetic_electric_part", "gamma_part", "remainder_bound", "l2_F_squared"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_DOUBLE_EQ(j["f2_total"].get<double>(),
                     j["magnetic_electric_part"].get<double>() + j["gamma_part"].get<double>());
}

TEST(Cli, InProcessOutcome) {
    std::ostringstream out, err;
    const auto o = execute_command({"uehling", "--k", "5"}, out, err);
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_NE(o.summary.find("U(5)"), std::string::npos);
    const auto bad = execute_command({"scheme", "--m0", "1"}, out, err);
    EXPECT_EQ(bad.exit_code, 2);
    EXPECT_FALSE(err.str().empty());
}

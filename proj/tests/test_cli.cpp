#include "madlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "madlab/report_io.hpp"

namespace madlab {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::path(::testing::TempDir()) / (std::string("madlab_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv(kSeedEnvVar);
    }
    void TearDown() override { unsetenv(kSeedEnvVar); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name)) << content;
        return path(name);
    }

    std::string small_config() const {
        return write("exp.json", R"({"name": "mad", "max_t": 200, "policy": {"kind": "thompson_bernoulli", "mc_draws": 200}})");
    }

    fs::path dir_;
};

TEST_F(CliTest, SimulateWritesOneRowPerReplication) {
    const auto r = run({"simulate", "--config", small_config(), "--dgp", "bernoulli_four_arm", "--reps", "2",
                        "--out", path("out")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* f : {"metrics.csv", "summary.csv", "paired.csv", "trajectories.csv", "config_echo.json"}) {
        EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
    }
    const CsvTable m = read_csv_table(path("out/metrics.csv"));
    EXPECT_EQ(m.rows.size(), 2U);
    EXPECT_EQ(m.rows[0][m.column("config")], "mad");
    EXPECT_TRUE(m.has("center_4"));
}

TEST_F(CliTest, InvalidDeltaIsRejected) {
    const auto cfg = write("bad.json", R"({"delta": {"exponent": 0.3}})");
    const auto r = run({"simulate", "--config", cfg, "--dgp", "gaussian_covariates", "--out", path("out")});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_THAT(r.err, HasSubstr("omega"));
}

TEST_F(CliTest, UsageAndIoErrors) {
    EXPECT_EQ(run({"simulate", "--bogus"}).code, kExitValidation);
    EXPECT_EQ(run({"simulate", "--dgp", "coverage_k6"}).code, kExitValidation);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    EXPECT_EQ(run({"simulate", "--config", path("missing.json")}).code, kExitIo);
    EXPECT_EQ(run({"plot", path("missing.csv"), "--kind", "cs_path"}).code, kExitIo);
    EXPECT_EQ(run({"simulate", "--preset", "nope"}).code, kExitValidation);
}

TEST_F(CliTest, SameSeedSameMetrics) {
    const auto cfg = small_config();
    for (const char* out : {"a", "b", "c"}) {
        const std::string seed = std::string(out) == "c" ? "8" : "7";
        ASSERT_EQ(run({"simulate", "--config", cfg, "--dgp", "bernoulli_four_arm", "--reps", "2", "--seed", seed,
                       "--jobs", "2", "--out", path(out)})
                      .code,
                  kExitOk);
    }
    EXPECT_EQ(slurp(dir_ / "a/metrics.csv"), slurp(dir_ / "b/metrics.csv"));
    EXPECT_NE(slurp(dir_ / "a/metrics.csv"), slurp(dir_ / "c/metrics.csv"));
}

TEST_F(CliTest, ConfigEchoReproducesRun) {
    ASSERT_EQ(run({"simulate", "--config", small_config(), "--dgp", "bernoulli_four_arm", "--reps", "2", "--seed",
                   "11", "--out", path("first")})
                  .code,
              kExitOk);
    ASSERT_EQ(run({"simulate", "--config", path("first/config_echo.json"), "--out", path("second")}).code, kExitOk);
    EXPECT_EQ(slurp(dir_ / "first/metrics.csv"), slurp(dir_ / "second/metrics.csv"));
}

TEST_F(CliTest, SeedFromEnvironment) {
    const auto cfg = small_config();
    setenv(kSeedEnvVar, "21", 1);
    ASSERT_EQ(run({"simulate", "--config", cfg, "--dgp", "bernoulli_four_arm", "--out", path("env")}).code, kExitOk);
    unsetenv(kSeedEnvVar);
    ASSERT_EQ(run({"simulate", "--config", cfg, "--dgp", "bernoulli_four_arm", "--seed", "21", "--out",
                   path("flag")})
                  .code,
              kExitOk);
    EXPECT_EQ(slurp(dir_ / "env/metrics.csv"), slurp(dir_ / "flag/metrics.csv"));
    setenv(kSeedEnvVar, "not-a-number", 1);
    EXPECT_EQ(run({"simulate", "--config", cfg, "--dgp", "bernoulli_four_arm", "--out", path("bad")}).code,
              kExitValidation);
}

TEST_F(CliTest, PresetsResolve) {
    for (const auto& name : preset_names()) {
        EXPECT_NO_THROW(preset_run(name, false).validate()) << name;
        EXPECT_NO_THROW(preset_run(name, true).validate()) << name;
    }
    const auto r = run({"simulate", "--preset", "coverage", "--reps", "1", "--max-t", "100", "--out", path("p")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST_F(CliTest, SynthReplayPlot) {
    ASSERT_EQ(run({"synth", "--rows", "3000", "--arms", "4", "--seed", "3", "--out", path("data.csv"),
                   "--schema-out", path("schema.json")})
                  .code,
              kExitOk);
    const auto r = run({"replay", path("data.csv"), path("schema.json"), "--max-t", "300", "--out", path("rep")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_THAT(r.out, HasSubstr("4 arms"));
    const CsvTable cmp = read_csv_table(path("rep/comparison.csv"));
    EXPECT_EQ(cmp.rows.size(), 6U);  // two configs x three treatment arms
    ASSERT_EQ(run({"plot", path("rep/trajectories.csv"), "--kind", "cs_path", "--out", path("svg")}).code, kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "svg/cs_path_arm3.svg"));

    const auto again = run({"synth", "--rows", "3000", "--arms", "4", "--seed", "3", "--out", path("again.csv")});
    ASSERT_EQ(again.code, kExitOk);
    EXPECT_EQ(slurp(dir_ / "data.csv"), slurp(dir_ / "again.csv"));
}

TEST_F(CliTest, ReplayRejectsBadData) {
    write("bad.csv", "arm,outcome\ncontrol,1\nA,NaN\n");
    write("schema.json", "{}");
    const auto r = run({"replay", path("bad.csv"), path("schema.json"), "--out", path("rep")});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_THAT(r.err, HasSubstr("row 2"));
}

TEST_F(CliTest, PlotMissingColumn) {
    write("t.csv", "config,arm\nmad,1\n");
    const auto r = run({"plot", path("t.csv"), "--kind", "width_grid", "--out", path("svg")});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_THAT(r.err, HasSubstr("width_mean"));
}

}  // namespace
}  // namespace madlab

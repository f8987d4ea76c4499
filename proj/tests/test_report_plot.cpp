#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "madlab/errors.hpp"
#include "madlab/plot.hpp"
#include "madlab/report_io.hpp"
#include "madlab/simharness.hpp"

namespace madlab {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path(::testing::TempDir()) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string trajectory_csv(std::uint64_t units) {
    ExperimentConfig c;
    c.name = "mad";
    c.arms = 6;
    c.max_t = units;
    c.policy.mc_draws = 200;
    c.policy.kind = PolicyKind::thompson_gaussian;
    EngineOptions opts;
    opts.record_trajectory = true;
    TrajectoryBlock block{"coverage_k6", "mad", 0,
                          run_experiment(c, DgpSpec{DgpKind::coverage_k6, 1.0, 0}, 3, 0, opts).trajectory};
    std::ostringstream out;
    write_trajectories_csv(out, std::span<const TrajectoryBlock>(&block, 1));
    return out.str();
}

CsvTable table_of(const std::string& text) {
    std::istringstream in(text);
    return read_csv_table(in);
}

TEST(FormatDouble, RoundTripsAndSpecials) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Reports, MetricsAndSummaryLayout) {
    std::vector<ExperimentConfig> configs(2);
    configs[0].name = "mad";
    configs[1].name = "covar";
    configs[1].outcome_model.kind = OutcomeModelKind::ols;
    for (auto& c : configs) {
        c.max_t = 150;
        c.policy.mc_draws = 200;
        c.policy.kind = PolicyKind::thompson_gaussian;
    }
    SimulationBlock block{DgpSpec{}, configs, replicate(3, configs, DgpSpec{}, 4, 1)};
    const std::span<const SimulationBlock> blocks(&block, 1);

    std::ostringstream metrics;
    write_metrics_csv(metrics, blocks);
    EXPECT_EQ(metrics.str().rfind("# madlab-metrics v1\n", 0), 0U);
    const CsvTable m = table_of(metrics.str());
    EXPECT_EQ(m.rows.size(), 6U);
    m.require({"dgp", "config", "replication", "seed", "center_1", "width_1", "miss_1", "count_0", "share_1"});

    std::ostringstream summary;
    write_summary_csv(summary, blocks);
    const CsvTable s = table_of(summary.str());
    EXPECT_EQ(s.rows.size(), 4U);
    s.require({"config", "arm", "coverage_error", "type2", "width_mean", "sample_share_mean"});
    EXPECT_EQ(s.number(0, s.column("reps")), 3.0);

    std::ostringstream paired;
    write_paired_csv(paired, blocks);
    const CsvTable p = table_of(paired.str());
    EXPECT_EQ(p.rows.size(), 3U);
    const std::size_t ratio = p.column("width_ratio");
    for (std::size_t r = 0; r < 3; ++r) {
        EXPECT_DOUBLE_EQ(p.number(r, ratio), block.reports[2 * r + 1].final_width[0] /
                                                 block.reports[2 * r].final_width[0]);
    }
}

TEST(Reports, ComparisonRows) {
    const auto data = make_dataset({"control", "a"}, {}, {{0, 1.0, {}}, {1, 3.0, {}}});
    SimulationReport r;
    r.config_name = "mad";
    r.final_center = {2.1};
    r.final_lower = {1.0};
    r.final_upper = {3.0};
    r.final_width = {2.0};
    std::ostringstream out;
    write_comparison_csv(out, data, std::span<const SimulationReport>(&r, 1));
    const CsvTable t = table_of(out.str());
    ASSERT_EQ(t.rows.size(), 1U);
    EXPECT_EQ(t.rows[0][t.column("label")], "a");
    EXPECT_EQ(t.number(0, t.column("benchmark_ate")), 2.0);
    EXPECT_EQ(t.number(0, t.column("covers_benchmark")), 1.0);
}

TEST(CsvTable, SkipsCommentsAndNamesMissingColumns) {
    const CsvTable t = table_of("# madlab-x v1\na,b\n1,2\n");
    EXPECT_EQ(t.rows.size(), 1U);
    EXPECT_EQ(t.number(0, t.column("b")), 2.0);
    try {
        t.require({"a", "zeta", "omega"});
        FAIL();
    } catch (const InputError& e) {
        EXPECT_THAT(e.what(), HasSubstr("'zeta'"));
        EXPECT_THAT(e.what(), HasSubstr("'omega'"));
    }
    EXPECT_THROW(t.column("c"), InputError);
    EXPECT_THROW(table_of("a,b\n1\n"), ParseError);
    EXPECT_THROW(table_of("a\nx\n").number(0, 0), ParseError);
}

TEST(Plot, KindNames) {
    for (auto k : {PlotKind::cs_path, PlotKind::width_grid, PlotKind::power_bars, PlotKind::allocation}) {
        EXPECT_EQ(plot_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(plot_kind_from_string("pie"), ConfigError);
}

TEST(Plot, CsPathOneFilePerPair) {
    const CsvTable t = table_of(trajectory_csv(100));
    const fs::path dir = fresh_dir("madlab_plot_cs");
    const auto written = render_plots(t, PlotKind::cs_path, dir.string());
    ASSERT_EQ(written.size(), 5U);
    for (int p = 1; p <= 5; ++p) {
        const fs::path f = dir / ("cs_path_arm" + std::to_string(p) + ".svg");
        ASSERT_TRUE(fs::exists(f)) << f;
        std::ifstream in(f);
        std::ostringstream content;
        content << in.rdbuf();
        EXPECT_THAT(content.str(), HasSubstr("<svg"));
        EXPECT_THAT(content.str(), HasSubstr("</svg>"));
    }
    EXPECT_EQ(build_plots(t, PlotKind::cs_path), build_plots(t, PlotKind::cs_path));
}

TEST(Plot, EmptyTrajectoryWritesNothing) {
    const std::string full = trajectory_csv(5);
    const std::string header_only = full.substr(0, full.find('\n', full.find('\n') + 1) + 1);
    const fs::path dir = fresh_dir("madlab_plot_empty");
    EXPECT_THROW(render_plots(table_of(header_only), PlotKind::cs_path, dir.string()), InputError);
    EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Plot, MissingColumnsAreNamed) {
    const CsvTable t = table_of("config,arm\nmad,1\n");
    try {
        build_plots(t, PlotKind::width_grid);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_THAT(e.what(), HasSubstr("width_mean"));
        EXPECT_THAT(e.what(), HasSubstr("gamma"));
    }
    EXPECT_THROW(build_plots(t, PlotKind::cs_path), InputError);
    EXPECT_THROW(build_plots(t, PlotKind::power_bars), InputError);
    EXPECT_THROW(build_plots(t, PlotKind::allocation), InputError);
}

TEST(Plot, SummaryKinds) {
    std::vector<ExperimentConfig> configs(1);
    configs[0].max_t = 100;
    configs[0].policy.mc_draws = 200;
    std::vector<SimulationBlock> blocks;
    for (double gamma : {0.1, 1.0}) {
        const DgpSpec dgp{DgpKind::gaussian_covariates, gamma, 2};
        blocks.push_back({dgp, configs, replicate(2, configs, dgp, 1, 1)});
    }
    std::ostringstream out;
    write_summary_csv(out, blocks);
    const CsvTable t = table_of(out.str());
    for (auto k : {PlotKind::width_grid, PlotKind::power_bars, PlotKind::allocation}) {
        const auto files = build_plots(t, k);
        ASSERT_EQ(files.size(), 1U);
        EXPECT_EQ(files[0].first, to_string(k) + ".svg");
        EXPECT_THAT(files[0].second, HasSubstr("</svg>"));
    }
}

}  // namespace
}  // namespace madlab

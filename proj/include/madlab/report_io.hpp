#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "madlab/config.hpp"
#include "madlab/engine.hpp"
#include "madlab/ingest.hpp"

namespace madlab {

// Every CSV written here starts with one "# madlab-<kind> v1" line.
inline constexpr int kCsvSchemaVersion = 1;

// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

// All replications of all configs against one dgp, in replicate() order.
struct SimulationBlock {
    DgpSpec dgp;
    std::vector<ExperimentConfig> configs;
    std::vector<SimulationReport> reports;
};

struct TrajectoryBlock {
    std::string dgp;  // dgp kind, or "replay"
    std::string config;
    std::uint64_t replication = 0;
    std::vector<TrajectoryRow> rows;
};

// One row per (dgp, config, replication) with per-arm columns.
void write_metrics_csv(std::ostream& out, std::span<const SimulationBlock> blocks);
// One row per (dgp, config, arm).
void write_summary_csv(std::ostream& out, std::span<const SimulationBlock> blocks);
// Per-replication width ratio of every config against the first one.
void write_paired_csv(std::ostream& out, std::span<const SimulationBlock> blocks);
void write_trajectories_csv(std::ostream& out, std::span<const TrajectoryBlock> blocks);

// Final replay estimates next to the dataset's difference in means.
void write_comparison_csv(std::ostream& out, const RctDataset& data,
                          std::span<const SimulationReport> reports);

// Writes `content` to `path`, throwing IoError on failure.
void write_file(const std::string& path, const std::string& content);

// A parsed CSV with comment lines dropped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has(const std::string& column) const;
    // Throws InputError naming the column if absent.
    std::size_t column(const std::string& name) const;
    // Throws InputError listing every absent column.
    void require(const std::vector<std::string>& columns) const;
    double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv_table(std::istream& in);
CsvTable read_csv_table(const std::string& path);

}  // namespace madlab

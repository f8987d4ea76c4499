#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "madlab/config.hpp"
#include "madlab/engine.hpp"

namespace madlab {

struct CsvSchema {
    std::string arm_column = "arm";
    std::string outcome_column = "outcome";
    std::vector<std::string> covariate_columns;
    std::string control_label = "control";
    char delimiter = ',';
};

nlohmann::json to_json(const CsvSchema& schema);
CsvSchema schema_from_json(const nlohmann::json& j);

struct RctRow {
    std::size_t arm = 0;
    double outcome = 0.0;
    std::vector<double> covariates;
};

struct RctDataset {
    std::vector<std::string> arm_labels;  // by index; control first
    std::map<std::string, std::size_t> arm_index_map;
    std::vector<std::string> covariate_names;
    std::vector<RctRow> rows;
    std::vector<std::vector<std::size_t>> rows_by_arm;
    std::vector<double> arm_means;
    // Difference in means of each treatment arm against control, [arm - 1].
    std::vector<double> benchmark_ate;

    std::size_t arms() const { return arm_labels.size(); }
    std::size_t count(std::size_t arm) const { return rows_by_arm.at(arm).size(); }
};

// Splits one delimited line. Double-quoted fields may contain the delimiter
// and "" escapes.
std::vector<std::string> split_csv_line(const std::string& line, char delimiter);

/// Control maps to 0; other labels are indexed in order of first appearance.
/// Throws IoError if unreadable, InputError on a missing column or empty arm,
/// ParseError (with the 1-based data row) on a bad cell.
RctDataset load_csv(const std::string& path, const CsvSchema& schema);
RctDataset parse_csv(std::istream& in, const CsvSchema& schema);

// Builds a dataset from rows already in memory.
RctDataset make_dataset(std::vector<std::string> arm_labels, std::vector<std::string> covariate_names,
                        std::vector<RctRow> rows);

// Serves a uniformly drawn row of the engine's chosen arm.
class ReplaySource final : public UnitSource {
public:
    explicit ReplaySource(const RctDataset& data) : data_(data) {}

    std::size_t arms() const override { return data_.arms(); }
    std::size_t covariate_dim() const override { return data_.covariate_names.size(); }
    void next_unit(Rng& /*rng*/) override {}
    Revealed reveal(std::size_t arm, Rng& rng) override;
    void unit_effects(std::vector<double>& out) const override { out = data_.benchmark_ate; }

private:
    const RctDataset& data_;
};

RunResult replay(const RctDataset& data, const ExperimentConfig& config, std::uint64_t master_seed,
                 std::uint64_t replication = 0, const EngineOptions& options = {});

struct SynthSpec {
    std::uint64_t seed = 1;
    std::size_t arms = 14;
    std::size_t rows = 32000;
    // Expected rows in control relative to one treatment arm.
    double control_weight = 5.0;
    std::size_t covariates = 4;
    double base = 50.0;
    double noise_sd = 15.0;
    // Per treatment arm, [arm - 1]; empty = evenly spaced from -6 to 6.
    std::vector<double> effects;
    std::vector<double> covariate_coefs = {8.0, -5.0, 3.0, 0.0};
};

// Writes a synthetic mega-study CSV (arm, outcome, x1..xd) with outcomes
// clamped to [1, 100]. The same spec always yields the same bytes.
void synth_megastudy(const SynthSpec& spec, std::ostream& out);
void synth_megastudy(const SynthSpec& spec, const std::string& path);
CsvSchema synth_schema(const SynthSpec& spec);

}  // namespace madlab

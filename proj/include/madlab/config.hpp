#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "madlab/design.hpp"
#include "madlab/dgp.hpp"
#include "madlab/inference.hpp"
#include "madlab/madmod.hpp"
#include "madlab/outcome_models.hpp"
#include "madlab/policies.hpp"

namespace madlab {

enum class StoppingKind { none, all_significant, width_below };

struct StoppingSpec {
    StoppingKind kind = StoppingKind::none;
    // Threshold on every pair's CS width (upper - lower) for width_below.
    double width = 0.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t arms = 2;
    DeltaSequence delta = DeltaSequence::polynomial(0.2);
    PolicySpec policy;
    OutcomeModelSpec outcome_model;
    std::optional<ImportanceWeightSpec> madmod;
    double alpha = 0.05;
    double t_star = 10000.0;
    std::uint64_t max_t = 10000;
    // 1 = unit mode.
    std::uint64_t batch_size = 1;
    StoppingSpec stopping;
    std::uint64_t seed = 1;
    RadiusForm radius_form = RadiusForm::log_inside;

    // Throws ConfigError. `covariate_dim` is needed for the ols constraint.
    void validate(std::size_t covariate_dim) const;
};

// Everything a `simulate` run needs; the config echo is this structure.
struct RunSpec {
    std::vector<ExperimentConfig> experiments;
    std::vector<DgpSpec> dgps;
    std::uint64_t reps = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DgpSpec& dgp);
DgpSpec dgp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunSpec& run);
// Accepts either a RunSpec object or a bare ExperimentConfig object.
RunSpec run_spec_from_json(const nlohmann::json& j);

// Throws IoError if unreadable, ConfigError on malformed JSON.
nlohmann::json read_json_file(const std::string& path);

}  // namespace madlab

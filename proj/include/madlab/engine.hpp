#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "madlab/config.hpp"
#include "madlab/inference.hpp"
#include "madlab/rng.hpp"

namespace madlab {

struct Revealed {
    std::vector<double> covariates;
    double outcome = 0.0;
};

/// Where units come from. The engine calls next_unit() before assigning a
/// unit and reveal() after; sources that fix potential outcomes up front
/// (the simulators) do all of their sampling in next_unit().
class UnitSource {
public:
    virtual ~UnitSource() = default;

    virtual std::size_t arms() const = 0;
    virtual std::size_t covariate_dim() const = 0;
    virtual void next_unit(Rng& rng) = 0;
    virtual Revealed reveal(std::size_t arm, Rng& rng) = 0;
    // Effect of arm k against control for the current unit, written to
    // out[k - 1]. These define the coverage target.
    virtual void unit_effects(std::vector<double>& out) const = 0;
};

struct TrajectoryRow {
    std::uint64_t t = 0;     // unit index
    std::uint64_t step = 0;  // inference index (== t in unit mode)
    std::size_t arm = 0;
    double y = 0.0;
    std::vector<double> p_mad;
    std::vector<double> weights;
    std::vector<ConfidenceSequence> cs;  // one per treatment arm vs control
    std::vector<double> s_hat;
};

struct SimulationReport {
    std::string config_name;
    std::uint64_t replication = 0;
    std::uint64_t seed = 0;
    std::uint64_t stop_t = 0;  // units processed
    std::uint64_t steps = 0;   // inference updates (batches in batch mode)

    // Indexed by treatment arm - 1.
    std::vector<double> final_center;
    std::vector<double> final_lower;
    std::vector<double> final_upper;
    std::vector<double> final_width;
    std::vector<double> target_ate;  // running true ATE at stop
    std::vector<bool> coverage_miss;
    std::vector<bool> type2;
    std::vector<std::uint64_t> first_significant;  // unit index, 0 = never

    // Indexed by arm, control included.
    std::vector<std::uint64_t> sample_count;
    std::vector<double> sample_share;
};

struct RunResult {
    std::vector<TrajectoryRow> trajectory;
    SimulationReport report;
};

struct FitEvent {
    std::size_t arm = 0;
    std::uint64_t fitted_on = 0;
    // Largest unit index included in the fit (0 if none).
    std::uint64_t fitted_through = 0;
};

struct EngineOptions {
    bool record_trajectory = false;
    std::uint64_t trajectory_stride = 1;
    // Route batch_size == 1 through the batched accumulator.
    bool force_batched = false;
    std::function<void(const FitEvent&)> on_fit;
    // Called before unit t is estimated with, per arm, the largest unit index
    // the model in use was fit on.
    std::function<void(std::uint64_t t, const std::vector<std::uint64_t>& fitted_through)> on_estimate;
};

// Coverage is monitored at every step up to 100, then every 10th step, and
// at the final step.
bool on_monitoring_grid(std::uint64_t step);

/// Runs one experiment. Streams are derived from (master_seed, replication).
/// Throws ConfigError if the config does not match the source.
RunResult run_engine(const ExperimentConfig& config, UnitSource& source, std::uint64_t master_seed,
                     std::uint64_t replication, const EngineOptions& options = {});

}  // namespace madlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "madlab/config.hpp"
#include "madlab/dgp.hpp"
#include "madlab/engine.hpp"

namespace madlab {

// Draws each unit's covariates and potential outcomes before assignment;
// reveal() just reads off the assigned arm's outcome.
class SimulationSource final : public UnitSource {
public:
    explicit SimulationSource(DgpSpec spec);

    std::size_t arms() const override { return arms_; }
    std::size_t covariate_dim() const override { return dim_; }
    void next_unit(Rng& rng) override;
    Revealed reveal(std::size_t arm, Rng& rng) override;
    void unit_effects(std::vector<double>& out) const override;

    const UnitDraw& current() const { return current_; }

private:
    DgpSpec spec_;
    std::size_t arms_;
    std::size_t dim_;
    UnitDraw current_;
};

RunResult run_experiment(const ExperimentConfig& config, const DgpSpec& dgp, std::uint64_t master_seed,
                         std::uint64_t replication, const EngineOptions& options = {});

/// Runs n_reps replications of every config against `dgp`. Replication r of
/// every config shares the same unit stream, so configs are paired.
/// Result order is replication-major: reports[r * configs.size() + c].
/// Independent of `jobs`.
std::vector<SimulationReport> replicate(std::uint64_t n_reps, std::span<const ExperimentConfig> configs,
                                        const DgpSpec& dgp, std::uint64_t master_seed,
                                        unsigned jobs = 1);

// Proportion with a normal-approximation 95% interval.
struct BinomialSummary {
    double rate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

BinomialSummary binomial_summary(std::uint64_t successes, std::uint64_t n);

struct MeanSummary {
    double mean = 0.0;
    double se = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

MeanSummary mean_summary(std::span<const double> values);

// Aggregated metrics of one (config, arm). Treatment metrics are NaN for
// the control arm.
struct ArmSummary {
    std::string config;
    std::size_t arm = 0;
    std::uint64_t reps = 0;
    BinomialSummary coverage_error;
    BinomialSummary type2;
    MeanSummary width;
    MeanSummary sample_count;
    MeanSummary sample_share;
    MeanSummary stop_t;
};

std::vector<ArmSummary> aggregate(std::span<const SimulationReport> reports,
                                  std::span<const ExperimentConfig> configs);

// Per replication and treatment arm: width(candidate) / width(baseline).
// Indexing is [replication][arm - 1].
std::vector<std::vector<double>> paired_width_ratios(std::span<const SimulationReport> reports,
                                                     std::size_t n_configs, std::size_t baseline,
                                                     std::size_t candidate);

}  // namespace madlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "madlab/rng.hpp"

namespace madlab {

// Per-arm running statistics of the outcomes observed so far. The engine only
// records an outcome after it has been revealed, so a policy reading these
// never sees the current unit.
struct ArmSufficientStats {
    std::uint64_t pulls = 0;
    double sum_outcomes = 0.0;
    double sum_sq_outcomes = 0.0;
    // Outcomes >= 0.5 count as successes; meaningful for 0/1 outcomes only.
    std::uint64_t successes = 0;

    void record(double y);
    double mean() const { return pulls == 0 ? 0.0 : sum_outcomes / static_cast<double>(pulls); }
};

enum class PolicyKind { thompson_bernoulli, thompson_gaussian, ucb, uniform };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct PolicySpec {
    PolicyKind kind = PolicyKind::thompson_gaussian;
    std::uint32_t mc_draws = 1000;
    double ucb_constant = 1.0;
    // Beta(a, b) prior for Bernoulli Thompson sampling.
    double beta_prior_a = 1.0;
    double beta_prior_b = 1.0;
    // Normal prior and known noise variance for Gaussian Thompson sampling.
    double normal_prior_mean = 0.0;
    double normal_prior_var = 1.0;
    double noise_var = 1.0;

    void validate() const;
};

/// Monte-Carlo estimate of P(arm w has the largest posterior draw).
///
/// Draws `mc_draws` joint samples from the per-arm posteriors and counts
/// argmax frequencies; ties are broken uniformly at random. Arms that never
/// win get probability 0, which the uniform mixture later lifts to delta/K.
std::vector<double> thompson_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                                   Rng& rng);

// One-hot on the UCB index argmax. Unpulled arms go first in index order;
// ties resolve to the lowest index.
std::vector<double> ucb_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                              std::uint64_t t);

std::vector<double> uniform_probs(std::size_t arms);

// Dispatch on spec.kind. `t` is the index of the unit about to be assigned.
std::vector<double> policy_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                                 std::uint64_t t, Rng& rng);

}  // namespace madlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "madlab/inference.hpp"

namespace madlab {

enum class DecayKind { polynomial, constant, unity };

// Clock driving the decay of a significant arm's weight.
enum class DecayClock { since_latch, absolute };

std::string to_string(DecayKind kind);
DecayKind decay_kind_from_string(const std::string& name);
std::string to_string(DecayClock clock);
DecayClock decay_clock_from_string(const std::string& name);

struct ImportanceWeightSpec {
    DecayKind kind = DecayKind::polynomial;
    // polynomial: w(s) = s^(-exponent)
    double exponent = 0.125;
    // constant: w = level once significant
    double level = 0.3;
    DecayClock clock = DecayClock::since_latch;

    void validate() const;
};

struct ArmPowerState {
    std::size_t arm = 0;
    // Unit index at which the arm's CS first excluded 0. Never reset.
    std::optional<std::uint64_t> significant_since;
};

std::vector<ArmPowerState> initial_power_states(std::size_t arms);

/// Importance weight of one arm at unit t. 1 for the control arm and for
/// arms that have not reached significance; otherwise the decay evaluated
/// at t - significant_since + 1 (or at t on the absolute clock).
double importance_weight(const ArmPowerState& state, std::uint64_t t, const ImportanceWeightSpec& spec);

std::vector<double> importance_weights(std::span<const ArmPowerState> states, std::uint64_t t,
                                       const ImportanceWeightSpec& spec);

/// Moves probability mass away from down-weighted arms:
///   p*_k = w_k p_k,  L = sum p_k (1 - w_k),  r_k = w_k / sum w,
///   out_k = p*_k + r_k L.
/// Throws InputError if `probs` is not a distribution, a weight is outside
/// [0, 1], or every weight is 0.
std::vector<double> reweight(std::span<const double> probs, std::span<const double> weights);

/// Latches significant_since = t for every treatment arm whose CS excludes 0.
/// cs_per_arm[k - 1] is the CS of arm k against control (arm 0), so
/// states.size() == cs_per_arm.size() + 1.
void update_power_state(std::span<ArmPowerState> states, std::span<const ConfidenceSequence> cs_per_arm,
                        std::uint64_t t);

}  // namespace madlab

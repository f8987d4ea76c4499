#include "madlab/madmod.hpp"

#include <algorithm>
#include <cmath>

#include "madlab/design.hpp"
#include "madlab/errors.hpp"

namespace madlab {

std::string to_string(DecayKind kind) {
    switch (kind) {
        case DecayKind::polynomial: return "polynomial";
        case DecayKind::constant: return "constant";
        case DecayKind::unity: return "unity";
    }
    return "unknown";
}

DecayKind decay_kind_from_string(const std::string& name) {
    if (name == "polynomial") return DecayKind::polynomial;
    if (name == "constant") return DecayKind::constant;
    if (name == "unity") return DecayKind::unity;
    throw ConfigError("unknown importance weight kind '" + name + "'");
}

std::string to_string(DecayClock clock) {
    return clock == DecayClock::since_latch ? "since_latch" : "absolute";
}

DecayClock decay_clock_from_string(const std::string& name) {
    if (name == "since_latch") return DecayClock::since_latch;
    if (name == "absolute") return DecayClock::absolute;
    throw ConfigError("unknown decay clock '" + name + "'");
}

void ImportanceWeightSpec::validate() const {
    if (kind == DecayKind::polynomial && !(exponent > 0.0 && std::isfinite(exponent))) {
        throw ConfigError("madmod.exponent must be a positive number");
    }
    if (kind == DecayKind::constant && !(level >= 0.0 && level <= 1.0)) {
        throw ConfigError("madmod.level must lie in [0, 1]");
    }
}

std::vector<ArmPowerState> initial_power_states(std::size_t arms) {
    std::vector<ArmPowerState> states(arms);
    for (std::size_t k = 0; k < arms; ++k) {
        states[k].arm = k;
    }
    return states;
}

double importance_weight(const ArmPowerState& state, std::uint64_t t, const ImportanceWeightSpec& spec) {
    if (t == 0) {
        throw InputError("importance weights are defined for t >= 1");
    }
    if (state.arm == 0 || !state.significant_since) {
        return 1.0;
    }
    switch (spec.kind) {
        case DecayKind::unity:
            return 1.0;
        case DecayKind::constant:
            return spec.level;
        case DecayKind::polynomial: {
            const std::uint64_t since = *state.significant_since;
            std::uint64_t clock = t;
            if (spec.clock == DecayClock::since_latch) {
                clock = t >= since ? t - since + 1 : 1;
            }
            return std::pow(static_cast<double>(clock), -spec.exponent);
        }
    }
    return 1.0;
}

std::vector<double> importance_weights(std::span<const ArmPowerState> states, std::uint64_t t,
                                       const ImportanceWeightSpec& spec) {
    std::vector<double> weights(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        weights[k] = importance_weight(states[k], t, spec);
    }
    return weights;
}

std::vector<double> reweight(std::span<const double> probs, std::span<const double> weights) {
    check_probability_vector(probs);
    if (weights.size() != probs.size()) {
        throw InputError("reweight needs one weight per arm");
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw InputError("importance weights must lie in [0, 1]");
        }
        weight_sum += w;
    }
    if (weight_sum <= 0.0) {
        throw InputError("at least one importance weight must be positive");
    }

    double lost = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        lost += probs[k] * (1.0 - weights[k]);
    }
    std::vector<double> out(probs.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double scaled = weights[k] * probs[k];
        const double share = weights[k] / weight_sum;
        out[k] = std::min(1.0, scaled + share * lost);
        sum += out[k];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        for (double& p : out) {
            p /= sum;
        }
    }
    return out;
}

void update_power_state(std::span<ArmPowerState> states, std::span<const ConfidenceSequence> cs_per_arm,
                        std::uint64_t t) {
    if (states.size() != cs_per_arm.size() + 1) {
        throw InputError("update_power_state needs one CS per treatment arm");
    }
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (!states[k].significant_since && is_significant(cs_per_arm[k - 1])) {
            states[k].significant_since = t;
        }
    }
}

}  // namespace madlab

#include "madlab/policies.hpp"

#include <cmath>
#include <limits>

#include "madlab/errors.hpp"
#include "madlab/sampling.hpp"

namespace madlab {

void ArmSufficientStats::record(double y) {
    ++pulls;
    sum_outcomes += y;
    sum_sq_outcomes += y * y;
    if (y >= 0.5) {
        ++successes;
    }
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::thompson_bernoulli: return "thompson_bernoulli";
        case PolicyKind::thompson_gaussian: return "thompson_gaussian";
        case PolicyKind::ucb: return "ucb";
        case PolicyKind::uniform: return "uniform";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "thompson_bernoulli") return PolicyKind::thompson_bernoulli;
    if (name == "thompson_gaussian") return PolicyKind::thompson_gaussian;
    if (name == "ucb") return PolicyKind::ucb;
    if (name == "uniform") return PolicyKind::uniform;
    throw ConfigError("unknown policy kind '" + name + "'");
}

void PolicySpec::validate() const {
    if (mc_draws < 100) {
        throw ConfigError("policy.mc_draws must be >= 100");
    }
    if (!(ucb_constant >= 0.0) || !std::isfinite(ucb_constant)) {
        throw ConfigError("policy.ucb_constant must be a finite value >= 0");
    }
    if (!(beta_prior_a > 0.0 && beta_prior_b > 0.0)) {
        throw ConfigError("Beta prior parameters must be positive");
    }
    if (!(normal_prior_var > 0.0 && noise_var > 0.0) || !std::isfinite(normal_prior_mean)) {
        throw ConfigError("normal prior variance and noise variance must be positive");
    }
}

namespace {

void check_arms(std::span<const ArmSufficientStats> stats) {
    if (stats.size() < 2) {
        throw InputError("policies need at least two arms");
    }
    for (const auto& s : stats) {
        if (s.successes > s.pulls || !std::isfinite(s.sum_outcomes) ||
            !std::isfinite(s.sum_sq_outcomes)) {
            throw InputError("invalid arm sufficient statistics");
        }
    }
}

// Picks the argmax of `draws`, resolving exact ties uniformly at random.
// The RNG is touched only when a tie actually occurs.
std::size_t random_argmax(const std::vector<double>& draws, Rng& rng) {
    std::size_t best = 0;
    std::uint64_t tied = 1;
    for (std::size_t k = 1; k < draws.size(); ++k) {
        if (draws[k] > draws[best]) {
            best = k;
            tied = 1;
        } else if (draws[k] == draws[best]) {
            ++tied;
            if (rng() % tied == 0) {
                best = k;
            }
        }
    }
    return best;
}

}  // namespace

std::vector<double> thompson_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                                   Rng& rng) {
    check_arms(stats);
    const std::size_t k = stats.size();
    std::vector<std::uint64_t> wins(k, 0);
    std::vector<double> draws(k);

    if (spec.kind == PolicyKind::thompson_bernoulli) {
        // Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
        std::vector<GammaSampler> alpha_dist;
        std::vector<GammaSampler> beta_dist;
        alpha_dist.reserve(k);
        beta_dist.reserve(k);
        for (const auto& s : stats) {
            const auto failures = static_cast<double>(s.pulls - s.successes);
            alpha_dist.emplace_back(spec.beta_prior_a + static_cast<double>(s.successes));
            beta_dist.emplace_back(spec.beta_prior_b + failures);
        }
        StandardNormal normal;
        for (std::uint32_t d = 0; d < spec.mc_draws; ++d) {
            for (std::size_t a = 0; a < k; ++a) {
                const double x = alpha_dist[a](rng, normal);
                const double y = beta_dist[a](rng, normal);
                draws[a] = x / (x + y);
            }
            ++wins[random_argmax(draws, rng)];
        }
    } else {
        std::vector<double> mean(k);
        std::vector<double> sd(k);
        const double prior_precision = 1.0 / spec.normal_prior_var;
        for (std::size_t a = 0; a < k; ++a) {
            const double precision =
                prior_precision + static_cast<double>(stats[a].pulls) / spec.noise_var;
            mean[a] = (spec.normal_prior_mean * prior_precision +
                       stats[a].sum_outcomes / spec.noise_var) /
                      precision;
            sd[a] = std::sqrt(1.0 / precision);
        }
        StandardNormal normal;
        for (std::uint32_t d = 0; d < spec.mc_draws; ++d) {
            for (std::size_t a = 0; a < k; ++a) {
                draws[a] = mean[a] + sd[a] * normal(rng);
            }
            ++wins[random_argmax(draws, rng)];
        }
    }

    std::vector<double> probs(k);
    const auto total = static_cast<double>(spec.mc_draws);
    for (std::size_t a = 0; a < k; ++a) {
        probs[a] = static_cast<double>(wins[a]) / total;
    }
    return probs;
}

std::vector<double> ucb_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                              std::uint64_t t) {
    check_arms(stats);
    if (t == 0) {
        throw InputError("ucb_probs needs t >= 1");
    }
    std::vector<double> probs(stats.size(), 0.0);
    for (std::size_t a = 0; a < stats.size(); ++a) {
        if (stats[a].pulls == 0) {
            probs[a] = 1.0;
            return probs;
        }
    }
    const double log_t = std::log(static_cast<double>(t));
    std::size_t best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < stats.size(); ++a) {
        const double bonus =
            spec.ucb_constant * std::sqrt(2.0 * log_t / static_cast<double>(stats[a].pulls));
        const double index = stats[a].mean() + bonus;
        if (index > best_index) {
            best_index = index;
            best = a;
        }
    }
    probs[best] = 1.0;
    return probs;
}

std::vector<double> uniform_probs(std::size_t arms) {
    if (arms < 2) {
        throw InputError("policies need at least two arms");
    }
    return std::vector<double>(arms, 1.0 / static_cast<double>(arms));
}

std::vector<double> policy_probs(std::span<const ArmSufficientStats> stats, const PolicySpec& spec,
                                 std::uint64_t t, Rng& rng) {
    switch (spec.kind) {
        case PolicyKind::thompson_bernoulli:
        case PolicyKind::thompson_gaussian:
            return thompson_probs(stats, spec, rng);
        case PolicyKind::ucb:
            return ucb_probs(stats, spec, t);
        case PolicyKind::uniform:
            return uniform_probs(stats.size());
    }
    throw InputError("unknown policy kind");
}

}  // namespace madlab

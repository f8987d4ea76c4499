#include "madlab/dgp.hpp"

#include <array>
#include <cmath>

#include "madlab/errors.hpp"
#include "madlab/sampling.hpp"

namespace madlab {

namespace {

constexpr std::array<double, 4> kBernoulliTreated = {0.6, 0.62, 0.8, 0.82};
constexpr double kBernoulliControl = 0.5;
constexpr std::array<double, 6> kCoverageBeta = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

}  // namespace

std::string to_string(DgpKind kind) {
    switch (kind) {
        case DgpKind::gaussian_covariates: return "gaussian_covariates";
        case DgpKind::bernoulli_four_arm: return "bernoulli_four_arm";
        case DgpKind::coverage_k6: return "coverage_k6";
        case DgpKind::coverage_k6_misspecified: return "coverage_k6_misspecified";
    }
    return "unknown";
}

DgpKind dgp_kind_from_string(const std::string& name) {
    if (name == "gaussian_covariates") return DgpKind::gaussian_covariates;
    if (name == "bernoulli_four_arm") return DgpKind::bernoulli_four_arm;
    if (name == "coverage_k6") return DgpKind::coverage_k6;
    if (name == "coverage_k6_misspecified") return DgpKind::coverage_k6_misspecified;
    throw ConfigError("unknown dgp kind '" + name + "'");
}

void DgpSpec::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("dgp.gamma must be a finite value >= 0");
    }
}

std::size_t arm_count(const DgpSpec& spec) {
    switch (spec.kind) {
        case DgpKind::gaussian_covariates: return 2;
        case DgpKind::bernoulli_four_arm: return kBernoulliTreated.size() + 1;
        case DgpKind::coverage_k6:
        case DgpKind::coverage_k6_misspecified: return kCoverageBeta.size();
    }
    return 0;
}

std::size_t covariate_dim(const DgpSpec& spec) {
    switch (spec.kind) {
        case DgpKind::gaussian_covariates: return 3 + spec.n_irrelevant;
        case DgpKind::bernoulli_four_arm: return 0;
        case DgpKind::coverage_k6:
        case DgpKind::coverage_k6_misspecified: return 3;
    }
    return 0;
}

std::vector<double> population_ate(const DgpSpec& spec) {
    switch (spec.kind) {
        case DgpKind::gaussian_covariates:
            return {1.0};
        case DgpKind::bernoulli_four_arm: {
            std::vector<double> ate;
            for (double p : kBernoulliTreated) {
                ate.push_back(p - kBernoulliControl);
            }
            return ate;
        }
        case DgpKind::coverage_k6:
        case DgpKind::coverage_k6_misspecified:
            return {kCoverageBeta.begin() + 1, kCoverageBeta.end()};
    }
    return {};
}

double conditional_mean(const DgpSpec& spec, std::size_t arm, const std::vector<double>& x) {
    switch (spec.kind) {
        case DgpKind::gaussian_covariates:
            return 0.5 + (arm == 1 ? 1.0 : 0.0) + spec.gamma * (2.3 * x[0] + 0.9 * x[1] - 1.7 * x[2]);
        case DgpKind::bernoulli_four_arm:
            return arm == 0 ? kBernoulliControl : kBernoulliTreated[arm - 1];
        case DgpKind::coverage_k6:
            return 0.5 + kCoverageBeta[arm] + 0.3 * x[0] + x[1] - 0.5 * x[2];
        case DgpKind::coverage_k6_misspecified:
            return 0.5 + kCoverageBeta[arm] + 0.3 * x[0] * x[0] + x[1] * x[2] - 0.5 * std::exp(x[2]);
    }
    return 0.0;
}

namespace {

UnitDraw draw_normal_model(const DgpSpec& spec, Rng& rng) {
    StandardNormal normal;
    UnitDraw unit;
    unit.covariates.resize(covariate_dim(spec));
    for (double& x : unit.covariates) {
        x = normal(rng);
    }
    const std::size_t k = arm_count(spec);
    unit.potential_outcomes.resize(k);
    for (std::size_t w = 0; w < k; ++w) {
        unit.potential_outcomes[w] = conditional_mean(spec, w, unit.covariates) + normal(rng);
    }
    return unit;
}

void require_kind(const DgpSpec& spec, std::initializer_list<DgpKind> kinds) {
    for (DgpKind k : kinds) {
        if (spec.kind == k) {
            return;
        }
    }
    throw InputError("dgp kind " + to_string(spec.kind) + " is not handled by this generator");
}

}  // namespace

UnitDraw draw_gaussian_unit(const DgpSpec& spec, Rng& rng) {
    require_kind(spec, {DgpKind::gaussian_covariates});
    return draw_normal_model(spec, rng);
}

UnitDraw draw_coverage_unit(const DgpSpec& spec, Rng& rng) {
    require_kind(spec, {DgpKind::coverage_k6, DgpKind::coverage_k6_misspecified});
    return draw_normal_model(spec, rng);
}

UnitDraw draw_bernoulli_unit(const DgpSpec& spec, Rng& rng) {
    require_kind(spec, {DgpKind::bernoulli_four_arm});
    UnitDraw unit;
    unit.potential_outcomes.resize(arm_count(spec));
    for (std::size_t w = 0; w < unit.potential_outcomes.size(); ++w) {
        unit.potential_outcomes[w] = uniform01(rng) < conditional_mean(spec, w, {}) ? 1.0 : 0.0;
    }
    return unit;
}

UnitDraw draw_unit(const DgpSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case DgpKind::gaussian_covariates: return draw_gaussian_unit(spec, rng);
        case DgpKind::bernoulli_four_arm: return draw_bernoulli_unit(spec, rng);
        case DgpKind::coverage_k6:
        case DgpKind::coverage_k6_misspecified: return draw_coverage_unit(spec, rng);
    }
    throw InputError("unknown dgp kind");
}

}  // namespace madlab

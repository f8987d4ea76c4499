#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "madlab/rng.hpp"

namespace madlab {

// Synthetic environments.
//
//  gaussian_covariates      K = 2. Y(w) ~ N(0.5 + 1{w=1} + gamma(2.3 X1 + 0.9 X2 - 1.7 X3), 1),
//                           plus n_irrelevant standard normal covariates.
//  bernoulli_four_arm       K = 5. Y(0) ~ Bern(0.5), Y(k) ~ Bern(0.6, 0.62, 0.8, 0.82).
//  coverage_k6              K = 6. Y(k) ~ N(0.5 + beta_k + 0.3 X1 + X2 - 0.5 X3, 1),
//                           beta = (0, 0.1, ..., 0.5).
//  coverage_k6_misspecified K = 6. Mean 0.5 + beta_k + 0.3 X1^2 + X2 X3 - 0.5 exp(X3).
enum class DgpKind { gaussian_covariates, bernoulli_four_arm, coverage_k6, coverage_k6_misspecified };

std::string to_string(DgpKind kind);
DgpKind dgp_kind_from_string(const std::string& name);

struct DgpSpec {
    DgpKind kind = DgpKind::gaussian_covariates;
    // Covariate signal strength (gaussian_covariates only).
    double gamma = 1.0;
    // Extra pure-noise covariates (gaussian_covariates only).
    std::size_t n_irrelevant = 2;

    void validate() const;
};

// Covariates and every potential outcome of one unit, drawn before the
// unit is assigned.
struct UnitDraw {
    std::vector<double> covariates;
    std::vector<double> potential_outcomes;
};

std::size_t arm_count(const DgpSpec& spec);
std::size_t covariate_dim(const DgpSpec& spec);
// Population ATE of arms 1..K-1 against control.
std::vector<double> population_ate(const DgpSpec& spec);

// Mean of Y(arm) given covariates; the noise-free part of each draw.
double conditional_mean(const DgpSpec& spec, std::size_t arm, const std::vector<double>& covariates);

UnitDraw draw_gaussian_unit(const DgpSpec& spec, Rng& rng);
UnitDraw draw_bernoulli_unit(const DgpSpec& spec, Rng& rng);
UnitDraw draw_coverage_unit(const DgpSpec& spec, Rng& rng);
UnitDraw draw_unit(const DgpSpec& spec, Rng& rng);

}  // namespace madlab

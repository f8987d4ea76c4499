#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace madlab {

enum class OutcomeModelKind { zero, arm_mean, ols };

std::string to_string(OutcomeModelKind kind);
OutcomeModelKind outcome_model_kind_from_string(const std::string& name);

struct OutcomeModelSpec {
    OutcomeModelKind kind = OutcomeModelKind::zero;
    // Refit after every unit up to refit_warmup, then every refit_every units.
    std::uint32_t refit_every = 25;
    std::uint64_t refit_warmup = 1000;
    // 0 selects d + 2, the smallest value allowed for ols.
    std::uint32_t min_obs_per_arm = 0;
    // nullopt means "auto": 10 x the largest |Y| observed so far (1 if none).
    std::optional<double> cap;

    void validate(std::size_t covariate_dim) const;
    std::size_t effective_min_obs(std::size_t covariate_dim) const;
    bool refit_due(std::uint64_t units_seen) const;
};

/// Fitted mu_w(x) for one arm. Predictions are clamped to +-cap_value.
struct FittedArmModel {
    std::size_t arm = 0;
    OutcomeModelKind kind = OutcomeModelKind::zero;
    // Intercept first, then one slope per covariate.
    std::vector<double> coefficients;
    std::uint64_t fitted_on = 0;
    double cap_value = 1.0;
};

FittedArmModel zero_model(std::size_t arm, std::size_t covariate_dim, double cap_value);

/// Least squares on [1, x] accumulated one row at a time.
///
/// Keeps the triangular factor R and Q^T y of a QR factorization, updated
/// with Givens rotations, so adding a row costs O(d^2) and solving never
/// forms the normal equations.
class IncrementalLeastSquares {
public:
    explicit IncrementalLeastSquares(std::size_t covariate_dim);

    void add(std::span<const double> x, double y);

    std::size_t covariate_dim() const { return dim_ - 1; }
    std::uint64_t count() const { return count_; }
    double mean_outcome() const { return count_ == 0 ? 0.0 : sum_y_ / static_cast<double>(count_); }

    // Back-substitution on R. Returns nullopt when R is numerically rank
    // deficient (|R_jj| <= 1e-10 * max |R_ii|) or there are fewer rows than
    // parameters.
    std::optional<std::vector<double>> solve() const;

private:
    std::size_t dim_;
    std::vector<double> r_;  // dim_ x dim_, row-major upper triangle
    std::vector<double> qty_;
    std::vector<double> row_;
    std::uint64_t count_ = 0;
    double sum_y_ = 0.0;
};

// Observations of one arm, in unit order.
struct ArmHistory {
    std::size_t covariate_dim = 0;
    std::vector<std::uint64_t> unit_index;
    std::vector<double> covariates;  // row-major, covariate_dim per row
    std::vector<double> outcomes;

    std::size_t size() const { return outcomes.size(); }
    std::span<const double> row(std::size_t i) const {
        return {covariates.data() + i * covariate_dim, covariate_dim};
    }
    void append(std::uint64_t index, std::span<const double> x, double y);
};

double resolve_cap(const OutcomeModelSpec& spec, double max_abs_outcome);

/// Fits mu_w on `history` (all rows must precede the unit being estimated).
///
/// Fewer than min_obs rows give the zero model (warm start). A rank-deficient
/// design falls back to the arm mean with zero slopes. Never throws for
/// degenerate data.
FittedArmModel fit_arm_model(std::size_t arm, const ArmHistory& history, const OutcomeModelSpec& spec,
                             double cap_value);

// Same contract, reading an already accumulated factorization.
FittedArmModel fit_arm_model(std::size_t arm, const IncrementalLeastSquares& accumulated,
                             const OutcomeModelSpec& spec, double cap_value);

// Throws InputError on non-finite x or a dimension mismatch.
double predict(const FittedArmModel& model, std::span<const double> x);

}  // namespace madlab

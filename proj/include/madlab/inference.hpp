#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace madlab {

// Which member of a (treatment, control) pair the unit was assigned to.
// `other` means a third arm: both indicator terms of the estimator vanish.
enum class PairRole { treatment, control, other };

struct IteInputs {
    PairRole assigned = PairRole::other;
    double y = 0.0;
    // Capped fitted values mu_w(X_i), mu_ctrl(X_i) from models fit on
    // units strictly before i.
    double mu_treatment = 0.0;
    double mu_control = 0.0;
    // Logged assignment probabilities of the two arms.
    double p_treatment = 0.5;
    double p_control = 0.5;
};

/// Model-augmented inverse propensity estimate of the unit-level effect:
///
///   mu_w - mu_ctrl + 1{W=w}(y - mu_w)/p_w - 1{W=ctrl}(y - mu_ctrl)/p_ctrl
///
/// Unbiased under the assignment distribution for any predictable model.
/// Throws InvariantError when either probability is not positive.
double ite_estimate(const IteInputs& in);

/// 1{W=w}(y - mu_w)^2/p_w^2 + 1{W=ctrl}(y - mu_ctrl)^2/p_ctrl^2, whose
/// expectation is the conservative variance bound sigma_i^2.
double variance_estimate(const IteInputs& in);

// Tuning parameter that makes the boundary tightest at t_star.
double eta_opt(double alpha, double t_star);

// Placement of the logarithm in the radius. `log_inside` is the form used
// everywhere; `log_outside` exists only to compare against the alternative
// printed form.
enum class RadiusForm { log_inside, log_outside };

std::string to_string(RadiusForm form);
RadiusForm radius_form_from_string(const std::string& name);

/// Half-width of the asymptotic confidence sequence,
///
///   sqrt( 2 (S eta^2 + 1) / (t^2 eta^2) * log( sqrt(S eta^2 + 1) / alpha ) ).
///
/// `t` is the number of accumulated terms (units, or batches in batch mode).
double cs_radius(double s_hat, double t, double eta, double alpha,
                 RadiusForm form = RadiusForm::log_inside);

struct ConfidenceSequence {
    double center = 0.0;
    double radius = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
};

ConfidenceSequence make_cs(double center, double radius);

bool is_significant(const ConfidenceSequence& cs);

/// Running sums for one (treatment, control) pair; O(1) memory.
struct ArmPairInferenceState {
    std::uint64_t t = 0;
    double sum_tau_hat = 0.0;
    double s_hat = 0.0;
    double alpha = 0.05;
    double eta = 0.0;
    double t_star = 10000.0;
    RadiusForm form = RadiusForm::log_inside;

    ArmPairInferenceState() = default;
    ArmPairInferenceState(double alpha, double t_star, RadiusForm form = RadiusForm::log_inside);

    double ate_estimate() const;
    // Current CS; the radius is infinite before the first update.
    ConfidenceSequence current() const;
};

/// Adds unit `index`; it must be exactly state.t + 1 (SequencingError
/// otherwise). Units assigned to neither pair member still count.
ConfidenceSequence update_pair(ArmPairInferenceState& state, std::uint64_t index, const IteInputs& in);

/// Adds batch `batch_index` (== state.t + 1). Every record must carry the
/// same pair probabilities (InputError otherwise). The batch contributes the
/// mean of its unit estimates and (1/B^2) times the sum of their variance
/// estimates; state.t counts batches.
ConfidenceSequence batched_update(ArmPairInferenceState& state, std::uint64_t batch_index,
                                  std::span<const IteInputs> batch);

}  // namespace madlab

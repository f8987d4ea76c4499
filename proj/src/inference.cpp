#include "madlab/inference.hpp"

#include <cmath>
#include <limits>

#include "madlab/errors.hpp"

namespace madlab {

namespace {

void check_probabilities(const IteInputs& in) {
    if (!(in.p_treatment > 0.0) || !(in.p_control > 0.0)) {
        throw InvariantError("assignment probabilities reaching the estimator must be positive");
    }
}

}  // namespace

double ite_estimate(const IteInputs& in) {
    check_probabilities(in);
    double tau = in.mu_treatment - in.mu_control;
    if (in.assigned == PairRole::treatment) {
        tau += (in.y - in.mu_treatment) / in.p_treatment;
    } else if (in.assigned == PairRole::control) {
        tau -= (in.y - in.mu_control) / in.p_control;
    }
    return tau;
}

double variance_estimate(const IteInputs& in) {
    check_probabilities(in);
    if (in.assigned == PairRole::treatment) {
        const double r = (in.y - in.mu_treatment) / in.p_treatment;
        return r * r;
    }
    if (in.assigned == PairRole::control) {
        const double r = (in.y - in.mu_control) / in.p_control;
        return r * r;
    }
    return 0.0;
}

double eta_opt(double alpha, double t_star) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("alpha must lie in (0, 1)");
    }
    if (!(t_star >= 1.0)) {
        throw InputError("t_star must be >= 1");
    }
    const double a = -2.0 * std::log(alpha);
    return std::sqrt((a + std::log(a + 1.0)) / t_star);
}

std::string to_string(RadiusForm form) {
    return form == RadiusForm::log_inside ? "log_inside" : "log_outside";
}

RadiusForm radius_form_from_string(const std::string& name) {
    if (name == "log_inside") return RadiusForm::log_inside;
    if (name == "log_outside") return RadiusForm::log_outside;
    throw ConfigError("unknown radius form '" + name + "'");
}

double cs_radius(double s_hat, double t, double eta, double alpha, RadiusForm form) {
    if (!(t >= 1.0)) {
        throw InputError("cs_radius needs t >= 1");
    }
    if (!(eta > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(s_hat >= 0.0)) {
        throw InputError("cs_radius needs eta > 0, alpha in (0, 1) and s_hat >= 0");
    }
    const double se = s_hat * eta * eta + 1.0;
    const double scale = 2.0 * se / (t * t * eta * eta);
    const double log_term = std::log(std::sqrt(se) / alpha);
    if (form == RadiusForm::log_outside) {
        return std::sqrt(scale) * log_term;
    }
    return std::sqrt(scale * log_term);
}

ConfidenceSequence make_cs(double center, double radius) {
    return ConfidenceSequence{center, radius, center - radius, center + radius};
}

bool is_significant(const ConfidenceSequence& cs) { return cs.lower > 0.0 || cs.upper < 0.0; }

ArmPairInferenceState::ArmPairInferenceState(double alpha_, double t_star_, RadiusForm form_)
    : alpha(alpha_), eta(eta_opt(alpha_, t_star_)), t_star(t_star_), form(form_) {}

double ArmPairInferenceState::ate_estimate() const {
    return t == 0 ? 0.0 : sum_tau_hat / static_cast<double>(t);
}

ConfidenceSequence ArmPairInferenceState::current() const {
    if (t == 0) {
        return make_cs(0.0, std::numeric_limits<double>::infinity());
    }
    return make_cs(ate_estimate(), cs_radius(s_hat, static_cast<double>(t), eta, alpha, form));
}

ConfidenceSequence update_pair(ArmPairInferenceState& state, std::uint64_t index, const IteInputs& in) {
    if (index != state.t + 1) {
        throw SequencingError("unit " + std::to_string(index) + " arrived after unit " +
                              std::to_string(state.t));
    }
    const double tau = ite_estimate(in);
    const double var = variance_estimate(in);
    state.t = index;
    state.sum_tau_hat += tau;
    state.s_hat += var;
    return state.current();
}

ConfidenceSequence batched_update(ArmPairInferenceState& state, std::uint64_t batch_index,
                                  std::span<const IteInputs> batch) {
    if (batch.empty()) {
        throw InputError("batch is empty");
    }
    if (batch_index != state.t + 1) {
        throw SequencingError("batch " + std::to_string(batch_index) + " arrived after batch " +
                              std::to_string(state.t));
    }
    const double p_t = batch.front().p_treatment;
    const double p_c = batch.front().p_control;
    double tau_sum = 0.0;
    double var_sum = 0.0;
    for (const auto& in : batch) {
        if (in.p_treatment != p_t || in.p_control != p_c) {
            throw InputError("records in one batch must share the same assignment probabilities");
        }
        tau_sum += ite_estimate(in);
        var_sum += variance_estimate(in);
    }
    const auto b = static_cast<double>(batch.size());
    state.t = batch_index;
    state.sum_tau_hat += tau_sum / b;
    state.s_hat += var_sum / (b * b);
    return state.current();
}

}  // namespace madlab

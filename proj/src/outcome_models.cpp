#include "madlab/outcome_models.hpp"

#include <algorithm>
#include <cmath>

#include "madlab/errors.hpp"

namespace madlab {

std::string to_string(OutcomeModelKind kind) {
    switch (kind) {
        case OutcomeModelKind::zero: return "zero";
        case OutcomeModelKind::arm_mean: return "arm_mean";
        case OutcomeModelKind::ols: return "ols";
    }
    return "unknown";
}

OutcomeModelKind outcome_model_kind_from_string(const std::string& name) {
    if (name == "zero") return OutcomeModelKind::zero;
    if (name == "arm_mean") return OutcomeModelKind::arm_mean;
    if (name == "ols") return OutcomeModelKind::ols;
    throw ConfigError("unknown outcome model kind '" + name + "'");
}

std::size_t OutcomeModelSpec::effective_min_obs(std::size_t covariate_dim) const {
    if (min_obs_per_arm == 0) {
        return kind == OutcomeModelKind::ols ? covariate_dim + 2 : 1;
    }
    return min_obs_per_arm;
}

void OutcomeModelSpec::validate(std::size_t covariate_dim) const {
    if (refit_every < 1) {
        throw ConfigError("outcome_model.refit_every must be >= 1");
    }
    if (kind == OutcomeModelKind::ols && min_obs_per_arm != 0 &&
        min_obs_per_arm < covariate_dim + 2) {
        throw ConfigError("outcome_model.min_obs_per_arm must be >= d + 2 = " +
                          std::to_string(covariate_dim + 2) + " for ols");
    }
    if (cap && (!std::isfinite(*cap) || *cap <= 0.0)) {
        throw ConfigError("outcome_model.cap must be a positive number or \"auto\"");
    }
}

bool OutcomeModelSpec::refit_due(std::uint64_t units_seen) const {
    if (units_seen <= refit_warmup) {
        return true;
    }
    return units_seen % refit_every == 0;
}

FittedArmModel zero_model(std::size_t arm, std::size_t covariate_dim, double cap_value) {
    FittedArmModel model;
    model.arm = arm;
    model.kind = OutcomeModelKind::zero;
    model.coefficients.assign(covariate_dim + 1, 0.0);
    model.cap_value = cap_value;
    return model;
}

IncrementalLeastSquares::IncrementalLeastSquares(std::size_t covariate_dim)
    : dim_(covariate_dim + 1), r_(dim_ * dim_, 0.0), qty_(dim_, 0.0), row_(dim_, 0.0) {}

void IncrementalLeastSquares::add(std::span<const double> x, double y) {
    if (x.size() + 1 != dim_) {
        throw InputError("covariate vector has the wrong dimension");
    }
    row_[0] = 1.0;
    std::copy(x.begin(), x.end(), row_.begin() + 1);
    double rhs = y;
    for (std::size_t j = 0; j < dim_; ++j) {
        const double v = row_[j];
        if (v == 0.0) {
            continue;
        }
        double* rj = r_.data() + j * dim_;
        const double h = std::hypot(rj[j], v);
        const double c = rj[j] / h;
        const double s = v / h;
        for (std::size_t k = j; k < dim_; ++k) {
            const double a = rj[k];
            const double b = row_[k];
            rj[k] = c * a + s * b;
            row_[k] = c * b - s * a;
        }
        const double a = qty_[j];
        qty_[j] = c * a + s * rhs;
        rhs = c * rhs - s * a;
    }
    ++count_;
    sum_y_ += y;
}

std::optional<std::vector<double>> IncrementalLeastSquares::solve() const {
    if (count_ < dim_) {
        return std::nullopt;
    }
    double max_diag = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        max_diag = std::max(max_diag, std::abs(r_[j * dim_ + j]));
    }
    if (max_diag == 0.0) {
        return std::nullopt;
    }
    for (std::size_t j = 0; j < dim_; ++j) {
        if (std::abs(r_[j * dim_ + j]) <= 1e-10 * max_diag) {
            return std::nullopt;
        }
    }
    std::vector<double> beta(dim_, 0.0);
    for (std::size_t jj = dim_; jj-- > 0;) {
        double acc = qty_[jj];
        for (std::size_t k = jj + 1; k < dim_; ++k) {
            acc -= r_[jj * dim_ + k] * beta[k];
        }
        beta[jj] = acc / r_[jj * dim_ + jj];
    }
    for (double b : beta) {
        if (!std::isfinite(b)) {
            return std::nullopt;
        }
    }
    return beta;
}

void ArmHistory::append(std::uint64_t index, std::span<const double> x, double y) {
    if (x.size() != covariate_dim) {
        throw InputError("covariate vector has the wrong dimension");
    }
    if (!unit_index.empty() && index <= unit_index.back()) {
        throw SequencingError("arm history must be appended in unit order");
    }
    unit_index.push_back(index);
    covariates.insert(covariates.end(), x.begin(), x.end());
    outcomes.push_back(y);
}

double resolve_cap(const OutcomeModelSpec& spec, double max_abs_outcome) {
    if (spec.cap) {
        return *spec.cap;
    }
    return max_abs_outcome > 0.0 ? 10.0 * max_abs_outcome : 1.0;
}

FittedArmModel fit_arm_model(std::size_t arm, const IncrementalLeastSquares& accumulated,
                             const OutcomeModelSpec& spec, double cap_value) {
    const std::size_t d = accumulated.covariate_dim();
    FittedArmModel model = zero_model(arm, d, cap_value);
    model.fitted_on = accumulated.count();
    if (spec.kind == OutcomeModelKind::zero || accumulated.count() == 0) {
        return model;
    }
    if (accumulated.count() < spec.effective_min_obs(d)) {
        return model;
    }
    model.kind = OutcomeModelKind::arm_mean;
    model.coefficients[0] = accumulated.mean_outcome();
    if (spec.kind == OutcomeModelKind::arm_mean) {
        return model;
    }
    if (auto beta = accumulated.solve()) {
        model.kind = OutcomeModelKind::ols;
        model.coefficients = std::move(*beta);
    }
    return model;
}

FittedArmModel fit_arm_model(std::size_t arm, const ArmHistory& history, const OutcomeModelSpec& spec,
                             double cap_value) {
    IncrementalLeastSquares acc(history.covariate_dim);
    if (spec.kind != OutcomeModelKind::zero) {
        for (std::size_t i = 0; i < history.size(); ++i) {
            acc.add(history.row(i), history.outcomes[i]);
        }
    }
    FittedArmModel model = fit_arm_model(arm, acc, spec, cap_value);
    model.fitted_on = history.size();
    return model;
}

double predict(const FittedArmModel& model, std::span<const double> x) {
    if (x.size() + 1 != model.coefficients.size()) {
        throw InputError("covariate vector has the wrong dimension for this model");
    }
    double value = model.coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw InputError("covariate " + std::to_string(j) + " is not finite");
        }
        value += model.coefficients[j + 1] * x[j];
    }
    return std::clamp(value, -model.cap_value, model.cap_value);
}

}  // namespace madlab

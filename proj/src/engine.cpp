#include "madlab/engine.hpp"

#include <algorithm>
#include <cmath>

#include "madlab/design.hpp"
#include "madlab/errors.hpp"
#include "madlab/madmod.hpp"
#include "madlab/outcome_models.hpp"
#include "madlab/policies.hpp"

namespace madlab {

bool on_monitoring_grid(std::uint64_t step) { return step <= 100 || step % 10 == 0; }

namespace {

struct PendingUnit {
    std::uint64_t t = 0;
    std::size_t arm = 0;
    std::vector<double> x;
    double y = 0.0;
};

class Engine {
public:
    Engine(const ExperimentConfig& config, UnitSource& source, std::uint64_t master_seed,
           std::uint64_t replication, const EngineOptions& options)
        : config_(config),
          source_(source),
          options_(options),
          k_(config.arms),
          d_(source.covariate_dim()),
          units_rng_(make_stream(master_seed, replication, Stream::units)),
          assign_rng_(make_stream(master_seed, replication, Stream::assignment)),
          policy_rng_(make_stream(master_seed, replication, Stream::policy)),
          stats_(k_),
          power_(initial_power_states(k_)),
          effects_(k_ - 1, 0.0),
          effect_sums_(k_ - 1, 0.0),
          mu_(k_, 0.0),
          last_index_(k_, 0),
          fitted_through_(k_, 0),
          inputs_(k_ - 1) {
        if (source.arms() != config.arms) {
            throw ConfigError("experiment '" + config.name + "' has " + std::to_string(config.arms) +
                              " arms but the data source has " + std::to_string(source.arms()));
        }
        config.validate(d_);
        for (std::size_t k = 1; k < k_; ++k) {
            pairs_.emplace_back(config.alpha, config.t_star, config.radius_form);
        }
        for (std::size_t a = 0; a < k_; ++a) {
            least_squares_.emplace_back(d_);
            models_.push_back(zero_model(a, d_, resolve_cap(config.outcome_model, 0.0)));
        }
        if (config.batch_size > 1 || options.force_batched) {
            batch_inputs_.assign(k_ - 1, {});
        }

        report_.config_name = config.name;
        report_.replication = replication;
        report_.seed = derive_seed(master_seed, replication, Stream::units);
        report_.coverage_miss.assign(k_ - 1, false);
        report_.first_significant.assign(k_ - 1, 0);
        report_.sample_count.assign(k_, 0);
    }

    RunResult run() {
        const bool batched = config_.batch_size > 1 || options_.force_batched;
        std::uint64_t t = 0;
        std::uint64_t step = 0;
        while (t < config_.max_t) {
            ++step;
            const std::uint64_t first = t + 1;
            const std::uint64_t last = std::min(config_.max_t, t + config_.batch_size);

            const AssignmentDistribution dist = assignment_for(step, first);
            pending_.clear();
            for (auto& b : batch_inputs_) {
                b.clear();
            }
            for (std::uint64_t u = first; u <= last; ++u) {
                process_unit(u, dist, batched);
            }
            t = last;
            if (batched) {
                for (std::size_t k = 0; k + 1 < k_; ++k) {
                    batched_update(pairs_[k], step, batch_inputs_[k]);
                }
            }
            absorb_outcomes();
            after_step(step, t, dist, on_monitoring_grid(step));
            if (should_stop()) {
                break;
            }
        }
        finish(t, step);
        return std::move(result_);
    }

private:
    AssignmentDistribution assignment_for(std::uint64_t step, std::uint64_t first_unit) {
        std::vector<double> adaptive = policy_probs(stats_, config_.policy, first_unit, policy_rng_);
        if (config_.madmod) {
            weights_ = importance_weights(power_, step, *config_.madmod);
            adaptive = reweight(adaptive, weights_);
        } else {
            weights_.assign(k_, 1.0);
        }
        return mixture_probabilities(config_.delta.at(step), adaptive, step);
    }

    void process_unit(std::uint64_t t, const AssignmentDistribution& dist, bool batched) {
        source_.next_unit(units_rng_);
        const std::size_t arm = sample_assignment(dist, assign_rng_);
        Revealed revealed = source_.reveal(arm, units_rng_);

        if (options_.on_estimate) {
            options_.on_estimate(t, fitted_through_);
        }
        for (std::size_t a = 0; a < k_; ++a) {
            mu_[a] = predict(models_[a], revealed.covariates);
        }
        source_.unit_effects(effects_);
        for (std::size_t k = 1; k < k_; ++k) {
            IteInputs& in = inputs_[k - 1];
            in.assigned = arm == k ? PairRole::treatment : (arm == 0 ? PairRole::control : PairRole::other);
            in.y = revealed.outcome;
            in.mu_treatment = mu_[k];
            in.mu_control = mu_[0];
            in.p_treatment = dist.probs[k];
            in.p_control = dist.probs[0];
            effect_sums_[k - 1] += effects_[k - 1];
            if (batched) {
                batch_inputs_[k - 1].push_back(in);
            } else {
                update_pair(pairs_[k - 1], t, in);
            }
        }
        pending_.push_back(PendingUnit{t, arm, std::move(revealed.covariates), revealed.outcome});
    }

    void absorb_outcomes() {
        bool refit = false;
        for (const PendingUnit& p : pending_) {
            stats_[p.arm].record(p.y);
            ++report_.sample_count[p.arm];
            max_abs_outcome_ = std::max(max_abs_outcome_, std::abs(p.y));
            if (config_.outcome_model.kind != OutcomeModelKind::zero) {
                least_squares_[p.arm].add(p.x, p.y);
            }
            last_index_[p.arm] = p.t;
            refit = refit || config_.outcome_model.refit_due(p.t);
        }
        if (!refit) {
            return;
        }
        const double cap = resolve_cap(config_.outcome_model, max_abs_outcome_);
        for (std::size_t a = 0; a < k_; ++a) {
            models_[a] = fit_arm_model(a, least_squares_[a], config_.outcome_model, cap);
            models_[a].fitted_on = report_.sample_count[a];
            fitted_through_[a] = last_index_[a];
            if (options_.on_fit) {
                options_.on_fit(FitEvent{a, models_[a].fitted_on, fitted_through_[a]});
            }
        }
    }

    void after_step(std::uint64_t step, std::uint64_t t, const AssignmentDistribution& dist, bool monitor) {
        current_.resize(k_ - 1);
        for (std::size_t k = 0; k + 1 < k_; ++k) {
            current_[k] = pairs_[k].current();
            if (report_.first_significant[k] == 0 && is_significant(current_[k])) {
                report_.first_significant[k] = t;
            }
            if (monitor) {
                check_coverage(k, t);
            }
        }
        update_power_state(power_, current_, step);
        last_step_monitored_ = monitor;

        if (options_.record_trajectory) {
            for (const PendingUnit& p : pending_) {
                if ((p.t - 1) % std::max<std::uint64_t>(1, options_.trajectory_stride) != 0) {
                    continue;
                }
                TrajectoryRow row;
                row.t = p.t;
                row.step = step;
                row.arm = p.arm;
                row.y = p.y;
                row.p_mad = dist.probs;
                row.weights = weights_;
                row.cs = current_;
                for (const auto& pair : pairs_) {
                    row.s_hat.push_back(pair.s_hat);
                }
                result_.trajectory.push_back(std::move(row));
            }
        }
    }

    void check_coverage(std::size_t k, std::uint64_t t) {
        const double target = effect_sums_[k] / static_cast<double>(t);
        if (target < current_[k].lower || target > current_[k].upper) {
            report_.coverage_miss[k] = true;
        }
    }

    bool should_stop() const {
        switch (config_.stopping.kind) {
            case StoppingKind::none:
                return false;
            case StoppingKind::all_significant:
                return std::all_of(report_.first_significant.begin(), report_.first_significant.end(),
                                   [](std::uint64_t s) { return s != 0; });
            case StoppingKind::width_below:
                return std::all_of(current_.begin(), current_.end(), [&](const ConfidenceSequence& cs) {
                    return cs.width() < config_.stopping.width;
                });
        }
        return false;
    }

    void finish(std::uint64_t t, std::uint64_t step) {
        report_.stop_t = t;
        report_.steps = step;
        for (std::size_t k = 0; k + 1 < k_; ++k) {
            if (!last_step_monitored_) {
                check_coverage(k, t);
            }
            const ConfidenceSequence& cs = current_[k];
            report_.final_center.push_back(cs.center);
            report_.final_lower.push_back(cs.lower);
            report_.final_upper.push_back(cs.upper);
            report_.final_width.push_back(cs.width());
            report_.target_ate.push_back(effect_sums_[k] / static_cast<double>(t));
            report_.type2.push_back(report_.first_significant[k] == 0);
        }
        for (std::size_t a = 0; a < k_; ++a) {
            report_.sample_share.push_back(static_cast<double>(report_.sample_count[a]) /
                                           static_cast<double>(t));
        }
        result_.report = std::move(report_);
    }

    const ExperimentConfig& config_;
    UnitSource& source_;
    const EngineOptions& options_;
    std::size_t k_;
    std::size_t d_;
    Rng units_rng_;
    Rng assign_rng_;
    Rng policy_rng_;

    std::vector<ArmSufficientStats> stats_;
    std::vector<ArmPowerState> power_;
    std::vector<double> weights_;
    std::vector<ArmPairInferenceState> pairs_;
    std::vector<IncrementalLeastSquares> least_squares_;
    std::vector<FittedArmModel> models_;
    double max_abs_outcome_ = 0.0;

    std::vector<double> effects_;
    std::vector<double> effect_sums_;
    std::vector<double> mu_;
    std::vector<std::uint64_t> last_index_;
    std::vector<std::uint64_t> fitted_through_;
    std::vector<IteInputs> inputs_;
    std::vector<std::vector<IteInputs>> batch_inputs_;
    std::vector<PendingUnit> pending_;
    std::vector<ConfidenceSequence> current_;
    bool last_step_monitored_ = false;

    SimulationReport report_;
    RunResult result_;
};

}  // namespace

RunResult run_engine(const ExperimentConfig& config, UnitSource& source, std::uint64_t master_seed,
                     std::uint64_t replication, const EngineOptions& options) {
    Engine engine(config, source, master_seed, replication, options);
    return engine.run();
}

}  // namespace madlab

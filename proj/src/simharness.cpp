#include "madlab/simharness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "madlab/errors.hpp"

namespace madlab {

SimulationSource::SimulationSource(DgpSpec spec)
    : spec_(spec), arms_(madlab::arm_count(spec)), dim_(madlab::covariate_dim(spec)) {
    spec_.validate();
}

void SimulationSource::next_unit(Rng& rng) { current_ = draw_unit(spec_, rng); }

Revealed SimulationSource::reveal(std::size_t arm, Rng& /*rng*/) {
    return Revealed{current_.covariates, current_.potential_outcomes.at(arm)};
}

void SimulationSource::unit_effects(std::vector<double>& out) const {
    out.resize(arms_ - 1);
    for (std::size_t k = 1; k < arms_; ++k) {
        out[k - 1] = current_.potential_outcomes[k] - current_.potential_outcomes[0];
    }
}

RunResult run_experiment(const ExperimentConfig& config, const DgpSpec& dgp, std::uint64_t master_seed,
                         std::uint64_t replication, const EngineOptions& options) {
    if (config.arms != arm_count(dgp)) {
        throw ConfigError("experiment '" + config.name + "' has " + std::to_string(config.arms) +
                          " arms but dgp " + to_string(dgp.kind) + " has " +
                          std::to_string(arm_count(dgp)));
    }
    SimulationSource source(dgp);
    return run_engine(config, source, master_seed, replication, options);
}

std::vector<SimulationReport> replicate(std::uint64_t n_reps, std::span<const ExperimentConfig> configs,
                                        const DgpSpec& dgp, std::uint64_t master_seed, unsigned jobs) {
    const std::size_t n_configs = configs.size();
    const std::uint64_t total = n_reps * n_configs;
    std::vector<SimulationReport> reports(total);
    for (const auto& c : configs) {
        if (c.arms != arm_count(dgp)) {
            throw ConfigError("experiment '" + c.name + "' does not match dgp " + to_string(dgp.kind));
        }
        c.validate(covariate_dim(dgp));
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::uint64_t i = next++; i < total; i = next++) {
            try {
                const std::uint64_t rep = i / n_configs;
                const std::size_t c = i % n_configs;
                reports[i] = run_experiment(configs[c], dgp, master_seed, rep).report;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = total;
            }
        }
    };
    const unsigned n_threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return reports;
}

BinomialSummary binomial_summary(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) {
        return {};
    }
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {p, p - half, p + half};
}

MeanSummary mean_summary(std::span<const double> values) {
    MeanSummary s;
    if (values.empty()) {
        return s;
    }
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.se = std::sqrt(ss / (n - 1.0) / n);
    }
    s.lower = s.mean - 1.96 * s.se;
    s.upper = s.mean + 1.96 * s.se;
    return s;
}

std::vector<ArmSummary> aggregate(std::span<const SimulationReport> reports,
                                  std::span<const ExperimentConfig> configs) {
    const std::size_t n_configs = configs.size();
    std::vector<ArmSummary> out;
    if (n_configs == 0 || reports.empty()) {
        return out;
    }
    const std::size_t n_reps = reports.size() / n_configs;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t c = 0; c < n_configs; ++c) {
        const std::size_t k = configs[c].arms;
        for (std::size_t arm = 0; arm < k; ++arm) {
            ArmSummary s;
            s.config = configs[c].name;
            s.arm = arm;
            s.reps = n_reps;
            std::uint64_t misses = 0;
            std::uint64_t type2 = 0;
            std::vector<double> widths;
            std::vector<double> counts;
            std::vector<double> shares;
            std::vector<double> stops;
            for (std::size_t r = 0; r < n_reps; ++r) {
                const SimulationReport& rep = reports[r * n_configs + c];
                counts.push_back(static_cast<double>(rep.sample_count[arm]));
                shares.push_back(rep.sample_share[arm]);
                stops.push_back(static_cast<double>(rep.stop_t));
                if (arm > 0) {
                    misses += rep.coverage_miss[arm - 1] ? 1 : 0;
                    type2 += rep.type2[arm - 1] ? 1 : 0;
                    widths.push_back(rep.final_width[arm - 1]);
                }
            }
            if (arm > 0) {
                s.coverage_error = binomial_summary(misses, n_reps);
                s.type2 = binomial_summary(type2, n_reps);
                s.width = mean_summary(widths);
            } else {
                s.coverage_error = {nan, nan, nan};
                s.type2 = {nan, nan, nan};
                s.width = {nan, nan, nan, nan};
            }
            s.sample_count = mean_summary(counts);
            s.sample_share = mean_summary(shares);
            s.stop_t = mean_summary(stops);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<std::vector<double>> paired_width_ratios(std::span<const SimulationReport> reports,
                                                     std::size_t n_configs, std::size_t baseline,
                                                     std::size_t candidate) {
    if (baseline >= n_configs || candidate >= n_configs) {
        throw InputError("config index out of range");
    }
    std::vector<std::vector<double>> ratios;
    const std::size_t n_reps = reports.size() / n_configs;
    for (std::size_t r = 0; r < n_reps; ++r) {
        const SimulationReport& base = reports[r * n_configs + baseline];
        const SimulationReport& cand = reports[r * n_configs + candidate];
        std::vector<double> row;
        for (std::size_t k = 0; k < base.final_width.size(); ++k) {
            row.push_back(cand.final_width[k] / base.final_width[k]);
        }
        ratios.push_back(std::move(row));
    }
    return ratios;
}

}  // namespace madlab

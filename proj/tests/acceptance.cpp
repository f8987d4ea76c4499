// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "enumeration_oracle.hpp"
#include "madlab/cli.hpp"
#include "madlab/design.hpp"
#include "madlab/inference.hpp"
#include "madlab/madmod.hpp"
#include "madlab/simharness.hpp"

namespace {

using namespace madlab;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

unsigned jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

bool is_distribution(const std::vector<double>& p) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            return false;
        }
        sum += v;
    }
    return std::abs(sum - 1.0) <= 1e-12;
}

Outcome simplex_property() {
    const auto start = Clock::now();
    Rng rng = make_stream(20240601, 0, Stream::policy);
    const int trials = 100000;
    int failures = 0;
    for (int i = 0; i < trials; ++i) {
        const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 19.0);
        std::vector<double> adaptive(k);
        std::vector<double> w(k);
        double total = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            adaptive[a] = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
            w[a] = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng);
        }
        adaptive[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k)) % k] += 1e-3;
        for (double v : adaptive) {
            total += v;
        }
        for (double& v : adaptive) {
            v /= total;
        }
        w[0] = 1.0;
        const double delta = 1.0 - uniform01(rng);  // (0, 1]
        const auto rw = reweight(adaptive, w);
        const auto mixed = mixture_probabilities(delta, rw, 1 + i).probs;
        const double floor = delta / static_cast<double>(k);
        bool ok = is_distribution(rw) && is_distribution(mixed);
        for (double p : mixed) {
            ok = ok && p >= floor;
        }
        failures += ok ? 0 : 1;
    }
    const double secs = seconds_since(start);
    return {failures == 0 && secs < 10.0,
            std::to_string(trials) + " triples, " + std::to_string(failures) + " failures, " +
                fmt("%.2f s (limit 10 s)", secs)};
}

Outcome enumeration_oracle() {
    const auto start = Clock::now();
    double worst = 0.0;
    int cases = 0;
    auto check = [&](std::size_t arms, std::uint64_t seed, std::size_t treatment) {
        testing::DesignEnumerator e(arms, 3, seed);
        const auto r = e.run(treatment);
        worst = std::max({worst, std::abs(r.expected_tau_bar - r.true_tau_bar),
                          std::abs(r.expected_s_hat - r.expected_s), r.max_conditional_variance_gap,
                          r.max_conditional_tau_gap, std::abs(r.total_probability - 1.0)});
        ++cases;
    };
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        check(2, seed, 1);
        check(3, 100 + seed, 1);
        check(3, 100 + seed, 2);
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-12 && secs < 1.0, std::to_string(cases) + " tables, max gap " + fmt("%.3g", worst) +
                                              " (tol 1e-12), " + fmt("%.3f s (limit 1 s)", secs)};
}

Outcome coverage() {
    const auto start = Clock::now();
    const double bound = 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / 300.0);
    bool pass = true;
    std::string detail;
    for (const char* preset : {"coverage", "coverage_misspecified"}) {
        const RunSpec run = preset_run(preset, false);
        const auto reports = replicate(300, run.experiments, run.dgps.front(), 1, jobs());
        const auto summary = aggregate(reports, run.experiments);
        double worst = 0.0;
        for (const auto& s : summary) {
            if (s.arm > 0) {
                worst = std::max(worst, s.coverage_error.rate);
                if (s.coverage_error.rate > bound) {
                    pass = false;
                }
            }
        }
        detail += std::string(preset) + " max error " + fmt("%.4f", worst) + "; ";
    }
    const double secs = seconds_since(start);
    pass = pass && secs < 1800.0;
    return {pass, detail + "bound " + fmt("%.4f", bound) + ", " + fmt("%.0f s (target 1800 s)", secs)};
}

double mean_width_ratio(double gamma) {
    RunSpec run = preset_run("covar_grid", false);
    const DgpSpec dgp{DgpKind::gaussian_covariates, gamma, 2};
    const auto reports = replicate(30, run.experiments, dgp, 1, jobs());
    const auto ratios = paired_width_ratios(reports, run.experiments.size(), 0, 1);
    double sum = 0.0;
    for (const auto& r : ratios) {
        sum += r[0];
    }
    return sum / static_cast<double>(ratios.size());
}

Outcome precision_gain() {
    const auto start = Clock::now();
    const double strong = mean_width_ratio(1.0);
    const double weak = mean_width_ratio(0.1);
    const double secs = seconds_since(start);
    return {strong <= 0.7 && weak <= 1.1 && secs < 900.0,
            "width ratio " + fmt("%.3f", strong) + " at gamma 1 (<= 0.7), " + fmt("%.3f", weak) +
                " at gamma 0.1 (<= 1.1), " + fmt("%.0f s (limit 900 s)", secs)};
}

// Paired-difference 95% interval for mean(a - b).
MeanSummary paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
    }
    return mean_summary(d);
}

Outcome madmod_power() {
    const auto start = Clock::now();
    const RunSpec run = preset_run("madmod_power", false);
    const std::size_t n = 100;
    const auto reports = replicate(n, run.experiments, run.dgps.front(), 1, jobs());
    std::vector<double> type2_mad(n), type2_mod(n), count_mad(n), count_mod(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& mad = reports[2 * r];
        const auto& mod = reports[2 * r + 1];
        type2_mad[r] = (mad.type2[0] + mad.type2[1]) / 2.0;
        type2_mod[r] = (mod.type2[0] + mod.type2[1]) / 2.0;
        count_mad[r] = static_cast<double>(mad.sample_count[1] + mad.sample_count[2]);
        count_mod[r] = static_cast<double>(mod.sample_count[1] + mod.sample_count[2]);
    }
    const auto type2_gap = paired_difference(type2_mad, type2_mod);
    const auto count_gap = paired_difference(count_mod, count_mad);
    const double secs = seconds_since(start);
    const double mean_mad = std::accumulate(type2_mad.begin(), type2_mad.end(), 0.0) / n;
    const double mean_mod = std::accumulate(type2_mod.begin(), type2_mod.end(), 0.0) / n;
    return {type2_gap.lower > 0.0 && count_gap.lower > 0.0 && secs < 1200.0,
            "type-II arms 1-2 MAD " + fmt("%.3f", mean_mad) + " vs MADMod " + fmt("%.3f", mean_mod) +
                " (gap CI lower " + fmt("%.3f", type2_gap.lower) + "), count gap " +
                fmt("%.1f", count_gap.mean) + " (CI lower " + fmt("%.1f", count_gap.lower) + "), " +
                fmt("%.0f s (limit 1200 s)", secs)};
}

Outcome shrinkage() {
    RunSpec run = preset_run("coverage", false);
    ExperimentConfig c = run.experiments.front();
    c.delta = DeltaSequence::polynomial(0.2);
    c.max_t = 100000;
    EngineOptions opts;
    opts.record_trajectory = true;
    const auto traj = run_experiment(c, run.dgps.front(), 1, 0, opts).trajectory;
    if (traj.size() != c.max_t) {
        return {false, "trajectory has " + std::to_string(traj.size()) + " rows"};
    }
    bool pass = true;
    double worst_ratio = 0.0;
    double worst_slope = -1e300;
    for (std::size_t k = 0; k + 1 < c.arms; ++k) {
        const double early = traj[999].cs[k].radius;
        const double late = traj.back().cs[k].radius;
        worst_ratio = std::max(worst_ratio, late / early);
        pass = pass && late < early;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        double m = 0.0;
        for (std::size_t i = 9999; i < traj.size(); ++i) {
            const double x = std::log(static_cast<double>(traj[i].t));
            const double y = std::log(traj[i].cs[k].radius);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            m += 1.0;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        worst_slope = std::max(worst_slope, slope);
        pass = pass && slope < 0.0;
    }
    return {pass, "max radius(1e5)/radius(1e3) " + fmt("%.3f", worst_ratio) + ", max log-log slope " +
                      fmt("%.3f", worst_slope)};
}

Outcome spot_values() {
    const double alpha = 0.05;
    const double eta_oracle = std::sqrt((-2.0 * std::log(alpha) + std::log(-2.0 * std::log(alpha) + 1.0)) / 10000.0);
    const double eta = eta_opt(alpha, 10000);
    const std::vector<double> p{0.5, 0.3, 0.2};
    const std::vector<double> w{1.0, 0.5, 1.0};
    // Independent oracle: keep w_k p_k, then split the removed mass by w_k / sum(w).
    double removed = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        removed += p[i] * (1.0 - w[i]);
        wsum += w[i];
    }
    const auto got = reweight(p, w);
    const std::vector<double> expected{0.56, 0.18, 0.26};
    double gap = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double oracle = w[i] * p[i] + w[i] / wsum * removed;
        gap = std::max({gap, std::abs(got[i] - oracle), std::abs(got[i] - expected[i])});
    }
    const bool pass = std::abs(eta - 0.028171) <= 1e-5 && std::abs(eta - eta_oracle) <= 1e-5 && gap <= 1e-12;
    return {pass, "eta_opt(0.05, 10000) = " + fmt("%.6f", eta) + ", reweight max gap " + fmt("%.3g", gap)};
}

bool same_rows(const std::vector<TrajectoryRow>& a, const std::vector<TrajectoryRow>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].t != b[i].t || a[i].arm != b[i].arm || a[i].y != b[i].y || a[i].p_mad != b[i].p_mad ||
            a[i].weights != b[i].weights || a[i].s_hat != b[i].s_hat || a[i].cs.size() != b[i].cs.size()) {
            return false;
        }
        for (std::size_t k = 0; k < a[i].cs.size(); ++k) {
            if (a[i].cs[k].center != b[i].cs[k].center || a[i].cs[k].radius != b[i].cs[k].radius) {
                return false;
            }
        }
    }
    return true;
}

Outcome batch_equivalence() {
    std::vector<std::pair<ExperimentConfig, DgpSpec>> cases;
    {
        RunSpec run = preset_run("coverage", false);
        run.experiments.front().max_t = 3000;
        cases.emplace_back(run.experiments.front(), run.dgps.front());
    }
    {
        RunSpec run = preset_run("madmod_power", false);
        run.experiments[1].max_t = 3000;
        cases.emplace_back(run.experiments[1], run.dgps.front());
    }
    {
        RunSpec run = preset_run("covar_grid", false);
        run.experiments[1].max_t = 3000;
        cases.emplace_back(run.experiments[1], DgpSpec{DgpKind::gaussian_covariates, 1.0, 2});
    }
    bool pass = true;
    for (const auto& [config, dgp] : cases) {
        EngineOptions unit;
        unit.record_trajectory = true;
        EngineOptions batched = unit;
        batched.force_batched = true;
        for (std::uint64_t seed : {1, 2}) {
            pass = pass && same_rows(run_experiment(config, dgp, seed, 0, unit).trajectory,
                                     run_experiment(config, dgp, seed, 0, batched).trajectory);
        }
    }
    return {pass, std::to_string(cases.size() * 2) + " runs compared row by row"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"simplex property", simplex_property},
        {"design-based unbiasedness", enumeration_oracle},
        {"anytime coverage", coverage},
        {"covariate precision gain", precision_gain},
        {"reallocation power", madmod_power},
        {"confidence sequence shrinkage", shrinkage},
        {"numeric spot values", spot_values},
        {"batched equivalence", batch_equivalence},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

#include "madlab/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "madlab/errors.hpp"

namespace madlab {

DeltaSequence DeltaSequence::polynomial(double exponent) {
    if (!std::isfinite(exponent) || exponent < 0.0 || exponent >= 0.25) {
        std::ostringstream msg;
        msg << "delta exponent " << exponent
            << " must lie in [0, 0.25): delta_t = t^(-a) has to satisfy delta_t = omega(1/t^{1/4})";
        throw ConfigError(msg.str());
    }
    return DeltaSequence(false, exponent);
}

DeltaSequence DeltaSequence::constant(double value) {
    if (!std::isfinite(value) || value <= 0.0 || value > 1.0) {
        std::ostringstream msg;
        msg << "constant delta " << value << " must lie in (0, 1]";
        throw ConfigError(msg.str());
    }
    return DeltaSequence(true, value);
}

double DeltaSequence::at(std::uint64_t t) const {
    if (t == 0) {
        throw InputError("delta_t is defined for t >= 1");
    }
    if (constant_) {
        return value_;
    }
    if (value_ == 0.0) {
        return 1.0;
    }
    return std::pow(static_cast<double>(t), -value_);
}

double delta_at(const DeltaSequence& spec, std::uint64_t t) { return spec.at(t); }

void check_probability_vector(std::span<const double> probs, double tol) {
    if (probs.empty()) {
        throw InputError("probability vector is empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
            throw InputError("probability entry " + std::to_string(i) + " is negative or non-finite");
        }
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "probability vector sums to " << sum << ", not 1";
        throw InputError(msg.str());
    }
}

AssignmentDistribution mixture_probabilities(double delta, std::span<const double> adaptive,
                                             std::uint64_t t) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw InputError("mixture weight delta must lie in (0, 1]");
    }
    check_probability_vector(adaptive);
    const std::size_t k = adaptive.size();
    const double adaptive_sum = std::accumulate(adaptive.begin(), adaptive.end(), 0.0);

    AssignmentDistribution dist;
    dist.t = t;
    dist.floor = delta / static_cast<double>(k);
    dist.probs.resize(k);
    double sum = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
        dist.probs[w] = dist.floor + (1.0 - delta) * (adaptive[w] / adaptive_sum);
        sum += dist.probs[w];
    }
    const double drift = std::abs(sum - 1.0);
    if (drift > 1e-9) {
        throw InvariantError("mixture probabilities drifted from the simplex");
    }
    if (drift > 1e-12) {
        for (double& p : dist.probs) {
            p = std::max(dist.floor, p / sum);
        }
    }
    return dist;
}

std::size_t sample_assignment(const AssignmentDistribution& dist, Rng& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t w = 0; w < dist.probs.size(); ++w) {
        if (dist.probs[w] <= 0.0) {
            continue;
        }
        last_positive = w;
        cumulative += dist.probs[w];
        if (u < cumulative) {
            return w;
        }
    }
    // Rounding left u above the final cumulative sum.
    return last_positive;
}

}  // namespace madlab

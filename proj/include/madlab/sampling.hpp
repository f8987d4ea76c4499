#pragma once

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "madlab/rng.hpp"

namespace madlab {

// Standard normal via Boost's ziggurat sampler.
class StandardNormal {
public:
    double operator()(Rng& rng) { return dist_(rng); }

private:
    boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

// Gamma(shape, 1) by Marsaglia & Tsang's squeeze method. Shapes below 1 use
// Gamma(shape + 1) * U^(1/shape).
class GammaSampler {
public:
    explicit GammaSampler(double shape)
        : boost_(shape < 1.0), d_((boost_ ? shape + 1.0 : shape) - 1.0 / 3.0),
          c_(1.0 / std::sqrt(9.0 * d_)), inv_shape_(1.0 / shape) {}

    double operator()(Rng& rng, StandardNormal& normal) const {
        double value = 0.0;
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal(rng);
                v = 1.0 + c_ * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01(rng);
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2 ||
                std::log(u) < 0.5 * x2 + d_ * (1.0 - v + std::log(v))) {
                value = d_ * v;
                break;
            }
        }
        if (boost_) {
            value *= std::pow(uniform01(rng), inv_shape_);
        }
        return value;
    }

private:
    bool boost_;
    double d_;
    double c_;
    double inv_shape_;
};

}  // namespace madlab

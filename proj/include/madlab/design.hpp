#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "madlab/rng.hpp"

namespace madlab {

/// Deterministic mixing weight of the uniform design.
///
/// Either polynomial decay t^(-exponent) with exponent in [0, 1/4), or a
/// constant in (0, 1]. The exponent bound is what keeps 1/delta_t = o(t^{1/4}),
/// which the confidence sequence needs to shrink; it is enforced at
/// construction. Both forms are non-increasing in t.
class DeltaSequence {
public:
    static DeltaSequence polynomial(double exponent);
    static DeltaSequence constant(double value);

    double at(std::uint64_t t) const;

    bool is_constant() const { return constant_; }
    // Exponent for polynomial sequences, level for constant ones.
    double parameter() const { return value_; }

private:
    DeltaSequence(bool constant, double value) : constant_(constant), value_(value) {}

    bool constant_;
    double value_;
};

double delta_at(const DeltaSequence& spec, std::uint64_t t);

struct AssignmentDistribution {
    std::vector<double> probs;
    std::uint64_t t = 1;
    // delta_t / K; every entry is >= floor.
    double floor = 0.0;

    std::size_t arms() const { return probs.size(); }
};

/// delta/K + (1 - delta) * adaptive[w] for every arm.
///
/// `adaptive` must be non-negative and sum to 1 within 1e-9; it is normalized
/// before mixing. Throws InputError on a bad vector or delta outside (0, 1].
AssignmentDistribution mixture_probabilities(double delta, std::span<const double> adaptive,
                                             std::uint64_t t = 1);

std::size_t sample_assignment(const AssignmentDistribution& dist, Rng& rng);

// Throws InputError unless entries are finite, >= 0 and sum to 1 within tol.
void check_probability_vector(std::span<const double> probs, double tol = 1e-9);

}  // namespace madlab

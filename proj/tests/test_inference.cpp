#include "madlab/inference.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "enumeration_oracle.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "madlab/errors.hpp"

namespace madlab {
namespace {

IteInputs treated(double y, double mu_t, double mu_c, double p_t, double p_c = 0.5) {
    return IteInputs{PairRole::treatment, y, mu_t, mu_c, p_t, p_c};
}

TEST(IteEstimate, PureIpwTerm) { EXPECT_DOUBLE_EQ(ite_estimate(treated(1.0, 0.0, 0.0, 0.5)), 2.0); }

TEST(IteEstimate, ZeroResidualLeavesContrast) {
    for (double p : {0.1, 0.5, 0.9}) {
        EXPECT_DOUBLE_EQ(ite_estimate(treated(3.0, 3.0, 1.0, p)), 2.0);
    }
}

TEST(IteEstimate, TwoPointEnumerationIsUnbiased) {
    const double y1 = 2.0, y0 = 1.0, mu1 = 0.5, mu0 = 0.2, p1 = 0.7;
    const IteInputs a{PairRole::treatment, y1, mu1, mu0, p1, 1 - p1};
    const IteInputs b{PairRole::control, y0, mu1, mu0, p1, 1 - p1};
    EXPECT_NEAR(p1 * ite_estimate(a) + (1 - p1) * ite_estimate(b), y1 - y0, 1e-15);
}

TEST(IteEstimate, ThirdArmGivesModelContrast) {
    const IteInputs in{PairRole::other, 9.0, 1.5, 0.25, 0.2, 0.3};
    EXPECT_DOUBLE_EQ(ite_estimate(in), 1.25);
    EXPECT_DOUBLE_EQ(variance_estimate(in), 0.0);
}

TEST(IteEstimate, RejectsNonPositiveProbability) {
    EXPECT_THROW(ite_estimate(treated(1.0, 0.0, 0.0, 0.0)), InvariantError);
    EXPECT_THROW(variance_estimate(treated(1.0, 0.0, 0.0, 0.5, -0.1)), InvariantError);
}

TEST(VarianceEstimate, Values) {
    EXPECT_DOUBLE_EQ(variance_estimate(treated(1.0, 0.0, 0.0, 0.5)), 4.0);
    EXPECT_DOUBLE_EQ(variance_estimate(treated(2.0, 2.0, 0.0, 0.5)), 0.0);
    const IteInputs c{PairRole::control, 1.0, 0.0, 0.5, 0.5, 0.25};
    EXPECT_DOUBLE_EQ(variance_estimate(c), 0.25 / 0.0625);
}

TEST(VarianceEstimate, EnumerationMatchesSigmaSquared) {
    const double y1 = 2.0, y0 = -1.0, mu1 = 0.5, mu0 = 0.2, p1 = 0.3;
    const IteInputs a{PairRole::treatment, y1, mu1, mu0, p1, 1 - p1};
    const IteInputs b{PairRole::control, y0, mu1, mu0, p1, 1 - p1};
    const double sigma2 = (y1 - mu1) * (y1 - mu1) / p1 + (y0 - mu0) * (y0 - mu0) / (1 - p1);
    EXPECT_NEAR(p1 * variance_estimate(a) + (1 - p1) * variance_estimate(b), sigma2, 1e-13);
}

TEST(EtaOpt, SpotValue) {
    const double a = 0.05;
    const double oracle = std::sqrt((-2 * std::log(a) + std::log(-2 * std::log(a) + 1)) / 10000.0);
    EXPECT_NEAR(eta_opt(a, 10000), oracle, 1e-15);
    EXPECT_NEAR(eta_opt(a, 10000), 0.028171, 1e-5);
}

TEST(EtaOpt, InverseSqrtScaling) { EXPECT_NEAR(eta_opt(0.05, 40000), eta_opt(0.05, 10000) / 2, 1e-15); }

TEST(EtaOpt, VanishesAsAlphaApproachesOne) {
    EXPECT_LT(eta_opt(1.0 - 1e-12, 10000), 1e-7);
    EXPECT_ANY_THROW(eta_opt(0.0, 100));
    EXPECT_ANY_THROW(eta_opt(0.05, 0.5));
}

TEST(CsRadius, SpotValue) {
    EXPECT_NEAR(cs_radius(0.0, 1, 1.0, 0.05), std::sqrt(2 * std::log(1 / 0.05)), 1e-15);
    EXPECT_NEAR(cs_radius(0.0, 1, 1.0, 0.05), 2.4477, 1e-4);
}

TEST(CsRadius, LogOutsideForm) {
    const double s = 3.0, t = 10, eta = 0.5, a = 0.05;
    const double v = s * eta * eta + 1;
    const double oracle = std::sqrt(2 * v / (t * t * eta * eta)) * std::log(std::sqrt(v) / a);
    EXPECT_NEAR(cs_radius(s, t, eta, a, RadiusForm::log_outside), oracle, 1e-14);
}

TEST(CsRadius, ShrinksWhenTDoubles) {
    for (double t = 1; t < 1e6; t *= 2) {
        EXPECT_LT(cs_radius(50.0, 2 * t, 0.03, 0.05), cs_radius(50.0, t, 0.03, 0.05));
    }
}

TEST(CsRadius, MonotoneInSHat) {
    for (double s = 0; s < 1e5; s = 2 * s + 1) {
        EXPECT_GT(cs_radius(2 * s + 1, 100, 0.03, 0.05), cs_radius(s, 100, 0.03, 0.05));
    }
}

TEST(UpdatePair, FirstUpdateCenter) {
    ArmPairInferenceState st(0.05, 10000);
    const auto cs = update_pair(st, 1, treated(1.0, 0.0, 0.0, 0.5));
    EXPECT_DOUBLE_EQ(cs.center, 2.0);
    EXPECT_EQ(st.t, 1U);
    EXPECT_DOUBLE_EQ(st.s_hat, 4.0);
    EXPECT_TRUE(std::isfinite(cs.radius));
    EXPECT_GT(cs.radius, 0.0);
}

TEST(UpdatePair, RejectsOutOfOrderIndex) {
    ArmPairInferenceState st(0.05, 10000);
    update_pair(st, 1, treated(1.0, 0.0, 0.0, 0.5));
    EXPECT_THROW(update_pair(st, 3, treated(1.0, 0.0, 0.0, 0.5)), SequencingError);
    EXPECT_THROW(update_pair(st, 1, treated(1.0, 0.0, 0.0, 0.5)), SequencingError);
}

TEST(UpdatePair, CenterTracksTrueEffectOnFixedStream) {
    // Potential outcomes fixed in advance; only assignment is random.
    Rng units(10);
    Rng assign(11);
    const int n = 1000;
    std::vector<double> y1(n), y0(n);
    double tau = 0.0;
    for (int i = 0; i < n; ++i) {
        y0[i] = uniform01(units);
        y1[i] = y0[i] + 0.5 + 0.5 * uniform01(units);
        tau += y1[i] - y0[i];
    }
    tau /= n;
    ArmPairInferenceState st(0.05, 10000);
    ConfidenceSequence cs;
    for (int i = 0; i < n; ++i) {
        const double p1 = 0.3 + 0.4 * uniform01(units);
        const bool treat = uniform01(assign) < p1;
        const IteInputs in{treat ? PairRole::treatment : PairRole::control, treat ? y1[i] : y0[i], 0.4, 0.1,
                           p1, 1 - p1};
        cs = update_pair(st, i + 1, in);
        ASSERT_TRUE(std::isfinite(cs.radius));
        ASSERT_GT(cs.radius, 0.0);
    }
    // Per-unit variance is at most about 1 / 0.3, so 4 standard errors is ~0.25.
    EXPECT_NEAR(cs.center, tau, 4.0 * std::sqrt(st.s_hat) / n);
    EXPECT_LE(cs.lower, tau);
    EXPECT_GE(cs.upper, tau);
}

TEST(UpdatePair, SHatNonDecreasing) {
    Rng rng(12);
    ArmPairInferenceState st(0.05, 10000);
    double prev = 0.0;
    for (int i = 1; i <= 500; ++i) {
        const auto role = static_cast<PairRole>(rng() % 3);
        update_pair(st, i, IteInputs{role, uniform01(rng), 0.2, 0.1, 0.3, 0.4});
        ASSERT_GE(st.s_hat, prev);
        prev = st.s_hat;
    }
}

TEST(CurrentCs, InfiniteBeforeData) {
    ArmPairInferenceState st(0.05, 10000);
    EXPECT_TRUE(std::isinf(st.current().radius));
    EXPECT_FALSE(is_significant(st.current()));
}

TEST(BatchedUpdate, HandArithmetic) {
    ArmPairInferenceState st(0.05, 10000);
    // Third-arm units: tau_hat is the model contrast, 1 and 3.
    const std::vector<IteInputs> b2{IteInputs{PairRole::other, 0.0, 1.0, 0.0, 0.5, 0.5},
                                    IteInputs{PairRole::other, 0.0, 3.0, 0.0, 0.5, 0.5}};
    const auto cs = batched_update(st, 1, b2);
    EXPECT_DOUBLE_EQ(cs.center, 2.0);
    EXPECT_EQ(st.t, 1U);

    // sigma_hat^2 = 4 for both units.
    ArmPairInferenceState sv(0.05, 10000);
    const std::vector<IteInputs> b3{treated(1.0, 0.0, 0.0, 0.5, 0.5), treated(-1.0, 0.0, 0.0, 0.5, 0.5)};
    batched_update(sv, 1, b3);
    EXPECT_DOUBLE_EQ(sv.s_hat, 2.0);
}

TEST(BatchedUpdate, SingletonMatchesUnitUpdate) {
    Rng rng(13);
    ArmPairInferenceState unit(0.05, 10000);
    ArmPairInferenceState batch(0.05, 10000);
    for (int i = 1; i <= 200; ++i) {
        const IteInputs in{static_cast<PairRole>(rng() % 3), uniform01(rng), 0.3, -0.2,
                           0.1 + 0.5 * uniform01(rng), 0.1 + 0.3 * uniform01(rng)};
        const auto a = update_pair(unit, i, in);
        const auto b = batched_update(batch, i, std::vector<IteInputs>{in});
        ASSERT_EQ(a.center, b.center);
        ASSERT_EQ(a.radius, b.radius);
        ASSERT_EQ(unit.s_hat, batch.s_hat);
    }
}

TEST(BatchedUpdate, RejectsMixedProbabilities) {
    ArmPairInferenceState st(0.05, 10000);
    const std::vector<IteInputs> batch{treated(1.0, 0.0, 0.0, 0.5, 0.5), treated(1.0, 0.0, 0.0, 0.4, 0.5)};
    EXPECT_THROW(batched_update(st, 1, batch), InputError);
}

TEST(IsSignificant, Cases) {
    EXPECT_TRUE(is_significant(make_cs(0.3, 0.1)));
    EXPECT_FALSE(is_significant(make_cs(0.3, 0.5)));
    EXPECT_TRUE(is_significant(make_cs(-0.3, 0.1)));
}

TEST(Enumeration, UnbiasedTwoArms) {
    for (std::uint64_t seed : {1, 2, 3, 4}) {
        testing::DesignEnumerator e(2, 3, seed);
        const auto r = e.run(1);
        EXPECT_NEAR(r.total_probability, 1.0, 1e-14);
        EXPECT_NEAR(r.expected_tau_bar, r.true_tau_bar, 1e-12);
        EXPECT_NEAR(r.expected_s_hat, r.expected_s, 1e-12);
        EXPECT_LT(r.max_conditional_tau_gap, 1e-12);
        EXPECT_LT(r.max_conditional_variance_gap, 1e-12);
    }
}

TEST(Enumeration, UnbiasedThreeArmsEveryPair) {
    for (std::uint64_t seed : {5, 6}) {
        testing::DesignEnumerator e(3, 3, seed);
        for (std::size_t arm : {1, 2}) {
            const auto r = e.run(arm);
            EXPECT_NEAR(r.expected_tau_bar, r.true_tau_bar, 1e-12);
            EXPECT_NEAR(r.expected_s_hat, r.expected_s, 1e-12);
            EXPECT_LT(r.max_conditional_variance_gap, 1e-12);
        }
    }
}

}  // namespace
}  // namespace madlab

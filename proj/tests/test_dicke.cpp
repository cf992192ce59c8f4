#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spinsq/spinsq.hpp"
#include "support/oracles.hpp"

using namespace spinsq;

TEST(CssWeights, TwoAtoms) {
    const auto p = css_log_weights(2).probabilities();
    ASSERT_EQ(p.size(), 3u);
    EXPECT_NEAR(p[0], 0.25, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
    EXPECT_NEAR(p[2], 0.25, 1e-15);
}

TEST(CssWeights, OneAtomUsesHalfIntegerIndex) {
    const auto w = css_log_weights(1);
    EXPECT_DOUBLE_EQ(w.m(0), -0.5);
    EXPECT_DOUBLE_EQ(w.m(1), 0.5);
    const auto p = w.probabilities();
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(CssWeights, SecondMomentIsQuarterN) {
    const auto w = css_log_weights(60);
    const auto p = w.probabilities();
    double s = 0;
    for (int i = 0; i <= 60; ++i) s += p[i] * w.m(i) * w.m(i);
    EXPECT_NEAR(s, 15.0, 1e-12);
}

TEST(CssWeights, NormalizedSymmetricAndCentred) {
    for (int n : {1, 2, 3, 7, 60, 101, 400, 2000}) {
        const auto w = css_log_weights(n);
        const auto p = w.probabilities();
        CompensatedSum tot, m1, m2;
        for (int i = 0; i <= n; ++i) {
            tot += p[i];
            m1 += p[i] * w.m(i);
            m2 += p[i] * w.m(i) * w.m(i);
            EXPECT_EQ(w.log_w[i], w.log_w[n - i]) << "N=" << n << " i=" << i;
        }
        EXPECT_NEAR(tot.value(), 1.0, 1e-12) << n;
        EXPECT_NEAR(m1.value(), 0.0, 1e-12 * n) << n;
        EXPECT_NEAR(m2.value() / (0.25 * n), 1.0, 1e-12) << n;
    }
}

TEST(CssWeights, MatchesExactBinomialPmf) {
    const int n = 20;
    const auto p = css_log_weights(n).probabilities();
    double c = 1.0;  // C(20, k)
    for (int k = 0; k <= n; ++k) {
        EXPECT_NEAR(p[k], c / std::pow(2.0, n), 1e-15);
        c = c * (n - k) / (k + 1);
    }
}

TEST(CssWeights, RejectsNonPositiveN) {
    EXPECT_THROW(css_log_weights(0), DomainError);
    EXPECT_THROW(css_log_weights(-3), DomainError);
}

TEST(Recursion, AdjacentAmplitudeIdentity) {
    // c_m c_{m+1} sqrt((N/2-m)(N/2+1+m)) == c_m^2 (N/2-m), in log space
    for (int n = 1; n <= 60; ++n) {
        const auto w = css_log_weights(n);
        for (int i = 0; i < n; ++i) {
            const double m = w.m(i);
            const double lhs = 0.5 * (w.log_w[i] + w.log_w[i + 1]) + 0.5 * std::log((0.5 * n - m) * (0.5 * n + 1 + m));
            const double rhs = w.log_w[i] + std::log(0.5 * n - m);
            EXPECT_NEAR(std::exp(lhs - rhs), 1.0, 1e-12) << "N=" << n << " m=" << m;
        }
    }
}

TEST(GaussianLimit, TotalVariationToDiscretizedNormal) {
    for (int n : {400, 1000, 4000}) {
        const auto w = css_log_weights(n);
        const auto p = w.probabilities();
        const double sd = std::sqrt(0.25 * n);
        std::vector<double> q(n + 1);
        double qs = 0;
        for (int i = 0; i <= n; ++i) {
            const double m = w.m(i);
            q[i] = std::exp(-0.5 * m * m / (sd * sd));
            qs += q[i];
        }
        double tv = 0;
        for (int i = 0; i <= n; ++i) tv += 0.5 * std::abs(p[i] - q[i] / qs);
        EXPECT_LT(tv, 0.5 / std::sqrt(n)) << n;
    }
}

TEST(CollectiveMoments, CssHasUnitSqueezing) {
    const auto r = collective_moments(css_log_weights(100));
    EXPECT_NEAR(r.jz2, 25.0, 1e-11);
    EXPECT_NEAR(r.jx, 50.0, 1e-11);
    EXPECT_NEAR(r.xi_sq, 1.0, 1e-12);
    EXPECT_FALSE(r.jx_vanishes);
}

TEST(CollectiveMoments, DeltaAtZero) {
    DickeWeights w;
    w.n_atoms = 4;
    w.log_w = {-kInf, -kInf, 0.0, -kInf, -kInf};
    const auto r = collective_moments(w);
    EXPECT_EQ(r.jz2, 0.0);
    EXPECT_NEAR(r.jx, 2.0, 1e-15);
}

TEST(CollectiveMoments, VanishingJxIsFlaggedNotFatal) {
    auto w = css_log_weights(6);
    w.offdiag_logf.assign(6, -kInf);
    w.offdiag_sign.assign(6, 0);
    const auto r = collective_moments(w);
    EXPECT_TRUE(r.jx_vanishes);
    EXPECT_TRUE(std::isinf(r.xi_sq));
}

TEST(CollectiveMoments, NegativeOffDiagonalSignIsCarried) {
    auto w = css_log_weights(4);
    w.offdiag_logf.assign(4, 0.0);
    w.offdiag_sign.assign(4, -1);
    EXPECT_NEAR(collective_moments(w).jx, -2.0, 1e-14);
}

TEST(CollectiveMoments, RejectsMalformedInput) {
    auto w = css_log_weights(4);
    w.offdiag_logf.assign(3, 0.0);
    w.offdiag_sign.assign(3, 1);
    EXPECT_THROW(collective_moments(w), DomainError);
}

TEST(CollectiveMoments, PosteriorMatchesDenseMatrixTrace) {
    const EnsembleSpec ens{8, 0.1};
    for (double x : {std::numbers::pi / 8, std::numbers::pi / 4, 1.2}) {
        const auto probe = make_probe(4.0, x);
        for (const MeasurementOutcome out : {MeasurementOutcome{2, 2}, MeasurementOutcome{9, 1}, MeasurementOutcome{0.5, 12}}) {
            const auto r = collective_moments(posterior_weights(ens, probe, out, PosteriorMethod::exact));
            const auto [jz2, jx] = oracle_support::dense_moments(oracle_support::dense_posterior(ens, probe, out));
            EXPECT_NEAR(r.jz2, jz2, 1e-12 * std::abs(jz2) + 1e-14);
            EXPECT_NEAR(r.jx, jx, 1e-12 * std::abs(jx));
        }
    }
}

TEST(EnsembleSpec, Validation) {
    EXPECT_NO_THROW(validate(EnsembleSpec{10, 0.1}));
    EXPECT_THROW(validate(EnsembleSpec{0, 0.1}), DomainError);
    EXPECT_THROW(validate(EnsembleSpec{10, -0.1}), DomainError);
    EXPECT_THROW(validate(EnsembleSpec{10'000, 1.0}), DomainError);  // phi N above the cap
    EXPECT_NO_THROW(validate(EnsembleSpec{10'000, 1.0}, 1e5));
}

TEST(DickeSlot, RoundTrip) {
    EXPECT_EQ(dicke_slot(5, -2.5), 0);
    EXPECT_EQ(dicke_slot(5, 0.5), 3);
    EXPECT_THROW(dicke_slot(5, 0.0), DomainError);
    EXPECT_THROW(dicke_slot(4, 3.0), DomainError);
}

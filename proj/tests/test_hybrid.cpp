// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <qnd/exact_solver.hpp>
#include <qnd/hybrid.hpp>

namespace {

using qnd::cplx;
using qnd::DisentangleMode;

const cplx kI(0.0, 1.0);

/** Oracle: dense e^{iθ(b†b − κn(b† + b))} on levels 0..63. */
Eigen::VectorXcd dense_propagate(double theta, double kn, const Eigen::VectorXcd& v) {
    const int d = static_cast<int>(v.size());
    const Eigen::MatrixXcd b = qnd::annihilation_matrix(d - 1);
    const Eigen::MatrixXcd H = b.adjoint() * b - kn * (b.adjoint() + b);
    const Eigen::MatrixXcd U = (kI * theta * H).exp();
    return U * v;
}

Eigen::VectorXcd basis_vector(int d, int n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v(n) = 1.0;
    return v;
}

Eigen::VectorXcd padded(const Eigen::VectorXcd& v, int d) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
    out.head(std::min<Eigen::Index>(d, v.size())) = v.head(std::min<Eigen::Index>(d, v.size()));
    return out;
}

TEST(Disentangle, ZeroTimeGivesZeroFactors) {
    for (auto mode : {DisentangleMode::Exact, DisentangleMode::LeadingOrder}) {
        const auto f = qnd::disentangle(0.0, 0.05, 7, mode);
        for (cplx c : {f.p, f.q, f.r, f.s}) EXPECT_NEAR(std::abs(c), 0.0, 1e-15);
    }
}

TEST(Disentangle, LeadingOrderSubstitution) {
    const auto f = qnd::disentangle(0.1, 1.0, 1, DisentangleMode::LeadingOrder);
    EXPECT_NEAR(std::abs(f.p - cplx(-0.1, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.s - cplx(0.0, 0.005)), 0.0, 1e-15);
    // agreement with exact mode: phase s to third order, displacement p to second
    for (double th : {0.1, 0.05, 0.025}) {
        const auto e = qnd::disentangle(th, 1.0, 1, DisentangleMode::Exact);
        const auto l = qnd::disentangle(th, 1.0, 1, DisentangleMode::LeadingOrder);
        EXPECT_LT(std::abs(e.s - l.s), 0.2 * th * th * th);
        EXPECT_LT(std::abs(e.p - l.p), 0.51 * th * th);
    }
}

TEST(Disentangle, ExactFactorsSolveTheirDifferentialEquations) {
    const double kappa = 0.03;
    const int n = 11;
    const double kn = kappa * n, h = 1e-5;
    for (double th : {0.2, 1.0, 2.5, 3.0}) {
        auto at = [&](double x) { return qnd::disentangle(x, kappa, n, DisentangleMode::Exact); };
        const auto f = at(th), fp = at(th + h), fm = at(th - h);
        const cplx dp = (fp.p - fm.p) / (2 * h), dq = (fp.q - fm.q) / (2 * h);
        const cplx dr = (fp.r - fm.r) / (2 * h), ds = (fp.s - fm.s) / (2 * h);
        EXPECT_LT(std::abs(dp - kI * dq * f.p + kn), 1e-10);
        EXPECT_LT(std::abs(dr * std::exp(-kI * f.q) + kn), 1e-10);
        EXPECT_LT(std::abs(dq - 1.0), 1e-10);
        EXPECT_LT(std::abs(ds - kI * dr * f.p * std::exp(-kI * f.q)), 1e-10);
    }
}

TEST(Disentangle, ExactProductMatchesDenseExponential) {
    for (double th : {0.1, 0.5, 1.0, qnd::kPi})
        for (double kn : {-2.0, -0.7, 0.3, 1.0, 2.0})
            for (int start : {0, 1, 2}) {
                const int n = static_cast<int>(std::lround(kn * 10));
                const auto f = qnd::disentangle(th, 0.1, n, DisentangleMode::Exact);
                const auto v = basis_vector(64, start);
                EXPECT_GT(qnd::fidelity(qnd::apply_disentangled(f, v), dense_propagate(th, 0.1 * n, v)), 1.0 - 1e-8)
                    << th << ' ' << kn << ' ' << start;
            }
}

TEST(Disentangle, LeadingOrderInfidelityIsHigherOrderInTime) {
    const auto v = basis_vector(64, 0);
    double prev = -1.0;
    for (double th : {0.4, 0.2, 0.1, 0.05}) {
        const auto e = qnd::apply_disentangled(qnd::disentangle(th, 0.05, 10, DisentangleMode::Exact), v);
        const auto l = qnd::apply_disentangled(qnd::disentangle(th, 0.05, 10, DisentangleMode::LeadingOrder), v);
        const double inf = 1.0 - qnd::fidelity(e, l);
        if (prev > 0.0) {
            EXPECT_GE(prev / inf, 7.0) << th;
        }
        prev = inf;
    }
}

TEST(Disentangle, CoherentImageMatchesSeriesAction) {
    const cplx z = std::polar(0.8, 0.4);
    for (auto mode : {DisentangleMode::Exact, DisentangleMode::LeadingOrder}) {
        const auto f = qnd::disentangle(0.9, 0.07, -9, mode);
        const auto img = qnd::apply_disentangled_coherent(f, z);
        const auto series = qnd::apply_disentangled(f, qnd::hp_coherent(z, 60).amplitudes);
        Eigen::VectorXcd closed(61);
        for (int m = 0; m <= 60; ++m) closed(m) = (img.prefactor * qnd::coherent_amplitude(img.label, m)).value();
        // coherent_amplitude already holds e^{−|w|²/2}; undo it to compare raw amplitudes
        closed *= std::exp(0.5 * std::norm(img.label));
        EXPECT_LT((closed - series).norm(), 1e-10);
    }
}

TEST(HybridNumeric, InitialTimeReturnsVacuum) {
    const auto p = qnd::presets::variances();
    const auto s = qnd::hp_conditional_state_numeric(p, 20, 20, 0.0, qnd::hp_vacuum(8));
    EXPECT_NEAR(std::norm(s.amplitudes(0)), 1.0, 1e-12);
}

TEST(HybridNumeric, BalancedVacuumConditioningKeepsEvenParity) {
    const auto p = qnd::presets::variances();
    for (double th = 0.0; th <= 60.0; th += 5.0) {
        const auto s = qnd::hp_conditional_state_numeric(p, 20, 20, th / p.omega, qnd::hp_vacuum(8));
        EXPECT_LT(qnd::odd_mass(s), 1e-8) << th;
        EXPECT_LT(s.tail_mass, 1e-10) << th;
        EXPECT_LE(s.n_max(), p.N);
        EXPECT_NEAR(s.norm(), 1.0, 1e-10);
    }
}

TEST(HybridNumeric, TwoToZeroAmplitudeRatioAtShortTimes) {
    // the closed-form ratio √2·(−2c)/(1+4c) is leading order; it holds to 1e-3 up to Ωt ≈ 15
    const auto p = qnd::presets::variances();
    for (double th : {2.0, 5.0, 10.0, 15.0}) {
        const double t = th / p.omega;
        const auto s = qnd::hp_conditional_state_numeric(p, 20, 20, t, qnd::hp_vacuum(8));
        const double c = p.squeeze_parameter(t);
        const cplx ratio = s.amplitudes(2) / s.amplitudes(0);
        EXPECT_NEAR(std::abs(ratio - std::sqrt(2.0) * (-2.0 * c) / (1.0 + 4.0 * c)), 0.0, 1e-3) << th;
    }
}

TEST(HybridNumeric, ExactModeRunsAndNormalizes) {
    const auto p = qnd::presets::variances();
    qnd::HybridOptions o;
    o.mode = DisentangleMode::Exact;
    const auto s = qnd::hp_conditional_state_numeric(p, 20, 20, 20.0 / p.omega, qnd::hp_vacuum(8), o);
    EXPECT_NEAR(s.norm(), 1.0, 1e-10);
    EXPECT_LT(qnd::odd_mass(s), 1e-8);
}

TEST(HybridNumeric, SeriesAndCoherentPathsAgree) {
    const auto p = qnd::presets::variances();
    const double t = 20.0 / p.omega;
    qnd::HPState plain = qnd::hp_coherent(0.3, 80);
    const auto coh = qnd::hp_conditional_state_numeric(p, 19, 22, t, plain);
    plain.coherent_label.reset();
    const auto ser = qnd::hp_conditional_state_numeric(p, 19, 22, t, plain);
    const int d = static_cast<int>(std::max(coh.amplitudes.size(), ser.amplitudes.size()));
    EXPECT_GT(qnd::fidelity(padded(coh.amplitudes, d), padded(ser.amplitudes, d)), 1.0 - 1e-9);
}

TEST(HybridNumeric, CutoffOverflowAtTheAtomNumberIsAnError) {
    const auto p = qnd::presets::variances();
    EXPECT_THROW((void)qnd::hp_conditional_state_numeric(p, 20, 20, 250.0 / p.omega, qnd::hp_vacuum(8)),
                 qnd::CutoffError);
}

TEST(ClosedPerfect, InitialTimeIsVacuum) {
    const auto r = qnd::hp_conditional_state_closed_perfect(qnd::presets::variances(), 0.0);
    EXPECT_NEAR(std::norm(r.state.amplitudes(0)), 1.0, 1e-15);
    EXPECT_FALSE(r.regime_warning);
}

TEST(ClosedPerfect, NormalizedInsideValidityWindow) {
    const auto p = qnd::presets::variances();
    for (double th = 0.0; th < 63.0; th += 7.0) {
        const auto r = qnd::hp_conditional_state_closed_perfect(p, th / p.omega);
        EXPECT_NEAR(r.prefactor_norm, 1.0, 1e-10) << th;
        EXPECT_NEAR(r.state.norm(), 1.0, 1e-12);
    }
}

TEST(ClosedPerfect, MatchesNumericStateUpToOmegaTThirty) {
    const auto p = qnd::presets::variances();
    for (double th = 0.0; th <= 30.0; th += 2.5) {
        const double t = th / p.omega;
        const auto n = qnd::hp_conditional_state_numeric(p, 20, 20, t, qnd::hp_vacuum(8));
        const auto c = qnd::hp_conditional_state_closed_perfect(p, t);
        const int d = static_cast<int>(std::max(n.amplitudes.size(), c.state.amplitudes.size()));
        EXPECT_GT(qnd::fidelity(padded(n.amplitudes, d), padded(c.state.amplitudes, d)), 0.999) << th;
    }
}

TEST(ClosedPerfect, RegimeWarningTracksHalfThreshold) {
    // |x| = 2c/(1+4c) approaches 1/2 from below, so the flag stays clear at any finite c
    const auto p = qnd::presets::variances();
    for (double th : {0.0, 63.2, 300.0, 1000.0}) {
        const double t = th / p.omega;
        EXPECT_LT(std::abs(qnd::closed_form_x(p, t)), 0.5);
        EXPECT_FALSE(qnd::hp_conditional_state_closed_perfect(p, t).regime_warning) << th;
    }
    EXPECT_NEAR(std::abs(qnd::closed_form_x(p, 1e6 / p.omega)), 0.5, 1e-8);
}

TEST(ClosedImperfect, ZeroAlphaReducesToPerfectCase) {
    const auto p = qnd::presets::variances();
    for (double th : {0.0, 10.0, 30.0}) {
        const auto a = qnd::hp_conditional_state_closed_imperfect(p, th / p.omega);
        const auto b = qnd::hp_conditional_state_closed_perfect(p, th / p.omega);
        ASSERT_EQ(a.state.amplitudes.size(), b.state.amplitudes.size());
        EXPECT_LT((a.state.amplitudes - b.state.amplitudes).norm(), 1e-15);
    }
}

TEST(ClosedImperfect, InitialStateIsEvenAndVacuumDominated) {
    const auto r = qnd::hp_conditional_state_closed_imperfect(qnd::presets::imperfect_small(), 0.0);
    EXPECT_GT(std::norm(r.state.amplitudes(0)), 0.99);
    EXPECT_EQ(qnd::odd_mass(r.state), 0.0);
}

TEST(ClosedImperfect, RejectsLargeExcitedFraction) {
    auto p = qnd::presets::variances();
    p.alpha = 0.1;
    p.beta = std::sqrt(0.99);
    EXPECT_THROW((void)qnd::hp_conditional_state_closed_imperfect(p, 1.0), qnd::InvalidArgument);
}

TEST(ClosedImperfect, MatchesEvenSectorOfNumericState) {
    // the closed form keeps the even-level part of the conditioned coherent input
    const auto p = qnd::presets::imperfect_small();
    const qnd::HPState init = qnd::hp_coherent(std::sqrt(200.0) * p.alpha, 8);
    for (double th = 0.0; th <= 30.0; th += 5.0) {
        const double t = th / p.omega;
        auto n = qnd::hp_conditional_state_numeric(p, 20, 20, t, init);
        for (int m = 1; m < n.amplitudes.size(); m += 2) n.amplitudes(m) = 0.0;
        const auto c = qnd::hp_conditional_state_closed_imperfect(p, t);
        const int d = static_cast<int>(std::max(n.amplitudes.size(), c.state.amplitudes.size()));
        EXPECT_GT(qnd::fidelity(padded(n.amplitudes, d), padded(c.state.amplitudes, d)), 0.995) << th;
    }
}

TEST(DetectionProbability, InitialTimeIsPoissonSquared) {
    const auto p = qnd::presets::variances();
    const double pois = boost::math::pdf(boost::math::poisson_distribution<>(20.0), 20);
    EXPECT_NEAR(qnd::detection_probability_hp(p, 20, 20, 0.0) / (pois * pois), 1.0, 1e-12);
    const auto tr = qnd::evolve_exact(p, {0.0});
    EXPECT_NEAR(qnd::detection_probability_hp(p, 20, 20, 0.0) / qnd::outcome_distribution(tr, 0, p).probability(20, 20),
                1.0, 1e-10);
}

TEST(DetectionProbability, PositiveAndDecreasingInTime) {
    const auto p = qnd::presets::variances();
    double prev = 2.0;
    for (double th = 0.0; th <= 300.0; th += 10.0) {
        const double v = qnd::detection_probability_hp(p, 20, 20, th / p.omega);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_GT(qnd::detection_probability_hp(p, 0, 0, 1.0), 0.0);
    EXPECT_GT(qnd::detection_probability_hp(p, 3, 31, 1.0), 0.0);
}

TEST(HPMoments, VacuumIsAtShotNoise) {
    const auto m = qnd::hp_moments(qnd::hp_vacuum(10), 200);
    EXPECT_NEAR(m.mean_x, 0.0, 1e-15);
    EXPECT_NEAR(m.mean_p, 0.0, 1e-15);
    EXPECT_NEAR(m.var_x, 1.0, 1e-15);
    EXPECT_NEAR(m.var_p, 1.0, 1e-15);
}

TEST(HPMoments, EvenParityStatesHaveZeroMeans) {
    const auto p = qnd::presets::variances();
    const auto s = qnd::hp_conditional_state_closed_perfect(p, 40.0 / p.omega).state;
    const auto m = qnd::hp_moments(s, p.N);
    EXPECT_EQ(m.mean_x, 0.0);
    EXPECT_EQ(m.mean_p, 0.0);
}

TEST(HPMoments, CoherentStateMeanIsTwoAlpha) {
    const double a = 0.01;
    const auto m = qnd::hp_moments(qnd::hp_coherent(std::sqrt(200.0) * a, 40), 200);
    EXPECT_NEAR(m.mean_x, 2.0 * a, 1e-12);
    EXPECT_NEAR(m.mean_p, 0.0, 1e-14);
    EXPECT_NEAR(m.var_x, 1.0, 1e-10);
}

TEST(HPMoments, HeisenbergBoundHoldsForConditionalStates) {
    const auto p = qnd::presets::imperfect_large();
    const qnd::HPState init = qnd::hp_coherent(std::sqrt(200.0) * p.alpha, 8);
    for (double th = 0.0; th <= 80.0; th += 8.0) {
        const auto s = qnd::hp_conditional_state_numeric(p, 18, 23, th / p.omega, init);
        EXPECT_GE(qnd::hp_moments(s, p.N).product(), 1.0 - 1e-9) << th;
    }
}

TEST(HPMoments, RejectsUnnormalizedState) {
    qnd::HPState s = qnd::hp_vacuum(4);
    s.amplitudes(0) = 2.0;
    EXPECT_THROW((void)qnd::hp_moments(s, 10), qnd::InvalidArgument);
}

}  // namespace

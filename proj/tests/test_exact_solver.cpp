// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include <qnd/exact_solver.hpp>

namespace {

using qnd::Basis;
using qnd::cplx;

qnd::SystemParams free_params(int N, double alpha) {
    qnd::SystemParams p = qnd::presets::base(N, 20.0);
    p.g = 0.0;
    p.alpha = alpha;
    p.beta = std::sqrt(1.0 - alpha * alpha);
    return p;
}

TEST(EvolveExact, InitialStateIsRotatedGroundState) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, {0.0});
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k <= p.N; ++k) {
        // √C(N,k)(1/√2)^k(−1/√2)^{N−k}
        const double mag = std::exp(0.5 * qnd::log_binom(p.N, k) + p.N * std::log(r));
        const double sign = ((p.N - k) % 2 == 0) ? 1.0 : -1.0;
        EXPECT_NEAR(std::abs(tr.psi[0](k) - sign * mag), 0.0, 1e-14) << k;
    }
}

TEST(EvolveExact, NoCouplingLeavesPolarizedStateUnsqueezed) {
    const auto p = free_params(50, 0.0);
    const auto grid = qnd::omega_t_grid(p, 40.0, 8);
    const auto tr = qnd::evolve_exact(p, grid);
    const auto m = qnd::build_spin_matrices(p.N);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto mo = qnd::exact_moments(tr.state(i), m);
        EXPECT_NEAR(mo.var_x, 1.0, 1e-9);
        EXPECT_NEAR(mo.var_p, 1.0, 1e-9);
    }
}

TEST(EvolveExact, NoCouplingGivesFreePrecessionAtOmega) {
    const double a = 0.1, b = std::sqrt(0.99);
    const auto p = free_params(40, a);
    const auto grid = qnd::omega_t_grid(p, 12.0, 24);
    const auto tr = qnd::evolve_exact(p, grid);
    const auto m = qnd::build_spin_matrices(p.N);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double th = p.omega * grid[i];
        const auto s = tr.state(i);
        // oracle: rotation about z at rate Ω of a Bloch vector of length N/2
        EXPECT_NEAR(qnd::expectation(s, m.Jx).real(), p.N * a * b * std::cos(th), 1e-8) << th;
        EXPECT_NEAR(std::abs(qnd::expectation(s, m.Jy).real()), p.N * a * b * std::abs(std::sin(th)), 1e-8)
            << th;
    }
}

TEST(EvolveExact, NormIsConservedOnVariancePreset) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, qnd::omega_t_grid(p, 300.0, 30));
    EXPECT_LE(tr.max_norm_drift, 1e-8);
    for (const auto& v : tr.psi) EXPECT_NEAR(v.squaredNorm(), 1.0, 1e-8);
}

TEST(EvolveExact, StepHalvingChangesVarianceByLessThan1e6) {
    const auto p = qnd::presets::variances();
    const auto grid = qnd::omega_t_grid(p, 150.0, 15);
    qnd::EvolveOptions half;
    half.dtheta = 0.0025;
    const auto a = qnd::evolve_exact(p, grid);
    const auto b = qnd::evolve_exact(p, grid, half);
    const auto m = qnd::build_spin_matrices(p.N);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double va = qnd::exact_moments(qnd::conditional_state_exact(a.state(i), p, grid[i], 20, 20), m).var_x;
        const double vb = qnd::exact_moments(qnd::conditional_state_exact(b.state(i), p, grid[i], 20, 20), m).var_x;
        EXPECT_LT(std::abs(va - vb), 1e-6) << p.omega * grid[i];
    }
}

TEST(EvolveExact, TridiagonalAndSpinorIntegratorsAgree) {
    auto p = qnd::presets::base(12, 4.0);
    p.g = 0.05 * p.omega;
    const auto grid = qnd::omega_t_grid(p, 20.0, 10);
    qnd::EvolveOptions tri;
    tri.integrator = qnd::Integrator::Tridiagonal;
    tri.dtheta = 0.002;
    tri.norm_tol = 1e-6;
    const auto a = qnd::evolve_exact(p, grid);
    const auto b = qnd::evolve_exact(p, grid, tri);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LT((a.psi[i] - b.psi[i]).norm(), 1e-6) << i;
}

TEST(EvolveExact, RejectsBadGrids) {
    const auto p = qnd::presets::variances();
    EXPECT_THROW((void)qnd::evolve_exact(p, {}), qnd::InvalidArgument);
    EXPECT_THROW((void)qnd::evolve_exact(p, {0.0, 2.0, 1.0}), qnd::InvalidArgument);
    EXPECT_THROW((void)qnd::evolve_exact(p, {1.0, 2.0}), qnd::InvalidArgument);
}

TEST(CoherentLabels, InitialLabelsAreTheInputAmplitudes) {
    const auto p = qnd::presets::variances();
    for (int k : {0, 37, 200}) {
        const auto l = qnd::coherent_labels(p, k, 0.0);
        EXPECT_EQ(l.alpha_kl, p.alpha_l);
        EXPECT_EQ(l.alpha_kr, p.alpha_r);
    }
}

TEST(CoherentLabels, CentralLabelNeverMoves) {
    const auto p = qnd::presets::variances();
    for (double t : {1.0, 50.0, 400.0}) {
        const auto l = qnd::coherent_labels(p, p.N / 2, t);
        EXPECT_NEAR(std::abs(l.alpha_kl - p.alpha_l), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(l.alpha_kr - p.alpha_r), 0.0, 1e-15);
    }
}

TEST(CoherentLabels, PhaseArithmeticAtOmegaTTen) {
    const auto p = qnd::presets::variances();
    const double t = 10.0 / p.omega;
    const auto l = qnd::coherent_labels(p, 0, t);
    const double expected = 0.5 * p.N * p.g * t;  // = 0.5 rad
    EXPECT_NEAR(expected, 0.5, 1e-14);
    EXPECT_NEAR(std::abs(l.alpha_kl - p.alpha_l * std::polar(1.0, expected)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(l.alpha_kl), std::abs(p.alpha_l), 1e-13);
    EXPECT_NEAR(std::abs(l.alpha_kr), std::abs(p.alpha_r), 1e-13);
}

TEST(OutcomeDistribution, InitialDistributionIsPoissonProduct) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, {0.0});
    const auto od = qnd::outcome_distribution(tr, 0, p);
    for (int nc = 0; nc <= od.max_photons; ++nc)
        for (int nd = 0; nd <= od.max_photons; ++nd) {
            const double oracle = boost::math::pdf(boost::math::poisson_distribution<>(20.0), nc) *
                                  boost::math::pdf(boost::math::poisson_distribution<>(20.0), nd);
            if (oracle > 1e-12) {
                EXPECT_NEAR(od.probability(nc, nd) / oracle, 1.0, 1e-10);
            }
        }
}

TEST(OutcomeDistribution, NormalizedAndNonNegativeAtLaterTimes) {
    const auto p = qnd::presets::variances();
    const auto grid = qnd::omega_t_grid(p, 300.0, 6);
    const auto tr = qnd::evolve_exact(p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto od = qnd::outcome_distribution(tr, i, p);
        EXPECT_NEAR(od.total(), 1.0, 1e-6);
        EXPECT_LT(od.tail_mass, 1e-9);
        EXPECT_GE(od.log_p.array().exp().minCoeff(), 0.0);
    }
}

TEST(OutcomeDistribution, TooSmallCutoffIsReported) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, {0.0});
    EXPECT_THROW((void)qnd::outcome_distribution(tr, 0, p, 25), qnd::CutoffError);
}

TEST(ConditionalState, InitialTimeLeavesStateUnchanged) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, {0.0});
    for (auto [nc, nd] : {std::pair{20, 20}, std::pair{3, 31}, std::pair{0, 0}}) {
        const auto s = qnd::conditional_state_exact(tr.state(0), p, 0.0, nc, nd);
        EXPECT_NEAR(std::abs(s.amplitudes.dot(tr.psi[0])), 1.0, 1e-12);
    }
}

TEST(ConditionalState, BalancedOutcomeSqueezesAtOmegaTThirty) {
    const auto p = qnd::presets::variances();
    const double t = 30.0 / p.omega;
    const auto tr = qnd::evolve_exact(p, {0.0, t});
    const auto m = qnd::build_spin_matrices(p.N);
    const auto mo = qnd::exact_moments(qnd::conditional_state_exact(tr.state(1), p, t, 20, 20), m);
    EXPECT_LT(mo.var_x, 1.0);
    EXPECT_LT(mo.max_imag, 1e-10);
}

TEST(ConditionalState, MirrorOutcomesGiveEqualSqueezing) {
    const auto p = qnd::presets::variances();
    const auto grid = qnd::omega_t_grid(p, 90.0, 6);
    const auto tr = qnd::evolve_exact(p, grid);
    const auto m = qnd::build_spin_matrices(p.N);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto a = qnd::exact_moments(qnd::conditional_state_exact(tr.state(i), p, grid[i], 17, 24), m);
        const auto b = qnd::exact_moments(qnd::conditional_state_exact(tr.state(i), p, grid[i], 24, 17), m);
        EXPECT_NEAR(a.var_x, b.var_x, 1e-9);
    }
}

TEST(ConditionalState, ProbabilityMatchesOutcomeDistribution) {
    const auto p = qnd::presets::variances();
    const double t = 40.0 / p.omega;
    const auto tr = qnd::evolve_exact(p, {0.0, t});
    const auto od = qnd::outcome_distribution(tr, 1, p);
    double lp = 0.0;
    (void)qnd::conditional_state_exact(tr.state(1), p, t, 18, 23, &lp);
    EXPECT_NEAR(std::exp(lp) / od.probability(18, 23), 1.0, 1e-10);
}

TEST(ConditionalState, ImprobableOutcomeIsRejected) {
    const auto p = qnd::presets::variances();
    const auto tr = qnd::evolve_exact(p, {0.0});
    EXPECT_THROW((void)qnd::conditional_state_exact(tr.state(0), p, 0.0, 2000, 0), qnd::ImprobableOutcome);
}

TEST(ExactMoments, PolarizedStateIsAtShotNoise) {
    const auto p = free_params(60, 0.0);
    const auto mo = qnd::exact_moments(qnd::spin_coherent_state(p), qnd::build_spin_matrices(60));
    EXPECT_NEAR(mo.mean_x, 0.0, 1e-12);
    EXPECT_NEAR(mo.mean_p, 0.0, 1e-12);
    EXPECT_NEAR(mo.var_x, 1.0, 1e-12);
    EXPECT_NEAR(mo.var_p, 1.0, 1e-12);
}

TEST(ExactMoments, MaximalJxEigenstate) {
    const double r = 1.0 / std::sqrt(2.0);
    auto p = free_params(30, r);
    const auto mo = qnd::exact_moments(qnd::spin_coherent_state(p), qnd::build_spin_matrices(30));
    EXPECT_NEAR(mo.mean_x, 1.0, 1e-12);
    EXPECT_NEAR(mo.var_x, 0.0, 1e-12);
}

TEST(ExactMoments, SpinCoherentMeanIsTwoAlphaBeta) {
    const auto p = free_params(200, 0.1);
    const auto mo = qnd::exact_moments(qnd::spin_coherent_state(p), qnd::build_spin_matrices(200));
    EXPECT_NEAR(mo.mean_x, 2.0 * 0.1 * std::sqrt(0.99), 1e-12);
}

TEST(ExactMoments, RejectsBasisMismatch) {
    const auto p = free_params(10, 0.0);
    EXPECT_THROW((void)qnd::exact_moments(qnd::spin_coherent_state(p, Basis::JzFock), qnd::build_spin_matrices(10)),
                 qnd::InvalidArgument);
}

}  // namespace

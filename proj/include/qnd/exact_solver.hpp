// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file exact_solver.hpp
 * @brief Exact atom-light evolution with coherent light labels, beamsplitter
 *        recombination, photon-count statistics and conditioning.
 *
 * The joint state is Σ_k ψ_k(t)|k⟩|α_{k,l}(t)⟩|α_{k,r}(t)⟩ with |k⟩ a Jx
 * eigenstate. The amplitudes obey the tridiagonal system
 *
 *   i dψ_k/dt = Ω/2 [√(k(N−k+1)) ⟨α_k|α_{k−1}⟩ ψ_{k−1}
 *                   + √((k+1)(N−k)) ⟨α_k|α_{k+1}⟩ ψ_{k+1}].
 *
 * The light overlaps do not depend on k, so the generator is
 * Ω/2 (o* L+ + o L−), an element of su(2). Its flow is the N-fold symmetric
 * power of a two-level flow; the default integrator evolves that spinor and
 * lifts it. The direct tridiagonal RK4 route is kept for cross-checks.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "log_math.hpp"
#include "moments.hpp"
#include "spin_algebra.hpp"

namespace qnd {

enum class Integrator {
    Su2Spinor,    ///< two-level Magnus integrator, lifted to N+1 amplitudes
    Tridiagonal,  ///< RK4 on the full amplitude vector
};

struct EvolveOptions {
    Integrator integrator = Integrator::Su2Spinor;
    double dtheta = 0.005;   // Ω·dt
    double norm_tol = 1e-8;  // allowed drift over the whole run
    int max_halvings = 12;
};

struct ExactTrajectory {
    std::vector<double> times;          // physical t
    std::vector<Eigen::VectorXcd> psi;  // Jx-basis amplitudes per time
    double max_norm_drift = 0.0;
    Integrator integrator = Integrator::Su2Spinor;
    double dtheta_used = 0.0;  // smallest accepted Ω·dt

    [[nodiscard]] AtomStateVector state(std::size_t i) const {
        return {psi.at(i), Basis::JxEigen};
    }
};

struct CoherentLabels {
    cplx alpha_kl;
    cplx alpha_kr;
};

[[nodiscard]] inline CoherentLabels coherent_labels(const SystemParams& p, int k, double t) {
    if (k < 0 || k > p.N) throw InvalidArgument("coherent_labels: k out of range");
    const double ph = 0.5 * (2.0 * k - p.N) * p.g * t;
    return {p.alpha_l * std::polar(1.0, -ph), p.alpha_r * std::polar(1.0, ph)};
}

/** ⟨α_k|α_{k+1}⟩, identical for every k. */
[[nodiscard]] inline cplx light_overlap_up(const SystemParams& p, double t) {
    const double gt = p.g * t;
    const double il = std::norm(p.alpha_l), ir = std::norm(p.alpha_r);
    return std::exp(-(il + ir) + il * std::polar(1.0, -gt) + ir * std::polar(1.0, gt));
}

namespace detail {

struct Spinor {
    cplx up, dn;  // weights of b+ and b−
};

inline Spinor spinor_rhs(const SystemParams& p, double t, const Spinor& c) {
    const cplx ovp = light_overlap_up(p, t);
    const cplx f(0.0, -0.5 * p.omega);
    return {f * std::conj(ovp) * c.dn, f * ovp * c.up};
}

/** Generator M(t) with dc/dt = M c; anti-Hermitian and traceless. */
struct Gen2 {
    cplx m12, m21;  // diagonal is zero for a single generator
};

inline Gen2 spinor_gen(const SystemParams& p, double t) {
    const cplx ovp = light_overlap_up(p, t);
    const cplx f(0.0, -0.5 * p.omega);
    return {f * std::conj(ovp), f * ovp};
}

/**
 * Fourth-order Magnus step, exp(Ω1 + Ω2) with two Gauss nodes. The 2×2
 * exponential is evaluated in closed form, so each step is unitary.
 */
inline Spinor magnus4_step(const SystemParams& p, double t, double dt, const Spinor& c) {
    const double h = dt / (2.0 * std::sqrt(3.0));
    const Gen2 a1 = spinor_gen(p, t + 0.5 * dt - h), a2 = spinor_gen(p, t + 0.5 * dt + h);
    // Ω1 = dt/2 (A1 + A2), Ω2 = √3 dt²/12 [A2, A1]; the commutator is diagonal
    const cplx k = std::sqrt(3.0) * dt * dt / 12.0;
    const cplx d = k * (a2.m12 * a1.m21 - a1.m12 * a2.m21);
    const cplx m12 = 0.5 * dt * (a1.m12 + a2.m12), m21 = 0.5 * dt * (a1.m21 + a2.m21);
    // M² = (d² + m12 m21) I = −w² I
    const cplx w2 = -(d * d + m12 * m21);
    const double w = std::sqrt(std::max(0.0, w2.real()));
    const double cw = std::cos(w), sw = w > 0.0 ? std::sin(w) / w : 1.0;
    return {cw * c.up + sw * (d * c.up + m12 * c.dn), cw * c.dn + sw * (m21 * c.up - d * c.dn)};
}

inline void tridiag_rhs(const SystemParams& p, double t, const Eigen::VectorXd& coup,
                        const Eigen::VectorXcd& x, Eigen::VectorXcd& out) {
    const cplx ovp = light_overlap_up(p, t);
    const cplx ovm = std::conj(ovp);
    const cplx f(0.0, -0.5 * p.omega);
    const int N = p.N;
    out.setZero(N + 1);
    for (int k = 0; k < N; ++k) {
        out(k + 1) += coup(k) * ovm * x(k);
        out(k) += coup(k) * ovp * x(k + 1);
    }
    out *= f;
}

/** Norm of the lifted state, (|c+|² + |c−|²)^N. */
inline double lifted_norm(const Spinor& c, int N) {
    return std::exp(N * std::log(std::norm(c.up) + std::norm(c.dn)));
}

/**
 * Advances from t0 to t1 in equal substeps, halving the step whenever the
 * segment spends more than its share of the drift budget.
 */
template <class State, class Step, class Norm>
void advance(State& x, double t0, double t1, const SystemParams& p, const EvolveOptions& o,
             double theta_total, Step step, Norm norm_of, double& dtheta_used) {
    const double span = p.omega * (t1 - t0);
    if (span <= 0.0) return;
    long n = std::max(1L, static_cast<long>(std::ceil(span / o.dtheta - 1e-9)));
    for (int halving = 0;; ++halving) {
        const double dt = (t1 - t0) / static_cast<double>(n);
        const double budget = o.norm_tol * span / std::max(theta_total, 1e-300);
        State y = x;
        const double nrm = norm_of(y);
        bool ok = true;
        for (long s = 0; s < n && ok; ++s) {
            y = step(t0 + s * dt, dt, y);
            ok = std::abs(norm_of(y) - nrm) <= budget;
        }
        if (ok) {
            x = y;
            dtheta_used = dtheta_used == 0.0 ? p.omega * dt : std::min(dtheta_used, p.omega * dt);
            return;
        }
        if (halving >= o.max_halvings)
            throw NormDriftError("evolve_exact: step rejected, norm drift exceeds tolerance");
        n *= 2;
    }
}

}  // namespace detail

/** Lifts a two-level spinor to ψ_k = √C(N,k) c+^k c−^{N−k}. */
[[nodiscard]] inline Eigen::VectorXcd lift_spinor(int N, cplx up, cplx dn) {
    return binomial_product_state(N, up, dn);
}

/**
 * Solves the amplitude equations on the requested grid of physical times.
 * The grid must start at 0 and increase monotonically.
 */
[[nodiscard]] inline ExactTrajectory evolve_exact(const SystemParams& p,
                                                  const std::vector<double>& t_grid,
                                                  const EvolveOptions& opt = {}) {
    p.validate();
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw InvalidArgument("evolve_exact: time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw InvalidArgument("evolve_exact: time grid must increase");
    if (!(opt.dtheta > 0.0)) throw InvalidArgument("evolve_exact: dtheta must be > 0");

    ExactTrajectory tr;
    tr.times = t_grid;
    tr.integrator = opt.integrator;
    const double theta_total = p.omega * t_grid.back();
    const int N = p.N;
    const double r = 1.0 / std::sqrt(2.0);

    if (opt.integrator == Integrator::Su2Spinor) {
        detail::Spinor c{(p.alpha + p.beta) * r, (p.alpha - p.beta) * r};
        const double n0 = detail::lifted_norm(c, N);
        auto step = [&](double t, double dt, const detail::Spinor& y) {
            return detail::magnus4_step(p, t, dt, y);
        };
        auto norm_of = [&](const detail::Spinor& y) { return detail::lifted_norm(y, N); };
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            if (i > 0)
                detail::advance(c, t_grid[i - 1], t_grid[i], p, opt, theta_total, step, norm_of,
                                tr.dtheta_used);
            tr.psi.push_back(lift_spinor(N, c.up, c.dn));
            tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(norm_of(c) - n0));
        }
        return tr;
    }

    Eigen::VectorXd coup(N);
    for (int k = 0; k < N; ++k) coup(k) = std::sqrt(static_cast<double>(k + 1) * (N - k));
    Eigen::VectorXcd x = spin_coherent_state(p, Basis::JxEigen).amplitudes;
    const double n0 = x.squaredNorm();
    Eigen::VectorXcd k1, k2, k3, k4;
    auto step = [&](double t, double dt, const Eigen::VectorXcd& y) {
        detail::tridiag_rhs(p, t, coup, y, k1);
        detail::tridiag_rhs(p, t + 0.5 * dt, coup, y + 0.5 * dt * k1, k2);
        detail::tridiag_rhs(p, t + 0.5 * dt, coup, y + 0.5 * dt * k2, k3);
        detail::tridiag_rhs(p, t + dt, coup, y + dt * k3, k4);
        Eigen::VectorXcd out = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return out;
    };
    auto norm_of = [](const Eigen::VectorXcd& y) { return y.squaredNorm(); };
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0)
            detail::advance(x, t_grid[i - 1], t_grid[i], p, opt, theta_total, step, norm_of,
                            tr.dtheta_used);
        tr.psi.push_back(x);
        tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(x.squaredNorm() - n0));
    }
    return tr;
}

/** Uniform grid of physical times for Ωt = 0, Δ, 2Δ, ..., theta_max. */
[[nodiscard]] inline std::vector<double> omega_t_grid(const SystemParams& p, double theta_max,
                                                      int steps) {
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) t[i] = theta_max * i / steps / p.omega;
    return t;
}

/** Per-k output amplitudes c_k = (α_{k,l} + iα_{k,r})/√2, d_k = (iα_{k,l} + α_{k,r})/√2. */
struct DetectorAmplitudes {
    cplx c, d;
};

[[nodiscard]] inline DetectorAmplitudes beamsplitter(const CoherentLabels& lab) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    return {(lab.alpha_kl + i * lab.alpha_kr) * r, (i * lab.alpha_kl + lab.alpha_kr) * r};
}

struct OutcomeDistribution {
    int max_photons = 0;     // per detector, inclusive
    Eigen::MatrixXd log_p;   // (n_c, n_d)
    double tail_mass = 0.0;  // probability outside the grid

    [[nodiscard]] double probability(int nc, int nd) const {
        if (nc < 0 || nd < 0 || nc > max_photons || nd > max_photons) return 0.0;
        return std::exp(log_p(nc, nd));
    }
    [[nodiscard]] double total() const { return log_p.array().exp().sum(); }
};

/** Grid cutoff mean + 8√mean for the largest per-k detector mean. */
[[nodiscard]] inline int default_photon_cutoff(const SystemParams& p, double t) {
    double m = 0.0;
    for (int k = 0; k <= p.N; ++k) {
        const auto a = beamsplitter(coherent_labels(p, k, t));
        m = std::max({m, std::norm(a.c), std::norm(a.d)});
    }
    return static_cast<int>(std::ceil(m + 8.0 * std::sqrt(m))) + 1;
}

/**
 * P(n_c, n_d) = Σ_k |ψ_k|² Poisson(n_c; |c_k|²) Poisson(n_d; |d_k|²).
 * cutoff < 0 selects default_photon_cutoff. Throws CutoffError when the mass
 * beyond the grid exceeds tail_tol.
 */
[[nodiscard]] inline OutcomeDistribution outcome_distribution(const AtomStateVector& psi,
                                                              const SystemParams& p, double t,
                                                              int cutoff = -1,
                                                              double tail_tol = 1e-9) {
    if (psi.basis != Basis::JxEigen || psi.N() != p.N)
        throw InvalidArgument("outcome_distribution: expects a Jx-basis state of size N+1");
    const int M = cutoff < 0 ? default_photon_cutoff(p, t) : cutoff;
    OutcomeDistribution od;
    od.max_photons = M;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M + 1, M + 1);
    Eigen::VectorXd pc(M + 1), pd(M + 1);
    double tail = 0.0;
    for (int k = 0; k <= p.N; ++k) {
        const double w = std::norm(psi.amplitudes(k));
        if (w == 0.0) continue;
        const auto a = beamsplitter(coherent_labels(p, k, t));
        const double mc = std::norm(a.c), md = std::norm(a.d);
        for (int n = 0; n <= M; ++n) {
            pc(n) = std::exp(log_poisson(n, mc));
            pd(n) = std::exp(log_poisson(n, md));
        }
        P.noalias() += w * pc * pd.transpose();
        const double qc = poisson_upper_tail(M, mc), qd = poisson_upper_tail(M, md);
        tail += w * (qc + qd - qc * qd);
    }
    od.log_p = P.array().log().matrix();
    od.tail_mass = tail;
    if (tail > tail_tol)
        throw CutoffError("outcome_distribution: photon cutoff leaves tail mass " +
                          std::to_string(tail));
    return od;
}

/** Trajectory overload, time selected by index. */
[[nodiscard]] inline OutcomeDistribution outcome_distribution(const ExactTrajectory& tr,
                                                              std::size_t i,
                                                              const SystemParams& p,
                                                              int cutoff = -1) {
    return outcome_distribution(tr.state(i), p, tr.times.at(i), cutoff);
}

/**
 * Atomic state after n_c, n_d clicks:
 *   ψ_k e^{−(|α_{k,l}|²+|α_{k,r}|²)/2} c_k^{n_c} d_k^{n_d}, normalized.
 * Integer powers are taken in log-magnitude/phase form, so no branch choice
 * is involved.
 */
[[nodiscard]] inline AtomStateVector conditional_state_exact(const AtomStateVector& psi,
                                                             const SystemParams& p, double t,
                                                             int nc, int nd,
                                                             double* log_probability = nullptr) {
    if (psi.basis != Basis::JxEigen || psi.N() != p.N)
        throw InvalidArgument("conditional_state_exact: expects a Jx-basis state of size N+1");
    if (nc < 0 || nd < 0) throw InvalidArgument("conditional_state_exact: negative counts");
    const int d = p.N + 1;
    std::vector<LogComplex> terms(d);
    double top = kNegInf;
    for (int k = 0; k < d; ++k) {
        const auto lab = coherent_labels(p, k, t);
        const auto a = beamsplitter(lab);
        LogComplex w = LogComplex::from(psi.amplitudes(k)) * LogComplex::from(a.c).pow(nc) *
                       LogComplex::from(a.d).pow(nd);
        if (!w.is_zero()) w.log_mag -= 0.5 * (std::norm(lab.alpha_kl) + std::norm(lab.alpha_kr));
        terms[k] = w;
        top = std::max(top, w.log_mag);
    }
    if (top == kNegInf) throw ImprobableOutcome("conditional_state_exact: zero-probability outcome");
    AtomStateVector out;
    out.basis = Basis::JxEigen;
    out.amplitudes.resize(d);
    for (int k = 0; k < d; ++k) out.amplitudes(k) = terms[k].value(top);
    const double s = out.amplitudes.squaredNorm();
    const double logP = 2.0 * top + std::log(s) - log_factorial(nc) - log_factorial(nd);
    if (logP < std::log(1e-300))
        throw ImprobableOutcome("conditional_state_exact: outcome probability below 1e-300");
    if (log_probability) *log_probability = logP;
    out.amplitudes /= std::sqrt(s);
    return out;
}

/** J̄ = (2/N)⟨J⟩ and ΔJ̄ = (4/N)(⟨J²⟩ − ⟨J⟩²) for the x and y components. */
[[nodiscard]] inline MomentSet exact_moments(const AtomStateVector& s, const SpinMatrices& m) {
    if (s.basis != m.basis) throw InvalidArgument("exact_moments: basis mismatch");
    if (s.amplitudes.size() != m.Jx.rows())
        throw InvalidArgument("exact_moments: dimension mismatch");
    const double N = m.N();
    MomentSet r;
    r.engine = "exact";
    auto one = [&](const Eigen::MatrixXcd& J, double& mean, double& var) {
        const Eigen::VectorXcd Jv = J * s.amplitudes;
        const cplx m1 = s.amplitudes.dot(Jv);
        const cplx m2 = Jv.dot(Jv);
        r.max_imag = std::max(r.max_imag, std::abs(m1.imag()));
        mean = 2.0 / N * m1.real();
        var = 4.0 / N * (m2.real() - m1.real() * m1.real());
    };
    one(m.Jx, r.mean_x, r.var_x);
    one(m.Jy, r.mean_p, r.var_p);
    return r;
}

}  // namespace qnd

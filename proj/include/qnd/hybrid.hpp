// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hybrid.hpp
 * @brief Conditional states of the excited mode within the Holstein-Primakoff
 *        approximation: operator disentangling, the numeric n_l sum and the
 *        short-time closed forms.
 *
 * For a photon-number difference n = 2n_l − n_c − n_d the atomic propagator is
 * written in normal order as U = e^{ipb†} e^{iqb†b} e^{irb} e^{is}.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fourier.hpp"
#include "hp_state.hpp"
#include "log_math.hpp"
#include "spin_algebra.hpp"

namespace qnd {

enum class DisentangleMode { Exact, LeadingOrder };

[[nodiscard]] inline const char* to_string(DisentangleMode m) {
    return m == DisentangleMode::Exact ? "exact" : "leading-order";
}

struct DisentangledFactors {
    cplx p, q, r, s;
};

/**
 * Exact:         p = r = iκn(e^{iθ} − 1), q = θ, s = κ²n²(e^{iθ}/i − θ − 1/i).
 * Leading order: p = r = −θκn,           q = θ, s = −θ²κ²n²/(2i).
 */
[[nodiscard]] inline DisentangledFactors disentangle(double theta, double kappa, int n,
                                                     DisentangleMode mode) {
    const cplx i(0.0, 1.0);
    const double kn = kappa * n;
    if (mode == DisentangleMode::Exact) {
        const cplx e = std::exp(i * theta);
        const cplx pr = i * kn * (e - 1.0);
        return {pr, theta, pr, kn * kn * (e / i - theta - 1.0 / i)};
    }
    return {-theta * kn, theta, -theta * kn, -theta * theta * kn * kn / (2.0 * i)};
}

/** e^{is} e^{ipb†} e^{iqb†b} e^{irb} on a truncated vector. */
[[nodiscard]] inline Eigen::VectorXcd apply_disentangled(const DisentangledFactors& f,
                                                         const Eigen::VectorXcd& v) {
    const cplx i(0.0, 1.0);
    Eigen::VectorXcd w = apply_exp_b(i * f.r, v);
    w = apply_number_phase(f.q, w);
    w = apply_exp_bdag(i * f.p, w);
    return std::exp(i * f.s) * w;
}

/**
 * U|z⟩ = exp(i(s + rz) − |z|²/2) Σ_m w^m/√m! |m⟩ with w = z e^{iq} + ip.
 * Returns the log prefactor and the label w.
 */
struct CoherentImage {
    LogComplex prefactor;
    cplx label;
};

[[nodiscard]] inline CoherentImage apply_disentangled_coherent(const DisentangledFactors& f, cplx z) {
    const cplx i(0.0, 1.0);
    const cplx lg = i * (f.s + f.r * z) - 0.5 * std::norm(z);
    return {{lg.real(), lg.imag()}, z * std::exp(i * f.q) + i * f.p};
}

struct HybridOptions {
    DisentangleMode mode = DisentangleMode::LeadingOrder;
    int initial_cutoff = 32;
    double tail_tol = 1e-10;
    double window_sigmas = 8.0;
};

/** Photon-count window [a − 8√σ, a + 8√σ] ∩ [0, n_c+n_d]; full range if σ is undefined. */
[[nodiscard]] inline std::pair<int, int> nl_window(const MeasurementOutcome& o, double sigmas) {
    const int S = o.nc + o.nd;
    if (!o.asymptotic_ok()) return {0, S};
    const double h = sigmas * std::sqrt(o.sigma);
    return {std::max(0, static_cast<int>(std::floor(o.a - h))),
            std::min(S, static_cast<int>(std::ceil(o.a + h)))};
}

namespace detail {

struct HybridTerm {
    LogComplex coef;  // weight times propagator prefactor
    cplx label;       // coherent label after propagation
};

/** Builds Σ_j coef_j Σ_m w_j^m/√m! |m⟩ on 0..n_max and a rigorous tail bound. */
inline HPState assemble_coherent_sum(const std::vector<HybridTerm>& terms, int n_max) {
    const int d = n_max + 1;
    std::vector<LogComplex> amp(d);
    double gtop = kNegInf;
    std::vector<LogComplex> row(terms.size());
    for (int m = 0; m < d; ++m) {
        double top = kNegInf;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            LogComplex t = terms[j].coef * LogComplex::from(terms[j].label).pow(m);
            if (!t.is_zero()) t.log_mag -= 0.5 * log_factorial(m);
            row[j] = t;
            top = std::max(top, t.log_mag);
        }
        cplx acc(0.0, 0.0);
        if (top != kNegInf)
            for (const auto& t : row) acc += t.value(top);
        LogComplex lc = LogComplex::from(acc);
        if (!lc.is_zero()) lc.log_mag += top;
        amp[m] = lc;
        gtop = std::max(gtop, lc.log_mag);
    }
    HPState s;
    s.amplitudes.resize(d);
    if (gtop == kNegInf) throw ImprobableOutcome("hybrid: conditional state vanishes");
    for (int m = 0; m < d; ++m) s.amplitudes(m) = amp[m].value(gtop);
    const double nrm2 = s.amplitudes.squaredNorm();
    // ‖P_tail ψ‖ ≤ Σ_j |coef_j| e^{|w_j|²/2} √(P(Poisson(|w_j|²) > n_max))
    double bound = 0.0;
    for (const auto& t : terms) {
        if (t.coef.is_zero()) continue;
        const double lam = std::norm(t.label);
        const double q = poisson_upper_tail(n_max, lam);
        if (q <= 0.0) continue;
        bound += std::exp(t.coef.log_mag + 0.5 * lam - gtop) * std::sqrt(q);
    }
    double last4 = 0.0;
    for (int m = std::max(0, d - 4); m < d; ++m) last4 += std::norm(s.amplitudes(m));
    s.tail_mass = std::max(bound * bound / nrm2, last4 / nrm2);
    s.amplitudes /= std::sqrt(nrm2);
    return s;
}

}  // namespace detail

/**
 * Σ_{n_l} e^{in_lφ} I(n_c,n_d,n_l) U(2n_l − n_c − n_d)|ψ0⟩, normalized.
 * Coherent (or vacuum) inputs are propagated in closed form and projected on
 * an adaptive Fock cutoff, doubled from initial_cutoff until the certified
 * tail mass is below tail_tol; the cutoff never exceeds N. Other inputs are
 * propagated by truncated series on their own grid.
 */
[[nodiscard]] inline HPState hp_conditional_state_numeric(const SystemParams& p, int nc, int nd,
                                                          double t, const HPState& initial,
                                                          const HybridOptions& o = {}) {
    p.validate();
    if (t < 0.0) throw InvalidArgument("hp_conditional_state_numeric: t must be >= 0");
    const double theta = p.omega * t, kap = p.kappa(), phi = p.light_phase();
    const MeasurementOutcome out = make_outcome(nc, nd, p.eta());
    const auto [lo, hi] = nl_window(out, o.window_sigmas);

    HPState res;
    if (initial.coherent_label) {
        const cplx z = *initial.coherent_label;
        std::vector<detail::HybridTerm> terms;
        for (int nl = lo; nl <= hi; ++nl) {
            const cplx I = fourier_coeff_sum(nc, nd, nl, p.eta());
            if (I == cplx(0.0, 0.0)) continue;
            const auto f = disentangle(theta, kap, 2 * nl - nc - nd, o.mode);
            const auto img = apply_disentangled_coherent(f, z);
            LogComplex w = LogComplex::from(I);
            w.phase += nl * phi;
            terms.push_back({w * img.prefactor, img.label});
        }
        if (terms.empty()) throw ImprobableOutcome("hp_conditional_state_numeric: empty n_l window");
        int nmax = std::min(o.initial_cutoff, p.N);
        for (;;) {
            res = detail::assemble_coherent_sum(terms, nmax);
            if (res.tail_mass < o.tail_tol) break;
            if (nmax >= p.N)
                {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.3e", res.tail_mass);
                throw CutoffError(std::string("hp_conditional_state_numeric: tail mass ") + buf +
                                  " at the N-level cap");
            }
            nmax = std::min(2 * nmax, p.N);
        }
    } else {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(initial.amplitudes.size());
        for (int nl = lo; nl <= hi; ++nl) {
            const cplx I = fourier_coeff_sum(nc, nd, nl, p.eta());
            if (I == cplx(0.0, 0.0)) continue;
            const auto f = disentangle(theta, kap, 2 * nl - nc - nd, o.mode);
            acc += std::polar(1.0, nl * phi) * I * apply_disentangled(f, initial.amplitudes);
        }
        const double n = acc.norm();
        if (!(n > 0.0)) throw ImprobableOutcome("hp_conditional_state_numeric: state vanishes");
        res.amplitudes = acc / n;
        res.tail_mass = std::norm(res.amplitudes(res.n_max()));
    }
    res.time_omega_t = theta;
    res.nc = nc;
    res.nd = nd;
    return res;
}

/** Short-time closed forms assume x ≡ 2c/(1+4c) < 1/2 with c = |α_r|²Ω²t²κ². */
[[nodiscard]] inline double closed_form_x(const SystemParams& p, double t) {
    const double c = p.squeeze_parameter(t);
    return -2.0 * c / (1.0 + 4.0 * c);
}

namespace detail {

/** log(√((2n)!)/n!). */
inline double log_even_ratio(int n) { return 0.5 * log_factorial(2L * n) - log_factorial(n); }

inline HPState even_state_from(const std::vector<cplx>& C, int N) {
    HPState s;
    const int levels = std::min(2 * (static_cast<int>(C.size()) - 1), N);
    s.amplitudes = Eigen::VectorXcd::Zero(levels + 1);
    for (std::size_t n = 0; n < C.size() && 2 * static_cast<int>(n) <= levels; ++n)
        s.amplitudes(2 * n) = C[n];
    return s;
}

}  // namespace detail

/** Closed-form state, renormalized; prefactor_norm keeps ‖ψ‖² before that step. */
struct ClosedFormState {
    HPState state;
    double prefactor_norm = 1.0;
    bool regime_warning = false;
};

/**
 * C_n ∝ √((2n)!)/n! · x^n on |2n⟩, n ≤ ⌊N/2⌋, with the closed-form prefactor
 * (1+8c)^{1/4}/√(1+4c). regime_warning is set when |x| ≥ 1/2.
 */
[[nodiscard]] inline ClosedFormState hp_conditional_state_closed_perfect(const SystemParams& p,
                                                                         double t) {
    p.validate();
    const double c = p.squeeze_parameter(t);
    const double x = closed_form_x(p, t);
    const double pref = std::pow(1.0 + 8.0 * c, 0.25) / std::sqrt(1.0 + 4.0 * c);
    const int nmax = p.N / 2;
    std::vector<cplx> C;
    for (int n = 0; n <= nmax; ++n) {
        LogComplex tn = LogComplex::from(x).pow(n);
        if (!tn.is_zero()) tn.log_mag += detail::log_even_ratio(n);
        C.push_back(pref * tn.value());
        if (n > 8 && std::norm(C.back()) < 1e-34 && std::norm(C.back()) <= std::norm(C[n - 1])) break;
    }
    ClosedFormState r;
    r.state = detail::even_state_from(C, p.N);
    r.prefactor_norm = r.state.norm();
    r.state.amplitudes /= std::sqrt(r.prefactor_norm);
    r.state.time_omega_t = p.omega * t;
    r.regime_warning = std::abs(x) >= 0.5;
    return r;
}

/**
 * Two-term amplitudes on |2n⟩:
 *   √((2n)!)/n! x^n + Nα² √((2n)!)/(2(n−1)!) x^{n−1} (e^{iΩt} − y)²,
 * y = 4c/(1+4c), with prefactor (1+8c)^{1/4}/√(1+4c)/√P_ε and
 * P_ε = 1 − N|α|²·4c/(1+8c)·cos(2Ωt + 2φ_α).
 */
[[nodiscard]] inline ClosedFormState hp_conditional_state_closed_imperfect(const SystemParams& p,
                                                                           double t) {
    p.validate();
    const double Na2 = p.N * std::norm(p.alpha);
    if (Na2 >= 1.0)
        throw InvalidArgument("hp_conditional_state_closed_imperfect: requires N|alpha|^2 < 1");
    const double theta = p.omega * t;
    const double c = p.squeeze_parameter(t);
    const double x = closed_form_x(p, t);
    const double y = 4.0 * c / (1.0 + 4.0 * c);
    const double Peps = 1.0 - Na2 * 4.0 * c / (1.0 + 8.0 * c) * std::cos(2.0 * theta + 2.0 * p.phase_alpha());
    const double pref = std::pow(1.0 + 8.0 * c, 0.25) / std::sqrt(1.0 + 4.0 * c) / std::sqrt(Peps);
    const cplx i(0.0, 1.0);
    const cplx Nalpha2 = static_cast<double>(p.N) * p.alpha * p.alpha;
    const cplx e = std::exp(i * theta) - y;
    const LogComplex second = LogComplex::from(Nalpha2 * e * e);
    const int nmax = p.N / 2;
    std::vector<cplx> C;
    for (int n = 0; n <= nmax; ++n) {
        LogComplex t1 = LogComplex::from(x).pow(n);
        if (!t1.is_zero()) t1.log_mag += detail::log_even_ratio(n);
        LogComplex t2;
        if (n >= 1) {
            t2 = second * LogComplex::from(x).pow(n - 1);
            if (!t2.is_zero())
                t2.log_mag += 0.5 * log_factorial(2L * n) - std::log(2.0) - log_factorial(n - 1);
        }
        C.push_back(pref * (t1.value() + t2.value()));
        if (n > 8 && std::norm(C.back()) < 1e-34 && std::norm(C.back()) <= std::norm(C[n - 1])) break;
    }
    ClosedFormState r;
    r.state = detail::even_state_from(C, p.N);
    r.prefactor_norm = r.state.norm();
    r.state.amplitudes /= std::sqrt(r.prefactor_norm);
    r.state.time_omega_t = theta;
    r.regime_warning = std::abs(x) >= 0.5;
    return r;
}

/**
 * Detection probability in the hybrid picture:
 * e^{−A}/(n_c! n_d!) (n_c/S)^{n_c} (n_d/S)^{n_d} A^S / √(1+8c),
 * with A = |α_l|² + |α_r|², S = n_c + n_d.
 */
[[nodiscard]] inline double detection_probability_hp(const SystemParams& p, int nc, int nd, double t) {
    if (nc < 0 || nd < 0) throw InvalidArgument("detection_probability_hp: negative count");
    const double A = p.total_intensity();
    const double S = nc + nd;
    double lg = -A - log_factorial(nc) - log_factorial(nd) -
                0.5 * std::log(1.0 + 8.0 * p.squeeze_parameter(t));
    if (S > 0) {
        if (nc > 0) lg += nc * std::log(nc / S);
        if (nd > 0) lg += nd * std::log(nd / S);
        lg += S * std::log(A);
    }
    return std::exp(lg);
}

}  // namespace qnd

// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hp_state.hpp
 * @brief Truncated Fock-space states of the excited mode in the
 *        Holstein-Primakoff picture, ladder-operator exponentials and moments.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "errors.hpp"
#include "log_math.hpp"
#include "moments.hpp"

namespace qnd {

struct HPState {
    Eigen::VectorXcd amplitudes;  // levels 0..n_max
    /// Set when the state is known to be the coherent state |z⟩ (up to truncation).
    std::optional<cplx> coherent_label;
    // metadata
    double time_omega_t = 0.0;
    int nc = -1, nd = -1;
    double tail_mass = 0.0;  // certified mass outside 0..n_max

    [[nodiscard]] int n_max() const { return static_cast<int>(amplitudes.size()) - 1; }
    [[nodiscard]] double norm() const { return amplitudes.squaredNorm(); }
};

[[nodiscard]] inline HPState hp_vacuum(int n_max) {
    HPState s;
    s.amplitudes = Eigen::VectorXcd::Zero(n_max + 1);
    s.amplitudes(0) = 1.0;
    s.coherent_label = cplx(0.0, 0.0);
    return s;
}

/** ⟨m|z⟩ = e^{−|z|²/2} z^m/√m! in the log domain. */
[[nodiscard]] inline LogComplex coherent_amplitude(cplx z, int m) {
    LogComplex t = LogComplex::from(z).pow(m);
    if (!t.is_zero()) t.log_mag += -0.5 * std::norm(z) - 0.5 * log_factorial(m);
    return t;
}

/** Coherent state |z⟩ truncated at n_max. tail_mass is the exact Poisson remainder. */
[[nodiscard]] inline HPState hp_coherent(cplx z, int n_max) {
    HPState s;
    s.amplitudes.resize(n_max + 1);
    for (int m = 0; m <= n_max; ++m) s.amplitudes(m) = coherent_amplitude(z, m).value();
    s.coherent_label = z;
    s.tail_mass = poisson_upper_tail(n_max, std::norm(z));
    return s;
}

/** Annihilation operator on levels 0..n_max as a dense matrix. */
[[nodiscard]] inline Eigen::MatrixXcd annihilation_matrix(int n_max) {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

/**
 * e^{c b} applied to a truncated vector:
 * (e^{cb}ψ)_n = Σ_j c^j/j! √((n+j)!/n!) ψ_{n+j}. Exact within the truncation.
 */
[[nodiscard]] inline Eigen::VectorXcd apply_exp_b(cplx c, const Eigen::VectorXcd& v) {
    const int d = static_cast<int>(v.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
    for (int n = 0; n < d; ++n) {
        cplx coef(1.0, 0.0);
        for (int j = 0; n + j < d; ++j) {
            if (j > 0) coef *= c * std::sqrt(static_cast<double>(n + j)) / static_cast<double>(j);
            out(n) += coef * v(n + j);
        }
    }
    return out;
}

/**
 * e^{c b†} applied to a truncated vector:
 * (e^{cb†}ψ)_n = Σ_j c^j/j! √(n!/(n−j)!) ψ_{n−j}. Mass pushed above n_max is lost.
 */
[[nodiscard]] inline Eigen::VectorXcd apply_exp_bdag(cplx c, const Eigen::VectorXcd& v) {
    const int d = static_cast<int>(v.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
    for (int n = 0; n < d; ++n) {
        cplx coef(1.0, 0.0);
        for (int j = 0; j <= n; ++j) {
            if (j > 0) coef *= c * std::sqrt(static_cast<double>(n - j + 1)) / static_cast<double>(j);
            out(n) += coef * v(n - j);
        }
    }
    return out;
}

/** e^{iq b†b}. */
[[nodiscard]] inline Eigen::VectorXcd apply_number_phase(cplx q, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    const cplx i(0.0, 1.0);
    for (int n = 0; n < v.size(); ++n) out(n) = std::exp(i * q * static_cast<double>(n)) * v(n);
    return out;
}

/** |⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩). Shorter vector is zero-padded. */
[[nodiscard]] inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const Eigen::Index d = std::min(a.size(), b.size());
    const cplx ov = a.head(d).dot(b.head(d));
    return std::norm(ov) / (a.squaredNorm() * b.squaredNorm());
}

[[nodiscard]] inline double odd_mass(const HPState& s) {
    double m = 0.0;
    for (int n = 1; n <= s.n_max(); n += 2) m += std::norm(s.amplitudes(n));
    return m / s.norm();
}

/**
 * X = (b†+b)/√2, P = i(b†−b)/√2. Means are scaled by √(2/N) and variances by 2,
 * so vacuum gives variances (1, 1).
 */
[[nodiscard]] inline MomentSet hp_moments(const HPState& s, int N, double norm_tol = 1e-10) {
    if (std::abs(s.norm() - 1.0) > norm_tol) throw InvalidArgument("hp_moments: state not normalized");
    const auto& a = s.amplitudes;
    const int nm = s.n_max();
    cplx eb(0.0, 0.0), eb2(0.0, 0.0);
    double en = 0.0;
    for (int n = 0; n <= nm; ++n) {
        en += n * std::norm(a(n));
        if (n + 1 <= nm) eb += std::sqrt(static_cast<double>(n + 1)) * std::conj(a(n)) * a(n + 1);
        if (n + 2 <= nm)
            eb2 += std::sqrt(static_cast<double>(n + 1) * (n + 2)) * std::conj(a(n)) * a(n + 2);
    }
    const double mx = std::sqrt(2.0) * eb.real(), mp = std::sqrt(2.0) * eb.imag();
    const double x2 = eb2.real() + en + 0.5, p2 = -eb2.real() + en + 0.5;
    MomentSet r;
    r.engine = "hybrid-numeric";
    r.mean_x = std::sqrt(2.0 / N) * mx;
    r.mean_p = std::sqrt(2.0 / N) * mp;
    r.var_x = 2.0 * (x2 - mx * mx);
    r.var_p = 2.0 * (p2 - mp * mp);
    r.time_omega_t = s.time_omega_t;
    return r;
}

}  // namespace qnd

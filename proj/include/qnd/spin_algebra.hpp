// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spin_algebra.hpp
 * @brief Collective spin operators of N two-mode bosons, physical parameters
 *        and spin coherent states.
 *
 * Two bases are supported. In the Jz-Fock basis the index m counts excited
 * atoms, so Jz = diag(m - N/2). In the Jx eigenbasis the index k counts atoms
 * in b+ = (b_e + b_g)/√2, so Jx = diag(k - N/2) and the tunneling term is
 * tridiagonal.
 */

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "log_math.hpp"

namespace qnd {

/** All physical inputs. κ is always recomputed from g, N and Ω. */
struct SystemParams {
    int N = 200;
    double omega = kPi / 4.0;   // tunneling Ω (rad/time)
    double g = 0.1 * (kPi / 4.0) / 200.0;
    cplx alpha_l{std::sqrt(20.0), 0.0};
    cplx alpha_r{std::sqrt(20.0), 0.0};
    cplx alpha{0.0, 0.0};       // excited-mode fraction
    cplx beta{1.0, 0.0};        // ground-mode fraction

    [[nodiscard]] double kappa() const {
        return g * std::sqrt(static_cast<double>(N)) / (2.0 * omega);
    }
    [[nodiscard]] double phase_alpha() const {
        return std::abs(alpha) == 0.0 ? 0.0 : std::arg(alpha);
    }
    /// Relative light phase φ = φ_l − φ_r.
    [[nodiscard]] double light_phase() const {
        return std::arg(alpha_l) - std::arg(alpha_r);
    }
    [[nodiscard]] double eta() const { return std::abs(alpha_l) / std::abs(alpha_r); }
    [[nodiscard]] double total_intensity() const {
        return std::norm(alpha_l) + std::norm(alpha_r);
    }
    /// c = |α_r|²Ω²t²κ², the short-time squeezing parameter at time t.
    [[nodiscard]] double squeeze_parameter(double t) const {
        const double th = omega * t * kappa();
        return std::norm(alpha_r) * th * th;
    }

    void validate() const {
        if (N < 1) throw InvalidArgument("atom number must be >= 1");
        if (!(omega > 0.0)) throw InvalidArgument("tunneling frequency must be > 0");
        if (g < 0.0) throw InvalidArgument("coupling must be >= 0");
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
            throw InvalidArgument("|alpha|^2 + |beta|^2 must equal 1");
    }
};

/// Reference parameter sets of the four figure families.
namespace presets {

inline SystemParams base(int N, double light_intensity) {
    SystemParams p;
    p.N = N;
    p.omega = kPi / 4.0;
    p.g = 0.1 * p.omega / N;
    p.alpha_l = p.alpha_r = cplx(std::sqrt(light_intensity), 0.0);
    return p;
}
inline SystemParams variances() { return base(200, 20.0); }
inline SystemParams qfunction() { return base(1000, 12.0); }
inline SystemParams imperfect_small() {
    SystemParams p = base(200, 20.0);
    p.alpha = 0.01;
    p.beta = std::sqrt(9999.0) * 1e-2;
    return p;
}
inline SystemParams imperfect_large() {
    SystemParams p = base(200, 20.0);
    p.alpha = std::sqrt(0.001);
    p.beta = std::sqrt(0.999);
    return p;
}

}  // namespace presets

enum class Basis { JxEigen, JzFock };

[[nodiscard]] inline const char* to_string(Basis b) {
    return b == Basis::JxEigen ? "jx-eigenbasis" : "jz-fock";
}

enum class Axis { X, Y, Z };

struct SpinMatrices {
    Eigen::MatrixXcd Jx, Jy, Jz;
    Basis basis = Basis::JxEigen;

    [[nodiscard]] int N() const { return static_cast<int>(Jx.rows()) - 1; }
    [[nodiscard]] const Eigen::MatrixXcd& get(Axis a) const {
        return a == Axis::X ? Jx : (a == Axis::Y ? Jy : Jz);
    }
};

/**
 * Dense spin-N/2 matrices. L+ has elements √((k+1)(N−k)) raising the
 * diagonal label by one.
 *  - Jx basis: Jx diagonal, Jz = (L+ + L−)/2, Jy = (L− − L+)/(2i).
 *  - Jz basis: Jz diagonal, Jx = (L+ + L−)/2, Jy = (L+ − L−)/(2i).
 */
[[nodiscard]] inline SpinMatrices build_spin_matrices(int N, Basis basis = Basis::JxEigen) {
    if (N < 1) throw InvalidArgument("build_spin_matrices: N must be >= 1");
    const int d = N + 1;
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd Lp = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) diag(k, k) = k - 0.5 * N;
    for (int k = 0; k < N; ++k)
        Lp(k + 1, k) = std::sqrt(static_cast<double>(k + 1) * (N - k));
    const Eigen::MatrixXcd Lm = Lp.transpose();
    const Eigen::MatrixXcd sym = 0.5 * (Lp + Lm);
    const cplx two_i(0.0, 2.0);

    SpinMatrices m;
    m.basis = basis;
    if (basis == Basis::JxEigen) {
        m.Jx = diag;
        m.Jz = sym;
        m.Jy = (Lm - Lp) / two_i;
    } else {
        m.Jz = diag;
        m.Jx = sym;
        m.Jy = (Lp - Lm) / two_i;
    }
    return m;
}

/** Rejects non-integral atom numbers. */
[[nodiscard]] inline SpinMatrices build_spin_matrices(double N, Basis basis = Basis::JxEigen) {
    if (N != std::floor(N)) throw InvalidArgument("build_spin_matrices: N must be an integer");
    return build_spin_matrices(static_cast<int>(N), basis);
}

struct AtomStateVector {
    Eigen::VectorXcd amplitudes;
    Basis basis = Basis::JxEigen;

    [[nodiscard]] int N() const { return static_cast<int>(amplitudes.size()) - 1; }
    [[nodiscard]] double norm() const { return amplitudes.squaredNorm(); }
    void normalize() {
        const double n = amplitudes.norm();
        if (!(n > 0.0)) throw InvalidArgument("cannot normalize a null state");
        amplitudes /= n;
    }
};

/**
 * Amplitudes √C(N,j)·u^j·v^{N−j} built in the log domain. Exact zeros of u or
 * v are handled explicitly.
 */
[[nodiscard]] inline Eigen::VectorXcd binomial_product_state(int N, cplx u, cplx v) {
    Eigen::VectorXcd a(N + 1);
    const LogComplex lu = LogComplex::from(u), lv = LogComplex::from(v);
    for (int j = 0; j <= N; ++j) {
        LogComplex t = lu.pow(j) * lv.pow(N - j);
        t.log_mag += 0.5 * log_binom(N, j);
        a(j) = t.value();
    }
    return a;
}

/** Spin coherent state (αb_e† + βb_g†)^N|0⟩/√N! in the requested basis. */
[[nodiscard]] inline AtomStateVector spin_coherent_state(const SystemParams& p,
                                                         Basis basis = Basis::JxEigen) {
    p.validate();
    AtomStateVector s;
    s.basis = basis;
    if (basis == Basis::JzFock) {
        s.amplitudes = binomial_product_state(p.N, p.alpha, p.beta);
    } else {
        const double r = 1.0 / std::sqrt(2.0);
        s.amplitudes = binomial_product_state(p.N, (p.alpha + p.beta) * r, (p.alpha - p.beta) * r);
    }
    return s;
}

[[nodiscard]] inline cplx expectation(const AtomStateVector& s, const Eigen::MatrixXcd& M) {
    if (M.rows() != s.amplitudes.size() || M.cols() != s.amplitudes.size())
        throw InvalidArgument("expectation: dimension mismatch");
    return s.amplitudes.dot(M * s.amplitudes);
}

/** ⟨M²⟩ − |⟨M⟩|² using two matrix-vector products. */
[[nodiscard]] inline double variance(const AtomStateVector& s, const Eigen::MatrixXcd& M) {
    if (M.rows() != s.amplitudes.size() || M.cols() != s.amplitudes.size())
        throw InvalidArgument("variance: dimension mismatch");
    const Eigen::VectorXcd Mv = M * s.amplitudes;
    const cplx m1 = s.amplitudes.dot(Mv);
    const double m2 = Mv.squaredNorm();  // ⟨M²⟩ for Hermitian M
    return m2 - std::norm(m1);
}

[[nodiscard]] inline cplx expectation(const AtomStateVector& s, const SpinMatrices& m, Axis a) {
    if (s.basis != m.basis) throw InvalidArgument("expectation: basis mismatch");
    return expectation(s, m.get(a));
}

[[nodiscard]] inline double variance(const AtomStateVector& s, const SpinMatrices& m, Axis a) {
    if (s.basis != m.basis) throw InvalidArgument("variance: basis mismatch");
    return variance(s, m.get(a));
}

}  // namespace qnd

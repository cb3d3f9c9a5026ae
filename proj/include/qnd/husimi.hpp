// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file husimi.hpp
 * @brief Husimi Q-distribution Q(ν) = |⟨ν|ψ⟩|²/π of conditional excited-mode
 *        states, on a grid or in closed form.
 */

#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "closed_forms.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "hp_state.hpp"
#include "hybrid.hpp"
#include "log_math.hpp"
#include "spin_algebra.hpp"

namespace qnd {

struct GridSpec {
    double nu_max = 5.0;
    int resolution = 201;  // points per axis, odd keeps ν = 0 on the grid

    [[nodiscard]] double step() const { return 2.0 * nu_max / (resolution - 1); }
    [[nodiscard]] double coord(int i) const { return -nu_max + i * step(); }
};

struct QGrid {
    GridSpec spec;
    Eigen::MatrixXd values;  // (re index, im index)
    double integral = 0.0;
    bool coverage_ok = false;  // integral within 2% of 1
    double time_omega_t = 0.0;
    int nc = -1, nd = -1;

    [[nodiscard]] double re(int i) const { return spec.coord(i); }
    [[nodiscard]] double im(int j) const { return spec.coord(j); }
};

/** ⟨ν|ψ⟩ = e^{−|ν|²/2} Σ_n conj(ν)^n/√n! ψ_n. */
[[nodiscard]] inline cplx coherent_overlap(const Eigen::VectorXcd& psi, cplx nu) {
    const double r2 = std::norm(nu);
    const cplx cn = std::conj(nu);
    cplx acc(0.0, 0.0);
    if (r2 < 600.0) {
        // recurrence keeps every factor in [0, 1]
        cplx f = std::exp(-0.5 * r2);
        for (int n = 0; n < psi.size(); ++n) {
            if (n > 0) f *= cn / std::sqrt(static_cast<double>(n));
            acc += f * psi(n);
        }
        return acc;
    }
    for (int n = 0; n < psi.size(); ++n) {
        LogComplex t = LogComplex::from(cn).pow(n);
        if (t.is_zero()) continue;
        t.log_mag += -0.5 * r2 - 0.5 * log_factorial(n);
        acc += t.value() * psi(n);
    }
    return acc;
}

[[nodiscard]] inline double q_value(const HPState& s, cplx nu) {
    return std::norm(coherent_overlap(s.amplitudes, nu)) / kPi;
}

namespace detail {

inline void finish_grid(QGrid& g) {
    const double h = g.spec.step();
    g.integral = g.values.sum() * h * h;
    g.coverage_ok = std::abs(g.integral - 1.0) <= 0.02;
}

}  // namespace detail

[[nodiscard]] inline QGrid q_function_numeric(const HPState& s, const GridSpec& spec = {}) {
    if (spec.resolution < 2 || !(spec.nu_max > 0.0)) throw InvalidArgument("q_function_numeric: bad grid");
    if (std::abs(s.norm() - 1.0) > 1e-8) throw InvalidArgument("q_function_numeric: state not normalized");
    QGrid g;
    g.spec = spec;
    g.values.resize(spec.resolution, spec.resolution);
    for (int i = 0; i < spec.resolution; ++i)
        for (int j = 0; j < spec.resolution; ++j)
            g.values(i, j) = q_value(s, cplx(spec.coord(i), spec.coord(j)));
    g.time_omega_t = s.time_omega_t;
    g.nc = s.nc;
    g.nd = s.nd;
    detail::finish_grid(g);
    return g;
}

enum class QBranch { Full, Balanced };

/**
 * Full branch: Gaussian form carrying the meter terms in (x₀ − φ) and
 * (n_c + n_d − 2a), normalized with the hybrid detection probability.
 * Balanced branch: (1/π) √(1+8c)/(1+4c) exp(−(1+8c cos²φ)/(1+4c) |ν|²).
 */
[[nodiscard]] inline double q_function_closed(const SystemParams& p, int nc, int nd, double t, cplx nu,
                                              QBranch branch = QBranch::Balanced) {
    const double r = std::abs(nu), vp = std::arg(nu);
    if (branch == QBranch::Balanced) {
        const double c = p.squeeze_parameter(t);
        const double cs = std::cos(vp);
        return std::sqrt(1.0 + 8.0 * c) / (1.0 + 4.0 * c) / kPi *
               std::exp(-(1.0 + 8.0 * c * cs * cs) / (1.0 + 4.0 * c) * r * r);
    }
    const MeasurementOutcome o = make_outcome(nc, nd, p.eta());
    if (!o.asymptotic_ok()) throw AsymptoticSupportError("q_function_closed: outcome outside asymptotic support");
    const double tk = p.omega * t * p.kappa();
    const double den = 1.0 + 4.0 * o.sigma * tk * tk;
    const double S = nc + nd, A = p.total_intensity();
    const double dx = o.x0 - p.light_phase(), m = S - 2.0 * o.a;
    double lg = -A - std::log(kPi) - log_factorial(nc) - log_factorial(nd) +
                (S > 0 ? S * std::log(A) : 0.0) - std::log(detection_probability_hp(p, nc, nd, t)) -
                std::log(den);
    if (nc > 0) lg += nc * std::log(nc / S);
    if (nd > 0) lg += nd * std::log(nd / S);
    lg += -tk * tk * m * m / den - o.sigma * dx * dx / den -
          4.0 * o.sigma * tk * r * dx * std::cos(vp) / den -
          (1.0 + 8.0 * o.sigma * tk * tk * std::cos(vp) * std::cos(vp)) / den * r * r +
          2.0 * tk * m * r * std::sin(vp) / den;
    return std::exp(lg);
}

[[nodiscard]] inline QGrid q_function_closed_grid(const SystemParams& p, int nc, int nd, double t,
                                                  const GridSpec& spec = {},
                                                  QBranch branch = QBranch::Balanced) {
    QGrid g;
    g.spec = spec;
    g.values.resize(spec.resolution, spec.resolution);
    for (int i = 0; i < spec.resolution; ++i)
        for (int j = 0; j < spec.resolution; ++j)
            g.values(i, j) = q_function_closed(p, nc, nd, t, cplx(spec.coord(i), spec.coord(j)), branch);
    g.time_omega_t = p.omega * t;
    g.nc = nc;
    g.nd = nd;
    detail::finish_grid(g);
    return g;
}

/**
 * Δν² = 2⟨r²⟩ along the line through the origin at angle varphi, using the
 * samples of Q on that line. A Gaussian e^{−r²/Δν²} gives back Δν².
 */
[[nodiscard]] inline double ray_width(const HPState& s, double varphi, double nu_max = 5.0,
                                      int samples = 201) {
    double m0 = 0.0, m2 = 0.0;
    const cplx dir = std::polar(1.0, varphi);
    for (int i = 0; i < samples; ++i) {
        const double r = -nu_max + 2.0 * nu_max * i / (samples - 1);
        const double q = q_value(s, r * dir);
        m0 += q;
        m2 += r * r * q;
    }
    return 2.0 * m2 / m0;
}

/** Same width from the grid row (varphi = 0) or column (varphi = π/2) through ν = 0. */
[[nodiscard]] inline double ray_width_axis(const QGrid& g, bool along_x) {
    const int n = g.spec.resolution;
    if (n % 2 == 0) throw InvalidArgument("ray_width_axis: needs an odd grid so that nu = 0 is sampled");
    const int c = n / 2;
    double m0 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = g.spec.coord(i);
        const double q = along_x ? g.values(i, c) : g.values(c, i);
        m0 += q;
        m2 += r * r * q;
    }
    return 2.0 * m2 / m0;
}

/** Writes columns re_nu, im_nu, q_value. */
inline void write_qgrid_csv(const QGrid& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("write_qgrid_csv: cannot open " + path);
    f << std::setprecision(12);
    f << "re_nu,im_nu,q_value\n";
    for (int i = 0; i < g.spec.resolution; ++i)
        for (int j = 0; j < g.spec.resolution; ++j)
            f << g.re(i) << ',' << g.im(j) << ',' << g.values(i, j) << '\n';
}

}  // namespace qnd

// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fourier.hpp
 * @brief Interferometer weights I(n_c, n_d, n_l): exact combinatorial sum,
 *        contour quadrature and the two-peak saddle-point form.
 *
 * I(n_c, n_d, n_l) is the z^{n_l} coefficient of (i + ηz)^{n_c} (1 + iηz)^{n_d},
 * i.e. the amplitude for n_l photons entering the left arm to leave as
 * n_c, n_d clicks through a beamsplitter with a_l† = (a_c† + i a_d†)/√2,
 * a_r† = (i a_c† + a_d†)/√2. This labeling is shared with the exact solver,
 * whose detector amplitudes are c = (α_l + iα_r)/√2 and d = (iα_l + α_r)/√2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>
#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "log_math.hpp"

namespace qnd {

namespace detail {

using i128 = __int128;

inline i128 binom_i128(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    i128 r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;  // exact at every step
    return r;
}

using big = boost::multiprecision::cpp_int;

inline big binom_big(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    big r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

inline cplx i_pow(long e) {
    switch (((e % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace detail

/**
 * I = n_c! n_d! η^{n_l} Σ_k i^{n_l+n_c−2k} / (k!(n_l−k)!(n_c−k)!(n_d−n_l+k)!)
 *   = η^{n_l} i^{n_l+n_c} Σ_k (−1)^k C(n_c,k) C(n_d, n_l−k).
 * The alternating sum is exact in 128-bit integers up to 62 photons per
 * detector; larger counts use arbitrary-precision integers.
 */
[[nodiscard]] inline cplx fourier_coeff_sum(int nc, int nd, int nl, double eta) {
    if (nc < 0 || nd < 0 || nl < 0) throw InvalidArgument("fourier_coeff_sum: negative count");
    if (!(eta > 0.0)) throw InvalidArgument("fourier_coeff_sum: eta must be > 0");
    if (nl > nc + nd) return {0.0, 0.0};
    const int kmin = std::max(0, nl - nd), kmax = std::min(nc, nl);
    long double S = 0.0L;
    if (nc <= 62 && nd <= 62) {
        detail::i128 acc = 0;
        for (int k = kmin; k <= kmax; ++k) {
            const detail::i128 t = detail::binom_i128(nc, k) * detail::binom_i128(nd, nl - k);
            acc += (k % 2 == 0) ? t : -t;
        }
        S = static_cast<long double>(acc);
    } else {
        detail::big acc = 0;
        for (int k = kmin; k <= kmax; ++k) {
            const detail::big t = detail::binom_big(nc, k) * detail::binom_big(nd, nl - k);
            acc += (k % 2 == 0) ? t : detail::big(-t);
        }
        S = acc.convert_to<long double>();
    }
    const double mag = static_cast<double>(S) * std::pow(eta, nl);
    return detail::i_pow(nl + nc) * mag;
}

struct QuadratureOptions {
    /// Contour radius; <= 0 picks the saddle radius of |(1+ηρ)^{n_c+n_d} ρ^{−n_l}|.
    double radius = 0.0;
    /// Node count; <= 0 uses 4(n_c + n_d + n_l + 8).
    int nodes = 0;
};

/**
 * (1/2π)∮ e^{−in_lφ} (i + ηz)^{n_c} (1 + iηz)^{n_d} dφ with z = ρe^{iφ}, scaled by
 * ρ^{−n_l}. The integrand is a polynomial of degree n_c+n_d, so the
 * trapezoidal rule on more nodes than that is exact for any ρ by Cauchy's
 * theorem. ρ = 1 is the plain Fourier integral; the saddle radius keeps the
 * relative accuracy when the coefficient is tiny compared to max|f|.
 */
[[nodiscard]] inline cplx fourier_coeff_quadrature(int nc, int nd, int nl, double eta,
                                                   const QuadratureOptions& o = {}) {
    if (nc < 0 || nd < 0 || nl < 0)
        throw InvalidArgument("fourier_coeff_quadrature: negative count");
    if (!(eta > 0.0)) throw InvalidArgument("fourier_coeff_quadrature: eta must be > 0");
    const int S = nc + nd;
    const int M = o.nodes > 0 ? o.nodes : 4 * (nc + nd + nl + 8);
    double rho = o.radius;
    if (rho <= 0.0) {
        const double num = std::max(nl, 0) + 0.5, den = std::max(S - nl, 0) + 0.5;
        rho = num / (eta * den);
    }
    const cplx i(0.0, 1.0);
    std::vector<LogComplex> terms(static_cast<std::size_t>(M));
    double top = kNegInf;
    for (int j = 0; j < M; ++j) {
        const double ph = 2.0 * kPi * j / M;
        const cplx z = std::polar(rho, ph);
        LogComplex t = LogComplex::from(i + eta * z).pow(nc) * LogComplex::from(1.0 + i * eta * z).pow(nd);
        if (!t.is_zero()) {
            t.log_mag -= nl * std::log(rho);
            t.phase -= nl * ph;
        }
        terms[j] = t;
        top = std::max(top, t.log_mag);
    }
    if (top == kNegInf) return {0.0, 0.0};
    cplx acc(0.0, 0.0);
    for (const auto& t : terms) acc += t.value(top);
    return acc / static_cast<double>(M) * std::exp(top);
}

/** Saddle-point data of one detection record. */
struct MeasurementOutcome {
    int nc = 0, nd = 0;
    double eta = 1.0;
    bool x0_defined = false;
    double x0 = 0.0, x0p = kPi;
    double sigma = 0.0;
    double a = 0.0, b = 0.0;
    double phi_c0 = 0.0, phi_d0 = 0.0, phi_c0p = 0.0, phi_d0p = 0.0;

    [[nodiscard]] bool asymptotic_ok() const { return x0_defined && sigma > 0.0; }

    /**
     * Gaussian centre shift q (or q′ when primed) at θκ = Ωtκ and relative
     * light phase φ.
     */
    [[nodiscard]] cplx shift(double theta_kappa, double phi, bool primed = false) const {
        const double tk2 = theta_kappa * theta_kappa;
        const double x = primed ? x0p : x0;
        return sigma * cplx(2.0 * tk2 * (nc + nd - 2.0 * a), -(x - phi)) /
               (1.0 + 4.0 * sigma * tk2);
    }
};

/**
 * Builds the saddle data. The textbook formulas are written for the mirror
 * labeling of the detectors; evaluating them with the two counts exchanged
 * reproduces the exact coefficients in the labeling of this library, so
 * x₀ = arcsin((n_c − n_d)(1+η²)/(2η(n_c+n_d))).
 */
[[nodiscard]] inline MeasurementOutcome make_outcome(int nc, int nd, double eta) {
    if (nc < 0 || nd < 0) throw InvalidArgument("make_outcome: negative count");
    if (!(eta > 0.0)) throw InvalidArgument("make_outcome: eta must be > 0");
    MeasurementOutcome o;
    o.nc = nc;
    o.nd = nd;
    o.eta = eta;
    // A and B take the places of the first and second count in the textbook form.
    const double A = nd, B = nc;
    const double S = A + B, D = B - A, e2 = 1.0 + eta * eta;
    if (S <= 0.0) return o;
    const double arg = D / S * e2 / (2.0 * eta);
    o.x0_defined = std::abs(arg) <= 1.0;
    if (o.x0_defined) {
        o.x0 = std::asin(arg);
        o.x0p = kPi - o.x0;
    }
    const double disc = 4.0 * eta * eta * S * S - D * D * e2 * e2;
    const double root = std::sqrt(std::max(disc, 0.0));
    // second-count phase of the textbook form belongs to n_c here
    o.phi_c0 = std::atan((2.0 * S + D * e2) / root);
    o.phi_d0 = std::atan(root / (2.0 * S - D * e2));
    if (A > 0 && B > 0) {
        o.phi_c0p = (2.0 * eta * eta * S + D * e2) / (4.0 * B * e2);
        o.phi_d0p = (2.0 * eta * eta * S - D * e2) / (4.0 * A * e2);
        o.sigma = disc / (8.0 * A * B * e2 * e2) * S;
    }
    o.a = nc * o.phi_c0p + nd * o.phi_d0p;
    o.b = nc * o.phi_c0 + nd * o.phi_d0;
    return o;
}

/**
 * Two-peak Gaussian form
 *   (2πσ)^{−1/2} [2n_c(1+η²)/S]^{n_c/2} [2n_d(1+η²)/S]^{n_d/2} e^{−(a−n_l)²/(2σ)}
 *   × {e^{i(b − n_l x₀)} + (−1)^{n_c} e^{−i(b + n_l x₀′)}}.
 * The second term is the x₀′ peak; drop it with include_secondary_peak = false.
 */
[[nodiscard]] inline cplx fourier_coeff_asymptotic(const MeasurementOutcome& o, int nl,
                                                   bool include_secondary_peak = true) {
    if (!o.asymptotic_ok())
        throw AsymptoticSupportError("fourier_coeff_asymptotic: outcome outside asymptotic support");
    const double S = o.nc + o.nd, e2 = 1.0 + o.eta * o.eta;
    double lg = -0.5 * std::log(2.0 * kPi * o.sigma) - (o.a - nl) * (o.a - nl) / (2.0 * o.sigma);
    if (o.nc > 0) lg += 0.5 * o.nc * std::log(2.0 * o.nc * e2 / S);
    if (o.nd > 0) lg += 0.5 * o.nd * std::log(2.0 * o.nd * e2 / S);
    cplx br = std::polar(1.0, o.b - nl * o.x0);
    if (include_secondary_peak)
        br += ((o.nc % 2 == 0) ? 1.0 : -1.0) * std::polar(1.0, -(o.b + nl * o.x0p));
    return std::exp(lg) * br;
}

}  // namespace qnd

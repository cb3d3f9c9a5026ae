// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file log_math.hpp
 * @brief Overflow-safe factorials, binomials, Poisson weights and complex
 *        log-domain accumulation.
 */

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace qnd {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[nodiscard]] inline double log_factorial(long n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

/** log C(n, k); -inf outside 0 <= k <= n. */
[[nodiscard]] inline double log_binom(long n, long k) {
    if (k < 0 || k > n) return kNegInf;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/** log Poisson(n; mean). mean == 0 is the point mass at zero. */
[[nodiscard]] inline double log_poisson(long n, double mean) {
    if (n < 0) return kNegInf;
    if (mean <= 0.0) return n == 0 ? 0.0 : kNegInf;
    return static_cast<double>(n) * std::log(mean) - mean - log_factorial(n);
}

/** P(X > n) for X ~ Poisson(mean). */
[[nodiscard]] inline double poisson_upper_tail(long n, double mean) {
    if (mean <= 0.0) return 0.0;
    if (n < 0) return 1.0;
    return boost::math::gamma_p(static_cast<double>(n) + 1.0, mean);
}

/**
 * Complex number stored as log-magnitude plus phase. Zero is log_mag = -inf.
 * Integer powers stay branch-free: arg(z^n) = n·arg(z) mod 2π.
 */
struct LogComplex {
    double log_mag = kNegInf;
    double phase = 0.0;

    [[nodiscard]] static LogComplex from(cplx z) {
        if (z == cplx(0.0, 0.0)) return {};
        return {std::log(std::abs(z)), std::arg(z)};
    }
    [[nodiscard]] bool is_zero() const { return log_mag == kNegInf; }
    [[nodiscard]] LogComplex pow(long n) const {
        if (n == 0) return {0.0, 0.0};
        if (is_zero()) return {};
        return {static_cast<double>(n) * log_mag, static_cast<double>(n) * phase};
    }
    [[nodiscard]] LogComplex operator*(const LogComplex& o) const {
        if (is_zero() || o.is_zero()) return {};
        return {log_mag + o.log_mag, phase + o.phase};
    }
    /** exp(log_mag - shift)·e^{i phase}. */
    [[nodiscard]] cplx value(double shift = 0.0) const {
        if (is_zero()) return {0.0, 0.0};
        return std::polar(std::exp(log_mag - shift), phase);
    }
};

/** Stable log(sum exp(x_i)). */
[[nodiscard]] inline double log_sum_exp(const std::vector<double>& xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace qnd

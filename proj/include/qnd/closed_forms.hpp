// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file closed_forms.hpp
 * @brief Short-time analytic results. c = |α_r|²Ω²t²κ² throughout.
 */

#pragma once

#include <cmath>
#include <limits>
#include <tuple>
#include <string>
#include <utility>

#include "errors.hpp"
#include "moments.hpp"
#include "spin_algebra.hpp"

namespace qnd {

/** (ΔX̄, ΔP̄) = (1/(1+8c), 1+8c). */
[[nodiscard]] inline std::pair<double, double> approx_variances(const SystemParams& p, double t) {
    const double c = p.squeeze_parameter(t);
    return {1.0 / (1.0 + 8.0 * c), 1.0 + 8.0 * c};
}

/**
 * X̄_α = |α|/(1+4c)² [−8c cos φ_α + 2(1+4c) cos(Ωt+φ_α)],
 * P̄_α = |α|(1+8c)/(1+4c)² [−8c sin φ_α + 2(1+4c) sin(Ωt+φ_α)].
 */
[[nodiscard]] inline std::pair<double, double> approx_means_imperfect(const SystemParams& p, double t) {
    const double c = p.squeeze_parameter(t);
    const double a = std::abs(p.alpha), ph = p.phase_alpha(), th = p.omega * t;
    const double den = (1.0 + 4.0 * c) * (1.0 + 4.0 * c);
    const double X = a / den * (-8.0 * c * std::cos(ph) + 2.0 * (1.0 + 4.0 * c) * std::cos(th + ph));
    const double P = a * (1.0 + 8.0 * c) / den *
                     (-8.0 * c * std::sin(ph) + 2.0 * (1.0 + 4.0 * c) * std::sin(th + ph));
    return {X, P};
}

/** Δν² = (1+4c)/(1+8c cos²φ). */
[[nodiscard]] inline double q_width(const SystemParams& p, double t, double varphi) {
    const double c = p.squeeze_parameter(t);
    const double cs = std::cos(varphi);
    return (1.0 + 4.0 * c) / (1.0 + 8.0 * c * cs * cs);
}

struct ValidityReport {
    double t_star = std::numeric_limits<double>::infinity();  // physical time
    double omega_t_star = std::numeric_limits<double>::infinity();
    bool bounded = false;
    std::string condition = "Omega t < 1/(|alpha_r| kappa)";

    [[nodiscard]] bool satisfied(double t) const { return t < t_star; }
};

/** t* = 1/(Ω|α_r|κ) = 2/(g√N|α_r|). Unbounded when g = 0 or α_r = 0. */
[[nodiscard]] inline ValidityReport validity_time(const SystemParams& p) {
    ValidityReport r;
    const double ar = std::abs(p.alpha_r);
    if (p.g <= 0.0 || ar <= 0.0) {
        r.condition += " (unbounded: no coupling)";
        return r;
    }
    r.bounded = true;
    r.omega_t_star = 1.0 / (ar * p.kappa());
    r.t_star = r.omega_t_star / p.omega;
    return r;
}

/** Total variance = system + meter. */
[[nodiscard]] inline double variance_composition(double system_var, double meter_var) {
    if (system_var < 0.0 || meter_var < 0.0)
        throw InvalidArgument("variance_composition: variances must be >= 0");
    return system_var + meter_var;
}

/** Meter contribution 8c to ΔP̄; the system part is 1. */
[[nodiscard]] inline double meter_variance(const SystemParams& p, double t) {
    return 8.0 * p.squeeze_parameter(t);
}

/** MomentSet of the closed forms; means from the imperfect-polarization expressions. */
[[nodiscard]] inline MomentSet closed_form_moments(const SystemParams& p, double t) {
    MomentSet m;
    m.engine = "closed-form";
    m.time_omega_t = p.omega * t;
    std::tie(m.var_x, m.var_p) = approx_variances(p, t);
    std::tie(m.mean_x, m.mean_p) = approx_means_imperfect(p, t);
    return m;
}

}  // namespace qnd

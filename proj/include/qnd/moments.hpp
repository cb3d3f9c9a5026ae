// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file moments.hpp
 * @brief Normalized quadrature means and variances shared by every engine.
 */

#pragma once

#include <string>

namespace qnd {

/**
 * Normalized so that the unsqueezed (coherent) level is 1 for both
 * variances. The exact engine reports J̄x, J̄y, ΔJ̄x, ΔJ̄y in the same slots.
 */
struct MomentSet {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 1.0;
    double var_p = 1.0;
    double time_omega_t = 0.0;
    std::string engine;
    /// Largest imaginary part discarded when the moments were made real.
    double max_imag = 0.0;

    [[nodiscard]] double product() const { return var_x * var_p; }
};

}  // namespace qnd

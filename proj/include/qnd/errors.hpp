// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file errors.hpp
 * @brief Exception types raised by the simulator.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qnd {

/// Base class for every recoverable simulator failure.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad parameters, mismatched bases or dimensions.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Conditioning on an outcome whose probability underflows.
struct ImprobableOutcome : Error {
    using Error::Error;
};

/// Photon or Fock truncation left too much probability outside the grid.
struct CutoffError : Error {
    using Error::Error;
};

/// Integrator could not keep the norm within tolerance.
struct NormDriftError : Error {
    using Error::Error;
};

/// Outcome where the saddle-point expansion is undefined.
struct AsymptoticSupportError : Error {
    using Error::Error;
};

/// Configuration file problems.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace qnd

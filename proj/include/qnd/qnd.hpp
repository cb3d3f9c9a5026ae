// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file qnd.hpp
 * @brief Umbrella header for the qndsqueeze library.
 */

#pragma once

#include "closed_forms.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "exact_solver.hpp"
#include "fourier.hpp"
#include "harness.hpp"
#include "hp_state.hpp"
#include "husimi.hpp"
#include "hybrid.hpp"
#include "log_math.hpp"
#include "moments.hpp"
#include "spin_algebra.hpp"

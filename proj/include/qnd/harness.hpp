// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file harness.hpp
 * @brief Experiment runners behind the qndsim tool: moment tables, Q-function
 *        snapshots and parameter sweeps.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "closed_forms.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "exact_solver.hpp"
#include "husimi.hpp"
#include "hybrid.hpp"
#include "moments.hpp"
#include "spin_algebra.hpp"

namespace qnd {

/** Runs fn(0..n-1) on up to `threads` workers; each index writes only its own slot. */
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
    if (threads <= 0) threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

struct MomentRow {
    MomentSet m;
    std::string regime;  // inside, outside or failed
    std::string error;
};

struct RunResult {
    ExperimentConfig config;
    int nc = 0, nd = 0;
    std::vector<MomentRow> rows;  // ordered by engine, then time
    std::vector<std::string> failures;

    [[nodiscard]] bool ok() const { return failures.empty(); }
    [[nodiscard]] std::vector<const MomentRow*> engine_rows(const std::string& e) const {
        std::vector<const MomentRow*> v;
        for (const auto& r : rows)
            if (r.m.engine == e) v.push_back(&r);
        return v;
    }
};

[[nodiscard]] inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

[[nodiscard]] inline std::string regime_of(const SystemParams& p, double omega_t) {
    return omega_t < validity_time(p).omega_t_star ? "inside" : "outside";
}

/** Starting excited-mode state: coherent label √N·α (vacuum for full polarization). */
[[nodiscard]] inline HPState hp_initial_state(const SystemParams& p) {
    return hp_coherent(std::sqrt(static_cast<double>(p.N)) * p.alpha, 8);
}

namespace detail {

inline MomentRow failed_row(const std::string& engine, double omega_t, const std::string& why) {
    MomentRow r;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.m.engine = engine;
    r.m.time_omega_t = omega_t;
    r.m.mean_x = r.m.mean_p = r.m.var_x = r.m.var_p = nan;
    r.regime = "failed";
    r.error = why;
    return r;
}

}  // namespace detail

/**
 * Conditional moments on the time grid for every requested engine. Engine
 * failures become rows flagged "failed" and are listed in failures.
 */
[[nodiscard]] inline RunResult run_moments(const ExperimentConfig& c, int threads = 0) {
    RunResult res;
    res.config = c;
    std::tie(res.nc, res.nd) = resolve_outcome(c);
    const SystemParams& p = c.params;
    const auto grid = omega_t_grid(p, c.omega_t_max, c.steps);
    const int n = static_cast<int>(grid.size());

    for (const auto& engine : c.engines) {
        std::vector<MomentRow> rows(n);
        auto guard = [&](int i, const std::function<MomentSet()>& f) {
            const double th = p.omega * grid[i];
            try {
                MomentRow r;
                r.m = f();
                r.m.time_omega_t = th;
                r.regime = regime_of(p, th);
                rows[i] = r;
            } catch (const std::exception& e) {
                rows[i] = detail::failed_row(engine, th, e.what());
            }
        };
        if (engine == "exact") {
            try {
                const auto tr = evolve_exact(p, grid, c.evolve);
                const auto mats = build_spin_matrices(p.N, Basis::JxEigen);
                parallel_for(n, [&](int i) {
                    guard(i, [&] {
                        return exact_moments(conditional_state_exact(tr.state(i), p, grid[i], res.nc, res.nd),
                                             mats);
                    });
                }, threads);
            } catch (const std::exception& e) {
                for (int i = 0; i < n; ++i) rows[i] = detail::failed_row(engine, p.omega * grid[i], e.what());
            }
        } else if (engine == "hybrid-numeric") {
            HybridOptions ho;
            ho.mode = c.hybrid_mode;
            const HPState init = hp_initial_state(p);
            parallel_for(n, [&](int i) {
                guard(i, [&] {
                    return hp_moments(hp_conditional_state_numeric(p, res.nc, res.nd, grid[i], init, ho), p.N);
                });
            }, threads);
        } else if (engine == "closed-form") {
            for (int i = 0; i < n; ++i) guard(i, [&] { return closed_form_moments(p, grid[i]); });
        } else {
            throw ConfigError("unknown engine '" + engine + "'");
        }
        for (auto& r : rows) {
            if (r.regime == "failed")
                res.failures.push_back(engine + " at Omega t = " + fmt_num(r.m.time_omega_t) + ": " + r.error);
            res.rows.push_back(std::move(r));
        }
    }
    return res;
}

/** Reproducibility header: every line starts with '#'. */
inline void write_parameter_echo(std::ostream& os, const ExperimentConfig& c, int nc, int nd) {
    const auto& p = c.params;
    const auto v = validity_time(p);
    os << "# name = " << c.name << '\n'
       << "# source = " << (c.source.empty() ? "built-in preset" : c.source) << '\n'
       << "# N = " << p.N << '\n'
       << "# omega = " << fmt_num(p.omega) << '\n'
       << "# g = " << fmt_num(p.g) << '\n'
       << "# kappa = " << fmt_num(p.kappa()) << '\n'
       << "# alpha_l = " << fmt_num(p.alpha_l.real()) << ',' << fmt_num(p.alpha_l.imag()) << '\n'
       << "# alpha_r = " << fmt_num(p.alpha_r.real()) << ',' << fmt_num(p.alpha_r.imag()) << '\n'
       << "# alpha = " << fmt_num(p.alpha.real()) << ',' << fmt_num(p.alpha.imag()) << '\n'
       << "# beta = " << fmt_num(p.beta.real()) << ',' << fmt_num(p.beta.imag()) << '\n'
       << "# n_c = " << nc << '\n'
       << "# n_d = " << nd << '\n'
       << "# omega_t_max = " << fmt_num(c.omega_t_max) << '\n'
       << "# steps = " << c.steps << '\n'
       << "# omega_t_star = " << fmt_num(v.omega_t_star) << '\n'
       << "# hybrid_mode = " << to_string(c.hybrid_mode) << '\n'
       << "# dtheta = " << fmt_num(c.evolve.dtheta) << '\n';
}

inline void write_moments_csv(std::ostream& os, const RunResult& r) {
    write_parameter_echo(os, r.config, r.nc, r.nd);
    os << "time_omega_t,engine,mean_x,mean_p,var_x,var_p,regime_flag\n";
    for (const auto& row : r.rows)
        os << fmt_num(row.m.time_omega_t) << ',' << row.m.engine << ',' << fmt_num(row.m.mean_x) << ','
           << fmt_num(row.m.mean_p) << ',' << fmt_num(row.m.var_x) << ',' << fmt_num(row.m.var_p) << ','
           << row.regime << '\n';
}

inline void write_moments_csv(const std::filesystem::path& path, const RunResult& r) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    write_moments_csv(f, r);
}

struct QSnapshot {
    double time_omega_t = 0.0;
    QGrid numeric;
    bool has_closed = false;
    QGrid closed;
    double width2_x = 0.0, width2_y = 0.0;  // ray-slice widths of the numeric grid
    double width2_x_closed = 0.0, width2_y_closed = 0.0;
    std::string warning;  // grid too small for the state, not an engine failure
    std::string error;
};

struct QRun {
    ExperimentConfig config;
    int nc = 0, nd = 0;
    std::vector<QSnapshot> snapshots;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    [[nodiscard]] bool ok() const { return failures.empty(); }
};

/** Hybrid Q-function snapshots; a closed-form grid rides along when that engine is requested. */
[[nodiscard]] inline QRun run_qfunction(const ExperimentConfig& c, int threads = 0) {
    QRun res;
    res.config = c;
    std::tie(res.nc, res.nd) = resolve_outcome(c);
    const SystemParams& p = c.params;
    HybridOptions ho;
    ho.mode = c.hybrid_mode;
    const HPState init = hp_initial_state(p);
    const int n = static_cast<int>(c.snapshots.size());
    res.snapshots.resize(n);
    parallel_for(n, [&](int i) {
        QSnapshot& s = res.snapshots[i];
        s.time_omega_t = c.snapshots[i];
        const double t = s.time_omega_t / p.omega;
        try {
            const HPState st = hp_conditional_state_numeric(p, res.nc, res.nd, t, init, ho);
            s.numeric = q_function_numeric(st, c.grid);
            s.width2_x = ray_width_axis(s.numeric, true);
            s.width2_y = ray_width_axis(s.numeric, false);
            if (!s.numeric.coverage_ok)
                s.warning = "Q integral " + fmt_num(s.numeric.integral) + " misses 1 by more than 2%";
            if (c.wants("closed-form")) {
                s.closed = q_function_closed_grid(p, res.nc, res.nd, t, c.grid, QBranch::Balanced);
                s.has_closed = true;
                s.width2_x_closed = q_width(p, t, 0.0);
                s.width2_y_closed = q_width(p, t, kPi / 2);
            }
        } catch (const std::exception& e) {
            s.error = e.what();
        }
    }, threads);
    for (const auto& s : res.snapshots) {
        if (!s.error.empty()) res.failures.push_back("Omega t = " + fmt_num(s.time_omega_t) + ": " + s.error);
        if (!s.warning.empty()) res.warnings.push_back("Omega t = " + fmt_num(s.time_omega_t) + ": " + s.warning);
    }
    return res;
}

/** One grid CSV per snapshot plus a width summary; returns the files written. */
inline std::vector<std::filesystem::path> write_qfunction_outputs(const std::filesystem::path& dir,
                                                                  const QRun& r) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    for (const auto& s : r.snapshots) {
        if (s.numeric.values.size() == 0) continue;
        const std::string tag = fmt_num(s.time_omega_t);
        files.push_back(dir / ("qgrid_hybrid-numeric_t" + tag + ".csv"));
        write_qgrid_csv(s.numeric, files.back().string());
        if (s.has_closed) {
            files.push_back(dir / ("qgrid_closed-form_t" + tag + ".csv"));
            write_qgrid_csv(s.closed, files.back().string());
        }
    }
    files.push_back(dir / "qfunction_widths.csv");
    std::ofstream f(files.back());
    if (!f) throw Error("cannot write " + files.back().string());
    write_parameter_echo(f, r.config, r.nc, r.nd);
    f << "time_omega_t,integral,coverage_ok,width2_x,width2_y,width2_x_closed,width2_y_closed,regime_flag\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : r.snapshots) {
        const bool bad = !s.error.empty();
        f << fmt_num(s.time_omega_t) << ',' << fmt_num(bad ? nan : s.numeric.integral) << ','
          << (!bad && s.numeric.coverage_ok ? 1 : 0) << ',' << fmt_num(bad ? nan : s.width2_x) << ',' << fmt_num(bad ? nan : s.width2_y) << ','
          << fmt_num(s.has_closed ? s.width2_x_closed : nan) << ',' << fmt_num(s.has_closed ? s.width2_y_closed : nan)
          << ',' << (bad ? "failed" : regime_of(r.config.params, s.time_omega_t)) << '\n';
    }
    return files;
}

/** Per-engine sweep summary of a moment run. */
[[nodiscard]] inline nlohmann::ordered_json summarize(const RunResult& r) {
    nlohmann::ordered_json j;
    const auto v = validity_time(r.config.params);
    j["name"] = r.config.name;
    j["source"] = r.config.source;
    j["N"] = r.config.params.N;
    j["n_c"] = r.nc;
    j["n_d"] = r.nd;
    j["omega_t_star"] = v.bounded ? nlohmann::ordered_json(v.omega_t_star) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json engines = nlohmann::ordered_json::object();
    for (const auto& e : r.config.engines) {
        const auto rows = r.engine_rows(e);
        double best = std::numeric_limits<double>::infinity(), at = 0.0, pmin = best, pmax = -best;
        int failed = 0;
        for (const auto* row : rows) {
            if (row->regime == "failed") {
                ++failed;
                continue;
            }
            if (row->m.var_x < best) best = row->m.var_x, at = row->m.time_omega_t;
            pmin = std::min(pmin, row->m.product());
            pmax = std::max(pmax, row->m.product());
        }
        nlohmann::ordered_json ej;
        const bool any = failed < static_cast<int>(rows.size());
        ej["min_var_x"] = any ? nlohmann::ordered_json(best) : nlohmann::ordered_json(nullptr);
        ej["argmin_omega_t"] = any ? nlohmann::ordered_json(at) : nlohmann::ordered_json(nullptr);
        ej["min_uncertainty_product"] = any ? nlohmann::ordered_json(pmin) : nlohmann::ordered_json(nullptr);
        ej["max_uncertainty_product"] = any ? nlohmann::ordered_json(pmax) : nlohmann::ordered_json(nullptr);
        ej["failed_points"] = failed;
        engines[e] = ej;
    }
    j["engines"] = engines;
    return j;
}

/** Runs every config in order; output depends only on the inputs. */
[[nodiscard]] inline nlohmann::ordered_json run_sweep(const std::vector<ExperimentConfig>& configs,
                                                      bool* all_ok = nullptr, int threads = 0) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    bool ok = true;
    for (const auto& c : configs) {
        const RunResult r = run_moments(c, threads);
        ok = ok && r.ok();
        out.push_back(summarize(r));
    }
    if (all_ok) *all_ok = ok;
    return out;
}

/** Sign changes of a sampled series, used to read off precession frequencies. */
[[nodiscard]] inline int count_sign_changes(const std::vector<double>& v) {
    int n = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if ((v[i - 1] < 0.0) != (v[i] < 0.0)) ++n;
    return n;
}

}  // namespace qnd

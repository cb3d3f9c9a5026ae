// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

// qndsim: command-line front end for the figure runners and sweeps.
// Exit codes: 0 success, 1 an engine failed on some row, 2 bad input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <qnd/qnd.hpp>

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::vector<std::string> configs;
    std::string out = "out";
    std::string engines;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& a, bool many_configs) {
    if (many_configs)
        sub->add_option("--config", a.configs, "Config file (repeatable)");
    else
        sub->add_option("--config", a.configs, "Config file")->expected(0, 1);
    sub->add_option("--out", a.out, "Output directory")->capture_default_str();
    sub->add_option("--engines", a.engines, "Comma list of exact, hybrid-numeric, closed-form");
    sub->add_option("--threads", a.threads, "Worker threads, 0 = hardware concurrency")->capture_default_str();
}

/** Configs from files, or the given presets when no file is named. */
std::vector<qnd::ExperimentConfig> resolve(const CommonArgs& a, const std::vector<std::string>& presets) {
    std::vector<qnd::ExperimentConfig> v;
    if (a.configs.empty())
        for (const auto& p : presets) v.push_back(qnd::preset_config(p));
    else
        for (const auto& path : a.configs) v.push_back(qnd::load_config(path));
    if (!a.engines.empty())
        for (auto& c : v) c.engines = qnd::parse_engines(a.engines);
    return v;
}

void report(const std::vector<std::string>& lines, const char* tag) {
    for (const auto& l : lines) std::cerr << tag << ": " << l << '\n';
}

int moments_command(const CommonArgs& a, const std::vector<std::string>& presets, const std::string& stem) {
    bool ok = true;
    const auto configs = resolve(a, presets);
    for (const auto& c : configs) {
        const auto r = qnd::run_moments(c, a.threads);
        const fs::path file = fs::path(a.out) / (configs.size() == 1 ? stem + ".csv" : stem + "_" + c.name + ".csv");
        qnd::write_moments_csv(file, r);
        std::cout << file.string() << '\n';
        report(r.failures, "failed");
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}

int qfunction_command(const CommonArgs& a) {
    bool ok = true;
    for (const auto& c : resolve(a, {"qfunction"})) {
        const auto r = qnd::run_qfunction(c, a.threads);
        for (const auto& f : qnd::write_qfunction_outputs(fs::path(a.out), r)) std::cout << f.string() << '\n';
        report(r.warnings, "warning");
        report(r.failures, "failed");
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}

int sweep_command(const CommonArgs& a) {
    bool ok = true;
    const auto summary = qnd::run_sweep(resolve(a, {}), &ok, a.threads);
    fs::create_directories(a.out);
    const fs::path file = fs::path(a.out) / "sweep.json";
    std::ofstream f(file);
    if (!f) throw qnd::Error("cannot write " + file.string());
    f << summary.dump(2) << '\n';
    std::cout << file.string() << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional spin squeezing under QND measurement"};
    app.require_subcommand(1);
    CommonArgs a;
    auto* variances = app.add_subcommand("fig-variances", "Variances, fully polarized atoms");
    auto* qfunction = app.add_subcommand("fig-qfunction", "Husimi Q snapshots, N = 1000");
    auto* means = app.add_subcommand("fig-means", "Means, imperfect polarization");
    auto* imperfect = app.add_subcommand("fig-variances-imperfect", "Variances, imperfect polarization");
    auto* sweep = app.add_subcommand("sweep", "JSON summary over configs");
    for (auto* s : {variances, qfunction, means, imperfect}) add_common(s, a, false);
    add_common(sweep, a, true);
    CLI11_PARSE(app, argc, argv);

    try {
        if (*variances) return moments_command(a, {"variances"}, "fig_variances");
        if (*qfunction) return qfunction_command(a);
        if (*means) return moments_command(a, {"imperfect-small", "imperfect-large"}, "fig_means");
        if (*imperfect)
            return moments_command(a, {"imperfect-small", "imperfect-large"}, "fig_variances_imperfect");
        if (*sweep) return sweep_command(a);
    } catch (const qnd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

// Copyright 2026 The qndsqueeze Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Experiment configuration: INI-style sections with key = value pairs.
 *
 * Numeric values accept arithmetic with + - * / ^, parentheses, sqrt(), pi
 * and, for the coupling, the names N and omega. Example:
 *
 *   [system]
 *   preset = variances
 *   N = 200
 *   omega = pi/4
 *   g = 0.1*omega/N
 *   alpha_l = sqrt(20)
 *
 *   [time]
 *   omega_t_max = 300
 *   steps = 300
 */

#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "exact_solver.hpp"
#include "husimi.hpp"
#include "hybrid.hpp"
#include "spin_algebra.hpp"

namespace qnd {

/// Recursive-descent evaluator for config values.
class Expression {
public:
    explicit Expression(std::string src, std::map<std::string, double> vars = {})
        : s_(std::move(src)), vars_(std::move(vars)) {}

    [[nodiscard]] double eval() {
        pos_ = 0;
        const double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return v;
    }

private:
    std::string s_;
    std::map<std::string, double> vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("cannot evaluate '" + s_ + "': " + why);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) v /= unary();
            else return v;
        }
    }
    // unary minus binds looser than ^, so -2^2 = -4
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    double power() {
        const double b = atom();
        if (eat('^')) return std::pow(b, unary());
        return b;
    }
    double atom() {
        skip();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            std::size_t b = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id = s_.substr(b, pos_ - b);
            if (id == "sqrt") {
                if (!eat('(')) fail("sqrt needs '('");
                const double v = sum();
                if (!eat(')')) fail("missing ')'");
                return std::sqrt(v);
            }
            if (id == "pi") return kPi;
            auto it = vars_.find(id);
            if (it == vars_.end()) fail("unknown name " + id);
            return it->second;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s_.substr(pos_), &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += used;
        return v;
    }
};

enum class OutcomePolicy { MostProbableBalanced, Explicit };

inline const std::vector<std::string>& all_engines() {
    static const std::vector<std::string> e{"exact", "hybrid-numeric", "closed-form"};
    return e;
}

struct ExperimentConfig {
    std::string name = "default";
    SystemParams params = presets::variances();
    double omega_t_max = 300.0;
    int steps = 300;
    std::vector<double> snapshots{0, 50, 100, 150, 200, 300};
    OutcomePolicy policy = OutcomePolicy::MostProbableBalanced;
    int nc = -1, nd = -1;
    std::vector<std::string> engines = all_engines();
    DisentangleMode hybrid_mode = DisentangleMode::LeadingOrder;
    EvolveOptions evolve;
    GridSpec grid;
    std::string source;  // path the config came from, empty for presets

    [[nodiscard]] bool wants(const std::string& engine) const {
        for (const auto& e : engines)
            if (e == engine) return true;
        return false;
    }
};

[[nodiscard]] inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

[[nodiscard]] inline std::vector<std::string> parse_engines(const std::string& s) {
    auto v = split_list(s);
    for (const auto& e : v) {
        bool known = false;
        for (const auto& k : all_engines()) known = known || (k == e);
        if (!known) throw ConfigError("unknown engine '" + e + "'");
    }
    if (v.empty()) throw ConfigError("engine list is empty");
    return v;
}

/** (n_c, n_d) = round(A/2) each; an odd rounded total A puts the extra click on d. */
[[nodiscard]] inline std::pair<int, int> most_probable_balanced(const SystemParams& p) {
    const long total = std::lround(p.total_intensity());
    const int nc = static_cast<int>(total / 2);
    return {nc, static_cast<int>(total % 2 == 0 ? nc : nc + 1)};
}

[[nodiscard]] inline std::pair<int, int> resolve_outcome(const ExperimentConfig& c) {
    if (c.policy == OutcomePolicy::Explicit) {
        if (c.nc < 0 || c.nd < 0) throw ConfigError("explicit outcome needs n_c and n_d");
        return {c.nc, c.nd};
    }
    return most_probable_balanced(c.params);
}

[[nodiscard]] inline SystemParams preset_by_name(const std::string& n) {
    if (n == "variances") return presets::variances();
    if (n == "qfunction") return presets::qfunction();
    if (n == "imperfect-small") return presets::imperfect_small();
    if (n == "imperfect-large") return presets::imperfect_large();
    throw ConfigError("unknown preset '" + n + "'");
}

/** Config for a figure family without a file. */
[[nodiscard]] inline ExperimentConfig preset_config(const std::string& preset) {
    ExperimentConfig c;
    c.name = preset;
    c.params = preset_by_name(preset);
    if (preset == "variances") {
        c.omega_t_max = 300.0;
        c.steps = 150;
    } else if (preset == "qfunction") {
        c.omega_t_max = 300.0;
        c.steps = 60;
    } else {
        c.omega_t_max = 100.0;
        c.steps = 400;
    }
    return c;
}

[[nodiscard]] inline ExperimentConfig parse_config_string(const std::string& text,
                                                          const std::string& source = "") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
        return std::nullopt;
    };
    auto num = [&](const std::string& key, const std::map<std::string, double>& vars = {}) -> std::optional<double> {
        if (auto v = get(key)) return Expression(*v, vars).eval();
        return std::nullopt;
    };

    ExperimentConfig c;
    c.source = source;
    if (auto v = get("system.preset")) c = preset_config(*v), c.source = source;
    if (auto v = get("name")) c.name = *v;
    if (auto v = get("system.name")) c.name = *v;

    SystemParams& p = c.params;
    const bool g_given = get("system.g").has_value();
    const double g_scale = p.g * p.N / p.omega;  // keep g ∝ Ω/N when only N or Ω change
    if (auto v = num("system.N")) {
        if (*v != std::floor(*v) || *v < 1) throw ConfigError("N must be a positive integer");
        p.N = static_cast<int>(*v);
    }
    if (auto v = num("system.omega")) p.omega = *v;
    if (g_given)
        p.g = *num("system.g", {{"N", static_cast<double>(p.N)}, {"omega", p.omega}});
    else
        p.g = g_scale * p.omega / p.N;
    auto amp = [&](const std::string& key, cplx& target) {
        const auto mag = num("system." + key);
        const auto ph = num("system." + key + "_phase");
        if (mag || ph) target = std::polar(mag ? *mag : std::abs(target), ph ? *ph : std::arg(target));
    };
    amp("alpha_l", p.alpha_l);
    amp("alpha_r", p.alpha_r);
    amp("alpha", p.alpha);
    amp("beta", p.beta);
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    if (auto v = num("time.omega_t_max")) c.omega_t_max = *v;
    if (auto v = num("time.steps")) c.steps = static_cast<int>(*v);
    if (c.steps < 1 || !(c.omega_t_max > 0.0)) throw ConfigError("time grid needs steps >= 1 and omega_t_max > 0");
    if (auto v = get("time.snapshots")) {
        c.snapshots.clear();
        for (const auto& s : split_list(*v)) c.snapshots.push_back(Expression(s).eval());
    }
    if (auto v = get("outcome.policy")) {
        if (*v == "most-probable-balanced") c.policy = OutcomePolicy::MostProbableBalanced;
        else if (*v == "explicit") c.policy = OutcomePolicy::Explicit;
        else throw ConfigError("unknown outcome policy '" + *v + "'");
    }
    if (auto v = num("outcome.n_c")) c.nc = static_cast<int>(*v);
    if (auto v = num("outcome.n_d")) c.nd = static_cast<int>(*v);
    if (c.policy == OutcomePolicy::Explicit && (c.nc < 0 || c.nd < 0))
        throw ConfigError("explicit outcome needs n_c and n_d");
    if (auto v = get("engines.list")) c.engines = parse_engines(*v);
    if (auto v = get("hybrid.mode")) {
        if (*v == "leading-order") c.hybrid_mode = DisentangleMode::LeadingOrder;
        else if (*v == "exact") c.hybrid_mode = DisentangleMode::Exact;
        else throw ConfigError("unknown hybrid mode '" + *v + "'");
    }
    if (auto v = num("exact.dtheta")) c.evolve.dtheta = *v;
    if (auto v = get("exact.integrator")) {
        if (*v == "su2") c.evolve.integrator = Integrator::Su2Spinor;
        else if (*v == "tridiagonal") c.evolve.integrator = Integrator::Tridiagonal;
        else throw ConfigError("unknown integrator '" + *v + "'");
    }
    if (auto v = num("qfunction.nu_max")) c.grid.nu_max = *v;
    if (auto v = num("qfunction.resolution")) c.grid.resolution = static_cast<int>(*v);
    return c;
}

[[nodiscard]] inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_string(ss.str(), path);
}

}  // namespace qnd

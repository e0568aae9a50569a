#pragma once

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lfcsafe/scenario.hpp"

namespace lfcsafe {

/// Parse failure that cites the source location and the offending field.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& source, int line, std::string field,
                const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message +
                             (field.empty() ? std::string()
                                            : " (field '" + field + "')")),
          line_(line),
          field_(std::move(field)) {}

    int line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    int line_;
    std::string field_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct ConfigParser {
    const std::string& source;
    int line = 0;
    std::string section;
    std::string key;
    std::set<std::string> seen;

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(source, line, key.empty() ? section : section + "." + key, message);
    }

    double number(std::string_view v) const {
        const std::string buf(v);
        char* end = nullptr;
        errno = 0;
        const double x = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size() || buf.empty() || errno == ERANGE)
            fail("expected a number, got '" + buf + "'");
        return x;
    }

    std::uint64_t unsigned_int(std::string_view v) const {
        const std::string buf(v);
        char* end = nullptr;
        errno = 0;
        const unsigned long long x = std::strtoull(buf.c_str(), &end, 10);
        if (end != buf.c_str() + buf.size() || buf.empty() || errno == ERANGE ||
            buf.front() == '-')
            fail("expected a non-negative integer, got '" + buf + "'");
        return x;
    }

    bool boolean(std::string_view v) const {
        if (v == "true") return true;
        if (v == "false") return false;
        fail("expected 'true' or 'false', got '" + std::string(v) + "'");
    }

    std::vector<double> numbers(std::string_view v, std::size_t count) const {
        std::istringstream in{std::string(v)};
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(number(tok));
        if (out.size() != count)
            fail("expected " + std::to_string(count) + " numbers, got " +
                 std::to_string(out.size()));
        return out;
    }
};

}  // namespace detail

/**
 * Parses the INI-style scenario format: [section] headers, key = value
 * lines, full-line comments starting with '#' or ';'.  Unknown sections or
 * keys and duplicate keys are rejected.  The parsed config is validated
 * before being returned.
 */
inline ScenarioConfig parse_config(const std::string& text,
                                   const std::string& source = "<config>") {
    ScenarioConfig cfg;
    detail::ConfigParser p{source, 0, "", "", {}};
    bool have_duration = false;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        p.key.clear();
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            const std::string name{detail::trim(line.substr(1, line.size() - 2))};
            static const std::set<std::string> known = {"system",    "limits",  "relays",
                                                        "scc",       "estimator", "attack",
                                                        "disturbance", "sim"};
            if (!known.count(name)) {
                p.section = name;
                p.fail("unknown section [" + name + "]");
            }
            p.section = name;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) p.fail("expected 'key = value'");
        p.key = std::string(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (p.key.empty()) p.fail("empty key");
        if (p.section.empty()) p.fail("key outside any [section]");

        const std::string qualified = p.section + "." + p.key;
        const bool repeatable = qualified == "disturbance.step";
        if (!repeatable && !p.seen.insert(qualified).second) p.fail("duplicate key");

        auto& k = p.key;
        if (p.section == "system") {
            if (k == "tau_g") cfg.params.tau_g = p.number(value);
            else if (k == "tau_t") cfg.params.tau_t = p.number(value);
            else if (k == "tau_omega") cfg.params.tau_omega = p.number(value);
            else if (k == "tau_nu") cfg.params.tau_nu = p.number(value);
            else if (k == "inertia_m") cfg.params.inertia_m = p.number(value);
            else if (k == "damping_d") cfg.params.damping_d = p.number(value);
            else if (k == "droop_r") cfg.params.droop_r = p.number(value);
            else if (k == "gain_k") cfg.params.gain_k = p.number(value);
            else if (k == "omega_ref") cfg.params.omega_ref = p.number(value);
            else p.fail("unknown key");
        } else if (p.section == "limits") {
            if (k == "f_over") cfg.limits.f_over = p.number(value);
            else if (k == "f_under") cfg.limits.f_under = p.number(value);
            else if (k == "rocof_limit") cfg.limits.rocof_limit = p.number(value);
            else p.fail("unknown key");
        } else if (p.section == "relays") {
            if (k == "of_threshold") cfg.relay_cfg.of_threshold = p.number(value);
            else if (k == "of_clearing") cfg.relay_cfg.of_clearing = p.number(value);
            else if (k == "uf_threshold") cfg.relay_cfg.uf_threshold = p.number(value);
            else if (k == "uf_clearing") cfg.relay_cfg.uf_clearing = p.number(value);
            else if (k == "rocof_threshold") cfg.relay_cfg.rocof_threshold = p.number(value);
            else if (k == "rocof_pickup") cfg.relay_cfg.rocof_pickup = p.number(value);
            else p.fail("unknown key");
        } else if (p.section == "scc") {
            if (k == "enabled") cfg.scc_enabled = p.boolean(value);
            else if (k == "alpha") cfg.scc_cfg.alpha = p.number(value);
            else if (k == "t_s") cfg.scc_cfg.t_s = p.number(value);
            else if (k == "h_floor") cfg.scc_cfg.h_floor = p.number(value);
            else if (k == "load_input") {
                if (value == "measured") cfg.scc_cfg.load_input = LoadInputMode::measured;
                else if (value == "zero") cfg.scc_cfg.load_input = LoadInputMode::zero;
                else p.fail("expected 'measured' or 'zero'");
            } else p.fail("unknown key");
        } else if (p.section == "estimator") {
            if (k == "use_true_state") cfg.estimator.use_true_state = p.boolean(value);
            else if (k == "q_scale") cfg.estimator.q_scale = p.number(value);
            else if (k == "r_scale") cfg.estimator.r_scale = p.number(value);
            else if (k == "p0_scale") cfg.estimator.p0_scale = p.number(value);
            else if (k == "measurement_noise_std")
                cfg.estimator.measurement_noise_std = p.number(value);
            else if (k == "x0_hat") {
                const auto v = p.numbers(value, 5);
                for (int i = 0; i < 5; ++i) cfg.estimator.x0_hat(i) = v[static_cast<size_t>(i)];
            } else p.fail("unknown key");
        } else if (p.section == "attack") {
            if (k == "kind") {
                if (value == "none") cfg.attack.kind = AttackKind::none;
                else if (value == "sinusoid") cfg.attack.kind = AttackKind::sinusoid;
                else if (value == "bias") cfg.attack.kind = AttackKind::bias;
                else if (value == "ramp") cfg.attack.kind = AttackKind::ramp;
                else p.fail("expected none|sinusoid|bias|ramp");
            } else if (k == "amplitude") cfg.attack.amplitude = p.number(value);
            else if (k == "frequency") cfg.attack.frequency = p.number(value);
            else if (k == "phase") cfg.attack.phase = p.number(value);
            else if (k == "t_start") cfg.attack.t_start = p.number(value);
            else if (k == "t_end") cfg.attack.t_end = p.number(value);
            else if (k == "mode") {
                if (value == "replace") cfg.attack.mode = AttackMode::replace;
                else if (value == "add") cfg.attack.mode = AttackMode::add;
                else p.fail("expected 'replace' or 'add'");
            } else p.fail("unknown key");
        } else if (p.section == "disturbance") {
            if (k == "step") {
                const auto v = p.numbers(value, 2);
                cfg.disturbance.load_steps.push_back({v[0], v[1]});
            } else p.fail("unknown key");
        } else if (p.section == "sim") {
            if (k == "duration") {
                cfg.duration = p.number(value);
                have_duration = true;
            } else if (k == "dt") cfg.dt = p.number(value);
            else if (k == "seed") cfg.seed = p.unsigned_int(value);
            else if (k == "on_trip") {
                if (value == "halt") cfg.on_trip = TripPolicy::halt;
                else if (value == "continue") cfg.on_trip = TripPolicy::keep_running;
                else p.fail("expected 'halt' or 'continue'");
            } else p.fail("unknown key");
        }
    }

    if (!have_duration) {
        p.line = 0;
        p.section = "sim";
        p.key = "duration";
        p.fail("missing required key");
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "", "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

namespace detail {

inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Serializes with 17 significant digits so parse -> serialize round-trips exactly.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    using detail::fmt_full;
    std::ostringstream out;
    out << "[system]\n";
    out << "tau_g = " << fmt_full(cfg.params.tau_g) << "\n";
    out << "tau_t = " << fmt_full(cfg.params.tau_t) << "\n";
    out << "tau_omega = " << fmt_full(cfg.params.tau_omega) << "\n";
    out << "tau_nu = " << fmt_full(cfg.params.tau_nu) << "\n";
    out << "inertia_m = " << fmt_full(cfg.params.inertia_m) << "\n";
    out << "damping_d = " << fmt_full(cfg.params.damping_d) << "\n";
    out << "droop_r = " << fmt_full(cfg.params.droop_r) << "\n";
    out << "gain_k = " << fmt_full(cfg.params.gain_k) << "\n";
    out << "omega_ref = " << fmt_full(cfg.params.omega_ref) << "\n";
    out << "\n[limits]\n";
    out << "f_over = " << fmt_full(cfg.limits.f_over) << "\n";
    out << "f_under = " << fmt_full(cfg.limits.f_under) << "\n";
    out << "rocof_limit = " << fmt_full(cfg.limits.rocof_limit) << "\n";
    out << "\n[relays]\n";
    out << "of_threshold = " << fmt_full(cfg.relay_cfg.of_threshold) << "\n";
    out << "of_clearing = " << fmt_full(cfg.relay_cfg.of_clearing) << "\n";
    out << "uf_threshold = " << fmt_full(cfg.relay_cfg.uf_threshold) << "\n";
    out << "uf_clearing = " << fmt_full(cfg.relay_cfg.uf_clearing) << "\n";
    out << "rocof_threshold = " << fmt_full(cfg.relay_cfg.rocof_threshold) << "\n";
    out << "rocof_pickup = " << fmt_full(cfg.relay_cfg.rocof_pickup) << "\n";
    out << "\n[scc]\n";
    out << "enabled = " << (cfg.scc_enabled ? "true" : "false") << "\n";
    out << "alpha = " << fmt_full(cfg.scc_cfg.alpha) << "\n";
    out << "t_s = " << fmt_full(cfg.scc_cfg.t_s) << "\n";
    out << "h_floor = " << fmt_full(cfg.scc_cfg.h_floor) << "\n";
    out << "load_input = "
        << (cfg.scc_cfg.load_input == LoadInputMode::measured ? "measured" : "zero") << "\n";
    out << "\n[estimator]\n";
    out << "use_true_state = " << (cfg.estimator.use_true_state ? "true" : "false") << "\n";
    out << "q_scale = " << fmt_full(cfg.estimator.q_scale) << "\n";
    out << "r_scale = " << fmt_full(cfg.estimator.r_scale) << "\n";
    out << "p0_scale = " << fmt_full(cfg.estimator.p0_scale) << "\n";
    out << "measurement_noise_std = " << fmt_full(cfg.estimator.measurement_noise_std) << "\n";
    out << "x0_hat =";
    for (int i = 0; i < 5; ++i) out << " " << fmt_full(cfg.estimator.x0_hat(i));
    out << "\n";
    out << "\n[attack]\n";
    out << "kind = " << to_string(cfg.attack.kind) << "\n";
    out << "amplitude = " << fmt_full(cfg.attack.amplitude) << "\n";
    out << "frequency = " << fmt_full(cfg.attack.frequency) << "\n";
    out << "phase = " << fmt_full(cfg.attack.phase) << "\n";
    out << "t_start = " << fmt_full(cfg.attack.t_start) << "\n";
    out << "t_end = " << fmt_full(cfg.attack.t_end) << "\n";
    out << "mode = " << to_string(cfg.attack.mode) << "\n";
    out << "\n[disturbance]\n";
    for (const auto& s : cfg.disturbance.load_steps)
        out << "step = " << fmt_full(s.time) << " " << fmt_full(s.delta) << "\n";
    out << "\n[sim]\n";
    out << "duration = " << fmt_full(cfg.duration) << "\n";
    out << "dt = " << fmt_full(cfg.dt) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "on_trip = " << to_string(cfg.on_trip) << "\n";
    return out.str();
}

inline void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << serialize_config(cfg);
}

}  // namespace lfcsafe

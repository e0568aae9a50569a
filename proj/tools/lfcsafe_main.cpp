// Command-line front end: scenario runs, alpha sweeps, attack calibration,
// and static plots over recorded traces.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfcsafe/lfcsafe.hpp"

namespace fs = std::filesystem;
using namespace lfcsafe;

namespace {

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void print_summary(const RunResult& res, const ScenarioConfig& cfg) {
    const auto& s = res.summary;
    std::cout << "records:             " << res.trace.size() << " (dt = " << g9(cfg.dt)
              << " s)\n";
    std::cout << "final time:          " << g9(res.trace.empty() ? 0.0 : res.trace.back().t)
              << " s\n";
    std::cout << "max |d_omega_hat|:   " << g9(s.max_abs_d_omega_hat) << " pu\n";
    std::cout << "max |omega_dot_hat|: " << g9(s.max_abs_omega_dot_hat) << " pu/s\n";
    std::cout << "scc_active_time:     " << g9(s.scc_active_time) << " s in "
              << s.scc_activation_intervals.size() << " interval(s)\n";
    std::cout << "alarm_count:         " << s.alarm_count << "\n";
    if (s.settling_time < 0.0)
        std::cout << "settling_time:       not settled\n";
    else
        std::cout << "settling_time:       " << g9(s.settling_time) << " s\n";
    if (s.trip_events.empty()) {
        std::cout << "trips:               none\n";
    } else {
        std::cout << "trips:              ";
        for (const auto& e : s.trip_events)
            std::cout << " " << to_string(e.element) << "@" << g9(e.time) << "s";
        std::cout << "\n";
    }
}

void write_artifacts(const RunResult& res, const ScenarioConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const fs::path trace_path = out_dir / "trace.csv";
    write_trace(res.trace, trace_path.string());
    save_config(cfg, (out_dir / "resolved.cfg").string());
    const auto files = write_standard_plots(res.trace, cfg.limits, cfg.relay_cfg.rocof_threshold,
                                            (out_dir / "trace").string());
    std::cout << "wrote " << trace_path.string() << "\n";
    std::cout << "wrote " << (out_dir / "resolved.cfg").string() << "\n";
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

struct RunOverrides {
    bool no_scc = false;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
};

ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOverrides& ov) {
    if (ov.no_scc) cfg.scc_enabled = false;
    if (ov.alpha) cfg.scc_cfg.alpha = *ov.alpha;
    if (ov.seed) cfg.seed = *ov.seed;
    cfg.validate();
    return cfg;
}

int cmd_run(const std::string& config_path, const RunOverrides& ov,
            const std::optional<std::string>& out_dir, bool fail_on_trip) {
    const ScenarioConfig cfg = apply_overrides(load_config(config_path), ov);
    const RunResult res = run(cfg);
    print_summary(res, cfg);
    if (out_dir) write_artifacts(res, cfg, *out_dir);
    if (fail_on_trip && !res.summary.trip_events.empty()) return 1;
    return 0;
}

int cmd_sweep_alpha(const std::string& config_path, const std::vector<double>& alphas,
                    const std::optional<std::string>& out_dir) {
    const ScenarioConfig base = load_config(config_path);
    std::printf("%10s %18s %18s %16s %12s %6s\n", "alpha", "max|d_omega_hat|",
                "max|omega_dot|", "scc_active [s]", "alarms", "trips");
    for (double alpha : alphas) {
        ScenarioConfig cfg = base;
        cfg.scc_enabled = true;
        cfg.scc_cfg.alpha = alpha;
        cfg.validate();
        const RunResult res = run(cfg);
        const auto& s = res.summary;
        std::printf("%10s %18s %18s %16s %12lld %6zu\n", g9(alpha).c_str(),
                    g9(s.max_abs_d_omega_hat).c_str(), g9(s.max_abs_omega_dot_hat).c_str(),
                    g9(s.scc_active_time).c_str(), static_cast<long long>(s.alarm_count),
                    s.trip_events.size());
        if (out_dir) {
            char sub[64];
            std::snprintf(sub, sizeof sub, "alpha_%.9g", alpha);
            write_artifacts(res, cfg, fs::path(*out_dir) / sub);
        }
    }
    return 0;
}

/// Grows the attack amplitude at the plant's resonant frequency until the
/// unfiltered loop trips, then bisects for the smallest tripping amplitude.
int cmd_calibrate(const std::string& config_path, double max_amplitude, bool write) {
    ScenarioConfig probe = load_config(config_path);
    probe.scc_enabled = false;
    probe.on_trip = TripPolicy::halt;
    if (probe.attack.kind == AttackKind::none) {
        probe.attack.kind = AttackKind::sinusoid;
        probe.attack.mode = AttackMode::replace;
        probe.attack.t_start = std::min(5.0, 0.25 * probe.duration);
        probe.attack.t_end = probe.duration;
    }
    const ContinuousModel model = build_continuous_model(probe.params);
    const double f_res = resonant_frequency(model);
    probe.attack.frequency = f_res;
    std::cout << "resonant frequency: " << g9(f_res) << " Hz\n";

    auto trips = [&probe](double amplitude) {
        ScenarioConfig cfg = probe;
        cfg.attack.amplitude = amplitude;
        cfg.validate();
        return !run(cfg).summary.trip_events.empty();
    };

    double lo = 0.0;          // largest amplitude known not to trip
    double hi = 0.01;         // candidate tripping amplitude
    bool found = false;
    for (; hi <= max_amplitude; hi *= 1.5) {
        const bool tripped = trips(hi);
        std::cout << "  amplitude " << g9(hi) << ": " << (tripped ? "trip" : "no trip") << "\n";
        if (tripped) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) {
        std::cerr << "no trip up to amplitude " << g9(max_amplitude)
                  << "; raise --max-amplitude or lengthen the attack window\n";
        return 1;
    }
    for (int i = 0; i < 20 && hi - lo > 1e-4; ++i) {
        const double mid = 0.5 * (lo + hi);
        (trips(mid) ? hi : lo) = mid;
    }
    const double threshold = hi;
    const double strong = 1.5 * threshold;
    const double weak = 0.4 * threshold;
    std::cout << "smallest tripping amplitude: " << g9(threshold) << "\n";
    std::cout << "suggested strong amplitude:  " << g9(strong) << " (1.5x threshold)\n";
    std::cout << "suggested weak amplitude:    " << g9(weak) << " (0.4x threshold)\n";

    if (write) {
        const fs::path base = fs::path(config_path);
        const std::string stem = (base.parent_path() / base.stem()).string();
        ScenarioConfig out = probe;
        out.scc_enabled = true;
        out.on_trip = TripPolicy::keep_running;
        out.attack.amplitude = strong;
        save_config(out, stem + "_strong.cfg");
        out.attack.amplitude = weak;
        save_config(out, stem + "_weak.cfg");
        std::cout << "wrote " << stem << "_strong.cfg\n";
        std::cout << "wrote " << stem << "_weak.cfg\n";
    }
    return 0;
}

int cmd_plot(const std::string& trace_path, const std::optional<std::string>& out_dir,
             const SafetyLimits& limits, double rocof_threshold) {
    const std::vector<TraceRecord> trace = read_trace(trace_path);
    fs::path stem = fs::path(trace_path);
    stem.replace_extension();
    if (out_dir) {
        fs::create_directories(*out_dir);
        stem = fs::path(*out_dir) / stem.filename();
    }
    const auto files = write_standard_plots(trace, limits, rocof_threshold, stem.string());
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Load-frequency control simulator with a safety-critical control filter"};
    app.require_subcommand(1);

    // run
    std::string run_config;
    RunOverrides ov;
    std::optional<std::string> run_out;
    bool fail_on_trip = false;
    double alpha_value = 0.0;
    std::uint64_t seed_value = 0;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario config");
    run_cmd->add_option("config", run_config, "scenario config file")->required();
    auto* out_opt = run_cmd->add_option("--out", "directory for trace.csv, resolved.cfg, plots");
    run_cmd->add_flag("--no-scc", ov.no_scc, "disable the safety filter");
    auto* alpha_opt = run_cmd->add_option("--alpha", alpha_value, "override the barrier decay rate");
    auto* seed_opt = run_cmd->add_option("--seed", seed_value, "override the noise seed");
    run_cmd->add_flag("--fail-on-trip", fail_on_trip, "exit 1 if any relay trips");

    // sweep-alpha
    std::string sweep_config;
    std::string alphas_csv = "3,20";
    std::optional<std::string> sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep-alpha", "Compare safety margins across alpha values");
    sweep_cmd->add_option("config", sweep_config, "scenario config file")->required();
    sweep_cmd->add_option("--alphas", alphas_csv, "comma-separated alpha values (default 3,20)");
    auto* sweep_out_opt = sweep_cmd->add_option("--out", "directory for per-alpha artifacts");

    // calibrate-attack
    std::string cal_config;
    double max_amplitude = 5.0;
    bool cal_write = false;
    auto* cal_cmd = app.add_subcommand(
        "calibrate-attack", "Find the smallest resonant amplitude that trips the unfiltered loop");
    cal_cmd->add_option("config", cal_config, "scenario config file")->required();
    cal_cmd->add_option("--max-amplitude", max_amplitude, "search cap (default 5.0)");
    cal_cmd->add_flag("--write", cal_write, "write <config>_strong.cfg and <config>_weak.cfg");

    // plot
    std::string plot_trace;
    std::optional<std::string> plot_out;
    SafetyLimits plot_limits;
    RelayConfig plot_relays;
    auto* plot_cmd = app.add_subcommand("plot", "Render frequency/ROCOF/control plots from a trace");
    plot_cmd->add_option("trace", plot_trace, "trace CSV produced by 'run --out'")->required();
    auto* plot_out_opt = plot_cmd->add_option("--out", "directory for the image files");
    plot_cmd->add_option("--f-over", plot_limits.f_over, "over-frequency line [pu]");
    plot_cmd->add_option("--f-under", plot_limits.f_under, "under-frequency line [pu]");
    plot_cmd->add_option("--rocof-threshold", plot_relays.rocof_threshold, "ROCOF line [pu/s]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (*alpha_opt) ov.alpha = alpha_value;
            if (*seed_opt) ov.seed = seed_value;
            if (*out_opt) run_out = out_opt->as<std::string>();
            return cmd_run(run_config, ov, run_out, fail_on_trip);
        }
        if (*sweep_cmd) {
            std::vector<double> alphas;
            std::istringstream parts(alphas_csv);
            for (std::string part; std::getline(parts, part, ',');)
                alphas.push_back(std::stod(part));
            if (alphas.empty()) throw CLI::ValidationError("--alphas", "needs at least one value");
            if (*sweep_out_opt) sweep_out = sweep_out_opt->as<std::string>();
            return cmd_sweep_alpha(sweep_config, alphas, sweep_out);
        }
        if (*cal_cmd) return cmd_calibrate(cal_config, max_amplitude, cal_write);
        if (*plot_cmd) {
            if (*plot_out_opt) plot_out = plot_out_opt->as<std::string>();
            return cmd_plot(plot_trace, plot_out, plot_limits, plot_relays.rocof_threshold);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

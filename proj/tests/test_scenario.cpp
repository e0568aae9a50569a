#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "lfcsafe/config.hpp"
#include "lfcsafe/scenario.hpp"
#include "lfcsafe/trace_io.hpp"

using namespace lfcsafe;
using Catch::Approx;

namespace {

ScenarioConfig base_config(double duration) {
    ScenarioConfig cfg;
    cfg.duration = duration;
    return cfg;
}

ScenarioConfig strong_attack_config(double duration) {
    ScenarioConfig cfg = base_config(duration);
    cfg.attack.kind = AttackKind::sinusoid;
    cfg.attack.amplitude = 0.45;
    cfg.attack.frequency = 0.283698;
    cfg.attack.t_start = 2.0;
    cfg.attack.t_end = duration;
    cfg.attack.mode = AttackMode::replace;
    return cfg;
}

std::string trace_bytes(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const auto& r : trace) out += format_trace_row(r) + "\n";
    return out;
}

}  // namespace

TEST_CASE("the closed loop rests at the origin", "[scenario]") {
    ScenarioConfig cfg = base_config(2.0);
    const RunResult res = run(cfg);
    REQUIRE(res.trace.size() == 2000);
    for (const auto& r : res.trace) {
        REQUIRE(r.x.cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(r.x_hat.cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(r.dp_c_star == 0.0);
        REQUIRE_FALSE(r.scc_modified);
        REQUIRE_FALSE(r.alarm);
        REQUIRE(r.trip_events.empty());
    }
    REQUIRE(res.summary.settling_time == 0.0);
    REQUIRE(res.summary.alarm_count == 0);
    REQUIRE(res.summary.scc_active_time == 0.0);
}

TEST_CASE("records are stamped at the end of each interval", "[scenario]") {
    ScenarioConfig cfg = base_config(0.01);
    const RunResult res = run(cfg);
    REQUIRE(res.trace.size() == 10);
    REQUIRE(res.trace.front().t == Approx(0.001).margin(1e-15));
    REQUIRE(res.trace.back().t == Approx(0.01).margin(1e-12));
}

TEST_CASE("runs are deterministic byte for byte", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(5.0);
    cfg.estimator.measurement_noise_std = 1e-5;
    cfg.seed = 42;
    const RunResult a = run(cfg);
    const RunResult b = run(cfg);
    REQUIRE(trace_bytes(a.trace) == trace_bytes(b.trace));

    cfg.seed = 43;
    const RunResult c = run(cfg);
    REQUIRE(trace_bytes(c.trace) != trace_bytes(a.trace));
}

TEST_CASE("the run summary equals a recomputation from the trace", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(12.0);
    const RunResult res = run(cfg);
    const RunSummary redo = summarize(res.trace, cfg.dt);
    REQUIRE(redo.max_abs_d_omega_hat == res.summary.max_abs_d_omega_hat);
    REQUIRE(redo.max_abs_omega_dot_hat == res.summary.max_abs_omega_dot_hat);
    REQUIRE(redo.alarm_count == res.summary.alarm_count);
    REQUIRE(redo.scc_active_time == res.summary.scc_active_time);
    REQUIRE(redo.settling_time == res.summary.settling_time);
    REQUIRE(redo.trip_events.size() == res.summary.trip_events.size());
    REQUIRE(redo.scc_activation_intervals.size() ==
            res.summary.scc_activation_intervals.size());
    for (size_t k = 0; k < redo.scc_activation_intervals.size(); ++k) {
        REQUIRE(redo.scc_activation_intervals[k].t_begin ==
                res.summary.scc_activation_intervals[k].t_begin);
        REQUIRE(redo.scc_activation_intervals[k].t_end ==
                res.summary.scc_activation_intervals[k].t_end);
    }
    // The attack is strong enough that the filter actually worked.
    REQUIRE(res.summary.scc_active_time > 0.0);
    REQUIRE_FALSE(res.summary.scc_activation_intervals.empty());
}

TEST_CASE("the filter does not interfere with benign operation", "[scenario]") {
    ScenarioConfig cfg = base_config(8.0);
    cfg.disturbance.load_steps = {{1.0, 0.05}};
    const RunResult with_scc = run(cfg);
    cfg.scc_enabled = false;
    const RunResult without = run(cfg);

    REQUIRE(with_scc.trace.size() == without.trace.size());
    double max_diff = 0.0;
    for (size_t k = 0; k < with_scc.trace.size(); ++k) {
        const auto& a = with_scc.trace[k];
        const auto& b = without.trace[k];
        max_diff = std::max(max_diff, (a.x - b.x).cwiseAbs().maxCoeff());
        max_diff = std::max(max_diff, std::abs(a.dp_c_star - b.dp_c_star));
        REQUIRE_FALSE(a.scc_modified);
        REQUIRE_FALSE(a.alarm);
    }
    REQUIRE(max_diff < 1e-9);
    REQUIRE(with_scc.summary.alarm_count == 0);
}

TEST_CASE("alarms count exactly the modified steps", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(15.0);
    const RunResult res = run(cfg);
    std::int64_t expected = 0;
    for (const auto& r : res.trace)
        if (std::abs(r.dp_c_star - r.dp_c_attacked) > 1e-12) ++expected;
    REQUIRE(res.summary.alarm_count == expected);
    REQUIRE(expected > 0);
}

TEST_CASE("estimator-in-the-loop control stays near true-state control", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(10.0);
    const RunResult with_kf = run(cfg);
    cfg.estimator.use_true_state = true;
    const RunResult with_truth = run(cfg);
    REQUIRE(with_kf.trace.size() == with_truth.trace.size());
    double max_diff = 0.0;
    for (size_t k = 0; k < with_kf.trace.size(); ++k) {
        if (with_kf.trace[k].t <= 1.0) continue;  // estimator transient
        max_diff = std::max(
            max_diff, std::abs(with_kf.trace[k].dp_c_star - with_truth.trace[k].dp_c_star));
    }
    REQUIRE(max_diff < 1e-3);
}

TEST_CASE("config validation rejects inconsistent timing", "[scenario]") {
    ScenarioConfig cfg = base_config(1.0);
    cfg.scc_cfg.t_s = 0.2505;  // not an integer multiple of dt = 1 ms
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.scc_cfg.t_s = 0.25;
    cfg.dt = 0.02;  // above the RK4 accuracy cap
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.dt = 1e-3;
    cfg.duration = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("halting on trip truncates the trace", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(30.0);
    cfg.scc_enabled = false;
    cfg.on_trip = TripPolicy::halt;
    const RunResult halted = run(cfg);
    REQUIRE(halted.trace.size() < 30000);
    REQUIRE_FALSE(halted.trace.back().trip_events.empty());
    REQUIRE(halted.summary.trip_events.size() == halted.trace.back().trip_events.size());
    REQUIRE(halted.trace.back().t == Approx(halted.summary.trip_events.front().time));

    cfg.on_trip = TripPolicy::keep_running;
    const RunResult full = run(cfg);
    REQUIRE(full.trace.size() == 30000);
    // Identical up to and including the trip step.
    for (size_t k = 0; k < halted.trace.size(); ++k)
        REQUIRE(format_trace_row(full.trace[k]) == format_trace_row(halted.trace[k]));
}

TEST_CASE("disabling the filter passes the attacked signal through", "[scenario]") {
    ScenarioConfig cfg = strong_attack_config(6.0);
    cfg.scc_enabled = false;
    const RunResult res = run(cfg);
    for (const auto& r : res.trace) {
        REQUIRE(r.dp_c_star == r.dp_c_attacked);
        REQUIRE_FALSE(r.scc_modified);
        REQUIRE_FALSE(r.alarm);
    }
    REQUIRE(res.summary.scc_active_time == 0.0);
}

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfcsafe/attacks.hpp"
#include "lfcsafe/dynamics.hpp"
#include "lfcsafe/estimator.hpp"
#include "lfcsafe/relays.hpp"
#include "lfcsafe/scc.hpp"

namespace lfcsafe {

/// What the run does once a relay trips.
enum class TripPolicy {
    halt,          ///< stop after recording the tripping step
    keep_running,  ///< keep simulating to show the post-trip trajectory
};

inline const char* to_string(TripPolicy p) {
    return p == TripPolicy::halt ? "halt" : "continue";
}

/// Scenario-level estimator knobs; expanded into a KalmanConfig at run time.
struct EstimatorOptions {
    bool use_true_state = false;  ///< feed the SCC the plant state instead of x_hat
    double q_scale = 1.0;         ///< scales the 1e-8 I process noise
    double r_scale = 1.0;         ///< scales the 1e-8 I measurement noise floor
    double p0_scale = 1.0;        ///< scales the identity initial covariance
    double measurement_noise_std = 0.0;  ///< additive Gaussian noise on both sensors
    StateVector x0_hat = StateVector::Zero();

    void validate() const {
        if (!(q_scale > 0.0) || !(r_scale > 0.0) || !(p0_scale > 0.0))
            throw std::invalid_argument("estimator covariance scales must be positive");
        if (!(measurement_noise_std >= 0.0))
            throw std::invalid_argument("measurement_noise_std must be >= 0");
    }

    KalmanConfig kalman_config(double dt) const {
        KalmanConfig kc;
        kc.process_noise_cov = Mat5::Identity() * (1e-8 * q_scale);
        const double r = 1e-8 * r_scale + measurement_noise_std * measurement_noise_std;
        kc.measurement_noise_cov = Mat2::Identity() * r;
        kc.initial_state = x0_hat;
        kc.initial_cov = Mat5::Identity() * p0_scale;
        kc.dt = dt;
        return kc;
    }
};

struct ScenarioConfig {
    SystemParams params;
    SafetyLimits limits;
    RelayConfig relay_cfg;
    SccConfig scc_cfg;
    bool scc_enabled = true;
    EstimatorOptions estimator;
    AttackSpec attack;
    DisturbanceSpec disturbance;
    double duration = 0.0;  ///< [s], required
    double dt = 1e-3;       ///< [s]
    std::uint64_t seed = 0;
    TripPolicy on_trip = TripPolicy::keep_running;

    void validate() const {
        params.validate();
        limits.validate();
        relay_cfg.validate();
        scc_cfg.validate();
        estimator.validate();
        attack.validate();
        disturbance.validate();
        if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
        if (!(dt > 0.0) || dt > 0.01)
            throw std::invalid_argument("dt must lie in (0, 0.01]");
        const double ratio = scc_cfg.t_s / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw std::invalid_argument("scc t_s must be an integer multiple of dt");
    }
};

/**
 * One simulation step, covering the interval (t - dt, t]: the controls held
 * over it, the truth/estimate states, the barrier values behind the control
 * decision, and the relay reaction to the state reached at t.
 */
struct TraceRecord {
    double t = 0.0;
    StateVector x = StateVector::Zero();      ///< truth at t
    StateVector x_hat = StateVector::Zero();  ///< estimate the step's control used
    double dp_c_legit = 0.0;
    double dp_c_attacked = 0.0;
    double dp_c_star = 0.0;
    double dp_l = 0.0;
    double h_omega = 0.0;
    double h_nu = 0.0;
    bool scc_modified = false;
    bool alarm = false;
    int relay_of = 0;  ///< 0 monitoring, 1 picked up, 2 tripped
    int relay_uf = 0;
    int relay_rocof = 0;
    std::vector<TripEvent> trip_events;  ///< trips raised at this step
};

struct ActivationInterval {
    double t_begin = 0.0;
    double t_end = 0.0;
};

struct RunSummary {
    double max_abs_d_omega_hat = 0.0;    ///< [pu]
    double max_abs_omega_dot_hat = 0.0;  ///< [pu/s]
    std::vector<TripEvent> trip_events;
    double scc_active_time = 0.0;  ///< [s]
    std::vector<ActivationInterval> scc_activation_intervals;
    std::int64_t alarm_count = 0;
    double settling_time = -1.0;  ///< first t after which |d_omega_hat| stays < 1e-3; -1 if never
};

/// Recomputes every summary field from the trace.
inline RunSummary summarize(const std::vector<TraceRecord>& trace, double dt) {
    RunSummary s;
    bool in_interval = false;
    for (const auto& r : trace) {
        s.max_abs_d_omega_hat =
            std::max(s.max_abs_d_omega_hat, std::abs(r.x(state::d_omega_hat)));
        s.max_abs_omega_dot_hat =
            std::max(s.max_abs_omega_dot_hat, std::abs(r.x(state::omega_dot_hat)));
        s.trip_events.insert(s.trip_events.end(), r.trip_events.begin(), r.trip_events.end());
        if (r.alarm) ++s.alarm_count;
        if (r.scc_modified) {
            s.scc_active_time += dt;
            if (!in_interval) {
                s.scc_activation_intervals.push_back({r.t, r.t});
                in_interval = true;
            } else {
                s.scc_activation_intervals.back().t_end = r.t;
            }
        } else {
            in_interval = false;
        }
    }
    std::ptrdiff_t last_violation = -1;
    for (std::ptrdiff_t i = 0; i < std::ssize(trace); ++i)
        if (std::abs(trace[i].x(state::d_omega_hat)) >= 1e-3) last_violation = i;
    if (last_violation < 0)
        s.settling_time = 0.0;
    else if (last_violation + 1 < std::ssize(trace))
        s.settling_time = trace[last_violation + 1].t;
    else
        s.settling_time = -1.0;
    return s;
}

/**
 * Deterministic standard-normal sampler: Box-Muller over mt19937_64, so the
 * stream is identical across platforms (std::normal_distribution is not).
 */
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;          // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

namespace detail {

inline int relay_code(const ElementState& e) {
    switch (e.phase) {
        case RelayPhase::monitoring: return 0;
        case RelayPhase::picked_up: return 1;
        case RelayPhase::tripped: return 2;
    }
    return 0;
}

}  // namespace detail

/**
 * Closed-loop run.  Per step starting at t_k = k dt with truth x_k:
 * the local controller reads the (possibly noisy) frequency measurement,
 * the attack corrupts its output, the Kalman filter absorbs the
 * measurement, the SCC filters the corrupted control against the barrier
 * constraints (from x_hat, or truth when configured), the plant advances
 * one RK4 step under the filtered control, and the relays react to the
 * state reached.  Barrier values are evaluated even with the SCC disabled
 * so traces stay comparable across the two modes.
 */
inline RunResult run(const ScenarioConfig& cfg) {
    cfg.validate();

    const ContinuousModel model = build_continuous_model(cfg.params);
    const DiscreteModel dm_scc = discretize(model, cfg.scc_cfg.t_s);
    const DiscreteModel dm_filter = discretize(model, cfg.dt);
    const KalmanConfig kalman_cfg = cfg.estimator.kalman_config(cfg.dt);

    EstimatorState est = kf_init(kalman_cfg);
    StateVector x = StateVector::Zero();
    InputVector u_prev = InputVector::Zero();
    double integrator_state = 0.0;
    RelayBank bank;
    GaussianSampler noise(cfg.seed);
    const double noise_std = cfg.estimator.measurement_noise_std;

    const auto n_steps = static_cast<std::int64_t>(std::llround(cfg.duration / cfg.dt));
    RunResult out;
    out.trace.reserve(static_cast<std::size_t>(n_steps));

    for (std::int64_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const double dp_l = cfg.disturbance.load_at(t);

        Vec2 z;
        z << x(state::d_omega_hat), x(state::omega_dot_hat);
        if (noise_std > 0.0) {
            z(0) += noise_std * noise();
            z(1) += noise_std * noise();
        }

        const LocalControl lc = local_controller_step(cfg.params, z(0), integrator_state, cfg.dt);
        integrator_state = lc.integrator_state;
        const double dp_c_legit = lc.dp_c_ref;
        const double dp_c_attacked = attack_signal(cfg.attack, t, dp_c_legit);

        est = kf_step(est, kalman_cfg, dm_filter, u_prev, z);

        const StateVector& x_for_scc = cfg.estimator.use_true_state ? x : est.x_hat;
        const SccStepResult scc =
            scc_step(model, dm_scc, cfg.limits, cfg.scc_cfg, x_for_scc, dp_c_attacked, dp_l);

        TraceRecord rec;
        rec.dp_c_legit = dp_c_legit;
        rec.dp_c_attacked = dp_c_attacked;
        rec.dp_l = dp_l;
        rec.h_omega = scc.barriers.h_omega;
        rec.h_nu = scc.barriers.h_nu;
        if (cfg.scc_enabled) {
            rec.dp_c_star = scc.filter.dp_c_star;
            rec.scc_modified = scc.filter.modified;
            rec.alarm = scc.filter.alarm;
        } else {
            rec.dp_c_star = dp_c_attacked;
        }

        u_prev = input_vector(rec.dp_c_star, dp_l);
        x = step_continuous(model, x, u_prev, cfg.dt);
        if (!x.allFinite())
            throw std::runtime_error("simulation state became non-finite at record index " +
                                     std::to_string(k) + " (t = " + std::to_string(t) + " s)");

        const double t_next = static_cast<double>(k + 1) * cfg.dt;
        rec.trip_events = relay_step(bank, cfg.relay_cfg, 1.0 + x(state::d_omega_hat),
                                     x(state::omega_dot_hat), cfg.dt, t_next);

        rec.t = t_next;
        rec.x = x;
        rec.x_hat = est.x_hat;
        rec.relay_of = detail::relay_code(bank.of);
        rec.relay_uf = detail::relay_code(bank.uf);
        rec.relay_rocof = detail::relay_code(bank.rocof);
        out.trace.push_back(std::move(rec));

        if (cfg.on_trip == TripPolicy::halt && bank.any_tripped()) break;
    }

    out.summary = summarize(out.trace, cfg.dt);
    return out;
}

}  // namespace lfcsafe

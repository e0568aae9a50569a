#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "lfcsafe/dynamics.hpp"

namespace lfcsafe {

/// Protection-relay thresholds the filter must keep the plant away from.
struct SafetyLimits {
    double f_over = 1.03;     ///< over-frequency threshold [pu]
    double f_under = 0.942;   ///< under-frequency threshold [pu]
    double rocof_limit = 0.05;  ///< |ROCOF| threshold [pu/s]

    /// Symmetric frequency-deviation bound used by the barrier.
    double f_dev() const { return std::min(f_over - 1.0, 1.0 - f_under); }

    void validate() const {
        if (!(f_over > 1.0)) throw std::invalid_argument("f_over must exceed 1");
        if (!(f_under < 1.0) || !(f_under > 0.0))
            throw std::invalid_argument("f_under must lie in (0, 1)");
        if (!(rocof_limit > 0.0)) throw std::invalid_argument("rocof_limit must be positive");
    }
};

/// Which load value the filter assumes when predicting ahead.
enum class LoadInputMode {
    measured,  ///< use the current load deviation
    zero,      ///< assume no load deviation over the horizon
};

struct SccConfig {
    double alpha = 20.0;    ///< class-K relaxation weight; larger = more permissive
    double t_s = 0.25;      ///< prediction horizon / filter step [s]
    double h_floor = 1e-6;  ///< lower clip applied to h before taking the barrier
    LoadInputMode load_input = LoadInputMode::measured;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
        if (!(t_s > 0.0)) throw std::invalid_argument("t_s must be positive");
        if (!(h_floor > 0.0) || h_floor > 1e-3)
            throw std::invalid_argument("h_floor must lie in (0, 1e-3]");
    }
};

/// Reciprocal log barrier B(h) = -log(h / (1 + h)); requires h > 0.
inline double log_barrier(double h) {
    if (!(h > 0.0)) throw std::domain_error("log_barrier requires h > 0");
    return -std::log(h / (1.0 + h));
}

/**
 * Barrier functions evaluated on the measurements predicted one horizon
 * ahead under held inputs:
 *
 *   h_omega = f_dev^2 - d_omega_hat(t + t_s)^2
 *   h_nu    = rocof_limit^2 - omega_dot_hat(t + t_s)^2
 *
 * Gradients are taken with respect to the current state, so
 * dh/dx = -2 * prediction * C * A_d.
 */
struct BarrierEvaluation {
    MeasurementPrediction pred;  ///< measurements at t + t_s
    double h_omega = 0.0;        ///< raw (unfloored) barrier value
    double h_nu = 0.0;
    double b_omega = 0.0;        ///< log barrier of the floored h
    double b_nu = 0.0;
    bool floored_omega = false;  ///< true when h_omega was clipped at h_floor
    bool floored_nu = false;
    Row5 grad_h_omega;
    Row5 grad_h_nu;
};

inline BarrierEvaluation eval_barriers(const DiscreteModel& d, const SafetyLimits& lim,
                                       const SccConfig& cfg, const StateVector& x,
                                       double dp_c, double dp_l) {
    const double dp_l_eff = cfg.load_input == LoadInputMode::measured ? dp_l : 0.0;
    BarrierEvaluation ev;
    ev.pred = predict_measurements(d, x, input_vector(dp_c, dp_l_eff));

    const double f_dev = lim.f_dev();
    ev.h_omega = f_dev * f_dev - ev.pred.d_omega_hat * ev.pred.d_omega_hat;
    ev.h_nu = lim.rocof_limit * lim.rocof_limit - ev.pred.omega_dot_hat * ev.pred.omega_dot_hat;

    ev.floored_omega = ev.h_omega < cfg.h_floor;
    ev.floored_nu = ev.h_nu < cfg.h_floor;
    ev.b_omega = log_barrier(std::max(ev.h_omega, cfg.h_floor));
    ev.b_nu = log_barrier(std::max(ev.h_nu, cfg.h_floor));

    ev.grad_h_omega = -2.0 * ev.pred.d_omega_hat * (d.c_omega * d.a_d);
    ev.grad_h_nu = -2.0 * ev.pred.omega_dot_hat * (d.c_nu * d.a_d);
    return ev;
}

/// One half-space constraint slope * u + intercept <= 0 on the scalar control.
struct AffineConstraint {
    double slope = 0.0;
    double intercept = 0.0;
};

struct ConstraintPair {
    AffineConstraint omega;
    AffineConstraint nu;
};

/**
 * Turns each barrier into the affine condition dB/dt - alpha / B <= 0 with
 * dB/dt chained through the continuous dynamics:
 *
 *   dB/dt = -(dh/dx) (A x + B u) / (h + h^2)
 *
 * evaluated at the floored h, so the condition stays affine in dp_c.
 */
inline ConstraintPair constraint_coefficients(const ContinuousModel& m, const SccConfig& cfg,
                                              const BarrierEvaluation& ev, const StateVector& x,
                                              double dp_l) {
    const double dp_l_eff = cfg.load_input == LoadInputMode::measured ? dp_l : 0.0;
    auto assemble = [&](const Row5& grad, double h_raw, double b) {
        const double h = std::max(h_raw, cfg.h_floor);
        const Row5 c = -grad / (h + h * h);
        const double drift = c.dot(m.a * x);
        const double load_gain = c.dot(m.b.col(input::dp_l));
        AffineConstraint con;
        con.slope = c.dot(m.b.col(input::dp_c));
        con.intercept = drift + load_gain * dp_l_eff - cfg.alpha / b;
        return con;
    };
    ConstraintPair pair;
    pair.omega = assemble(ev.grad_h_omega, ev.h_omega, ev.b_omega);
    pair.nu = assemble(ev.grad_h_nu, ev.h_nu, ev.b_nu);
    return pair;
}

/// Which constraint clamped the control (or made the program infeasible).
enum class ActiveConstraint {
    none,
    frequency,
    rocof,
    both,
};

inline const char* to_string(ActiveConstraint a) {
    switch (a) {
        case ActiveConstraint::none: return "none";
        case ActiveConstraint::frequency: return "frequency";
        case ActiveConstraint::rocof: return "rocof";
        case ActiveConstraint::both: return "both";
    }
    return "?";
}

/**
 * Result of min (1/2)(u - dp_c_ref)^2 subject to the two half-spaces.
 *
 * The closed form reduces the constraints to an interval [lo, hi]; the
 * minimizer is the reference clamped into it.  If the interval is empty the
 * filter falls back to the midpoint of the crossed bounds and raises the
 * alarm with feasible == false.
 */
struct FilterResult {
    double dp_c_star = 0.0;
    bool modified = false;  ///< |dp_c_star - dp_c_ref| > 1e-12
    bool feasible = true;
    bool alarm = false;     ///< modified || !feasible
    ActiveConstraint active = ActiveConstraint::none;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

inline FilterResult filter_control(const ConstraintPair& cons, double dp_c_ref) {
    FilterResult r;
    ActiveConstraint lo_src = ActiveConstraint::none;
    ActiveConstraint hi_src = ActiveConstraint::none;
    ActiveConstraint degenerate = ActiveConstraint::none;

    auto apply = [&](const AffineConstraint& c, ActiveConstraint src) {
        if (c.slope > 0.0) {
            const double bound = -c.intercept / c.slope;
            if (bound < r.hi) {
                r.hi = bound;
                hi_src = src;
            }
        } else if (c.slope < 0.0) {
            const double bound = -c.intercept / c.slope;
            if (bound > r.lo) {
                r.lo = bound;
                lo_src = src;
            }
        } else if (c.intercept > 0.0) {
            // 0 * u + intercept <= 0 fails for every u.
            degenerate = degenerate == ActiveConstraint::none || degenerate == src
                             ? src
                             : ActiveConstraint::both;
        }
    };
    apply(cons.omega, ActiveConstraint::frequency);
    apply(cons.nu, ActiveConstraint::rocof);

    if (degenerate != ActiveConstraint::none) {
        r.feasible = false;
        r.active = degenerate;
        r.dp_c_star = std::clamp(dp_c_ref, std::min(r.lo, r.hi), std::max(r.lo, r.hi));
    } else if (r.lo > r.hi) {
        r.feasible = false;
        r.active = ActiveConstraint::both;
        r.dp_c_star = 0.5 * (r.lo + r.hi);
    } else if (dp_c_ref > r.hi) {
        r.dp_c_star = r.hi;
        r.active = hi_src;
    } else if (dp_c_ref < r.lo) {
        r.dp_c_star = r.lo;
        r.active = lo_src;
    } else {
        r.dp_c_star = dp_c_ref;
    }

    r.modified = std::abs(r.dp_c_star - dp_c_ref) > 1e-12;
    r.alarm = r.modified || !r.feasible;
    return r;
}

struct SccStepResult {
    BarrierEvaluation barriers;
    ConstraintPair constraints;
    FilterResult filter;
};

/// Full filter pass: predict, build constraints, solve for the safe control.
inline SccStepResult scc_step(const ContinuousModel& m, const DiscreteModel& d,
                              const SafetyLimits& lim, const SccConfig& cfg,
                              const StateVector& x, double dp_c_ref, double dp_l) {
    SccStepResult out;
    out.barriers = eval_barriers(d, lim, cfg, x, dp_c_ref, dp_l);
    out.constraints = constraint_coefficients(m, cfg, out.barriers, x, dp_l);
    out.filter = filter_control(out.constraints, dp_c_ref);
    return out;
}

}  // namespace lfcsafe

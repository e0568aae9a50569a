#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lfcsafe/expm.hpp"

namespace lfcsafe {

using StateVector = Eigen::Matrix<double, 5, 1>;
using InputVector = Eigen::Matrix<double, 2, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat52 = Eigen::Matrix<double, 5, 2>;
using Row5 = Eigen::Matrix<double, 1, 5>;

// State ordering of the single-area model.
namespace state {
inline constexpr int dp_g = 0;           ///< governor output deviation [pu]
inline constexpr int dp_m = 1;           ///< mechanical power deviation [pu]
inline constexpr int d_omega = 2;        ///< true frequency deviation [pu]
inline constexpr int d_omega_hat = 3;    ///< measured frequency deviation [pu]
inline constexpr int omega_dot_hat = 4;  ///< measured ROCOF [pu/s]
}  // namespace state

// Input ordering.
namespace input {
inline constexpr int dp_c = 0;  ///< governor-droop control signal [pu]
inline constexpr int dp_l = 1;  ///< load change [pu]
}  // namespace input

inline InputVector input_vector(double dp_c, double dp_l) {
    InputVector u;
    u << dp_c, dp_l;
    return u;
}

/**
 * Single-area load-frequency plant parameters (per-unit, seconds).
 *
 * The defaults are canonical textbook values for an aggregate single-area
 * system; every scenario can override them.
 */
struct SystemParams {
    double tau_g = 0.2;        ///< governor time constant [s]
    double tau_t = 0.5;        ///< turbine time constant [s]
    double tau_omega = 0.1;    ///< frequency sensor time constant [s]
    double tau_nu = 0.2;       ///< ROCOF sensor time constant [s]
    double inertia_m = 10.0;   ///< generation inertia M [pu*s]
    double damping_d = 0.8;    ///< load damping D [pu]
    double droop_r = 0.05;     ///< governor droop R [pu]
    double gain_k = 1.0;       ///< local controller integral gain
    double omega_ref = 0.0;    ///< frequency reference deviation [pu]

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument(std::string("SystemParams: ") + name +
                                            " must be strictly positive");
            }
        };
        positive(tau_g, "tau_g");
        positive(tau_t, "tau_t");
        positive(tau_omega, "tau_omega");
        positive(tau_nu, "tau_nu");
        positive(inertia_m, "inertia_m");
        positive(droop_r, "droop_r");
        if (!(damping_d >= 0.0) || !std::isfinite(damping_d)) {
            throw std::invalid_argument("SystemParams: damping_d must be non-negative");
        }
        if (!std::isfinite(gain_k) || !std::isfinite(omega_ref)) {
            throw std::invalid_argument("SystemParams: gain_k and omega_ref must be finite");
        }
    }
};

/// Continuous-time model x' = A x + B u.
struct ContinuousModel {
    Mat5 a;
    Mat52 b;
};

/**
 * Zero-order-hold discretization x[k+1] = A_d x[k] + B_d u[k] over step t_s,
 * with selector rows picking the two measured states.
 */
struct DiscreteModel {
    Mat5 a_d;
    Mat52 b_d;
    double t_s = 0.0;
    Row5 c_omega;  ///< selects d_omega_hat
    Row5 c_nu;     ///< selects omega_dot_hat
};

/**
 * Builds the continuous single-area model:
 *
 *   dP_g' = (dP_c - d_omega/R - dP_g) / tau_g         (governor with droop)
 *   dP_m' = (dP_g - dP_m) / tau_t                     (turbine)
 *   d_omega' = (dP_m - D*d_omega - dP_L) / M          (swing)
 *   d_omega_hat' = (d_omega - d_omega_hat) / tau_omega
 *   omega_dot_hat' = (d_omega' - omega_dot_hat) / tau_nu
 *
 * Throws std::invalid_argument for bad parameters and std::runtime_error if
 * the assembled A is numerically singular.
 */
inline ContinuousModel build_continuous_model(const SystemParams& p) {
    p.validate();

    ContinuousModel m;
    m.a.setZero();
    m.b.setZero();

    m.a(0, 0) = -1.0 / p.tau_g;
    m.a(0, 2) = -1.0 / (p.droop_r * p.tau_g);
    m.a(1, 0) = 1.0 / p.tau_t;
    m.a(1, 1) = -1.0 / p.tau_t;
    m.a(2, 1) = 1.0 / p.inertia_m;
    m.a(2, 2) = -p.damping_d / p.inertia_m;
    m.a(3, 2) = 1.0 / p.tau_omega;
    m.a(3, 3) = -1.0 / p.tau_omega;
    m.a(4, 1) = 1.0 / (p.inertia_m * p.tau_nu);
    m.a(4, 2) = -p.damping_d / (p.inertia_m * p.tau_nu);
    m.a(4, 4) = -1.0 / p.tau_nu;

    m.b(0, 0) = 1.0 / p.tau_g;
    m.b(2, 1) = -1.0 / p.inertia_m;
    m.b(4, 1) = -1.0 / (p.inertia_m * p.tau_nu);

    const Eigen::JacobiSVD<Mat5> svd(m.a);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12) {
        throw std::runtime_error("build_continuous_model: A is numerically singular");
    }
    return m;
}

/**
 * ZOH discretization over t_s. A_d comes from the matrix exponential; B_d
 * from the upper-right block of the input-augmented exponential, which stays
 * well conditioned when A is nearly singular. When A is invertible the
 * closed form A^-1 (A_d - I) B is evaluated as a cross-check; disagreement
 * beyond 1e-8 (Frobenius) indicates a broken exponential and throws.
 */
inline DiscreteModel discretize(const ContinuousModel& m, double t_s) {
    if (t_s < 0.0 || !std::isfinite(t_s)) {
        throw std::invalid_argument("discretize: t_s must be non-negative");
    }

    DiscreteModel d;
    d.t_s = t_s;
    d.c_omega = Row5::Zero();
    d.c_omega(state::d_omega_hat) = 1.0;
    d.c_nu = Row5::Zero();
    d.c_nu(state::omega_dot_hat) = 1.0;

    if (t_s == 0.0) {
        d.a_d = Mat5::Identity();
        d.b_d = Mat52::Zero();
        return d;
    }

    d.a_d = expm<5>((m.a * t_s).eval());

    Eigen::Matrix<double, 7, 7> aug = Eigen::Matrix<double, 7, 7>::Zero();
    aug.topLeftCorner<5, 5>() = m.a * t_s;
    aug.topRightCorner<5, 2>() = m.b * t_s;
    const Eigen::Matrix<double, 7, 7> aug_exp = expm<7>(aug);
    d.b_d = aug_exp.topRightCorner<5, 2>();

    const Eigen::JacobiSVD<Mat5> svd(m.a);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0 && smax / smin < 1e12) {
        const Mat52 b_d_closed =
            m.a.partialPivLu().solve((d.a_d - Mat5::Identity()) * m.b);
        if ((d.b_d - b_d_closed).norm() > 1e-8) {
            throw std::runtime_error(
                "discretize: augmented-exponential B_d disagrees with closed form");
        }
    }
    return d;
}

/// Measurement pair predicted one discretization step ahead.
struct MeasurementPrediction {
    double d_omega_hat = 0.0;
    double omega_dot_hat = 0.0;
};

/// Predicted sensor outputs t_s ahead under zero-order-hold input:
/// [d_omega_hat; omega_dot_hat](t + t_s) = C (A_d x + B_d u).
inline MeasurementPrediction predict_measurements(const DiscreteModel& d,
                                                  const StateVector& x,
                                                  const InputVector& u) {
    const StateVector next = d.a_d * x + d.b_d * u;
    return {d.c_omega * next, d.c_nu * next};
}

/// One classical RK4 step of x' = A x + B u with u held over dt.
inline StateVector step_continuous(const ContinuousModel& m, const StateVector& x,
                                   const InputVector& u, double dt) {
    if (!(dt > 0.0) || dt > 0.01) {
        throw std::invalid_argument("step_continuous: dt must be in (0, 10ms]");
    }
    const StateVector bu = m.b * u;
    const StateVector k1 = m.a * x + bu;
    const StateVector k2 = m.a * (x + 0.5 * dt * k1) + bu;
    const StateVector k3 = m.a * (x + 0.5 * dt * k2) + bu;
    const StateVector k4 = m.a * (x + dt * k3) + bu;
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct LocalControl {
    double dp_c_ref = 0.0;
    double integrator_state = 0.0;
};

/**
 * Integral local controller d(dP_c)/dt = k (omega_ref - d_omega_hat),
 * advanced by forward Euler (exact for a pure integrator under ZOH input).
 */
inline LocalControl local_controller_step(const SystemParams& p, double d_omega_hat,
                                          double integrator_state, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("local_controller_step: dt must be positive");
    }
    const double next = integrator_state + p.gain_k * (p.omega_ref - d_omega_hat) * dt;
    return {next, next};
}

}  // namespace lfcsafe

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "lfcsafe/dynamics.hpp"

namespace lfcsafe {

using Mat2 = Eigen::Matrix<double, 2, 2>;
using Vec2 = Eigen::Matrix<double, 2, 1>;
using Mat25 = Eigen::Matrix<double, 2, 5>;

/**
 * Kalman filter settings.  Defaults trust the model (tiny Q) and treat the
 * sensors as near-noiseless; runs with injected measurement noise should
 * scale measurement_noise_cov to match.
 */
struct KalmanConfig {
    Mat5 process_noise_cov = Mat5::Identity() * 1e-8;
    Mat2 measurement_noise_cov = Mat2::Identity() * 1e-8;
    StateVector initial_state = StateVector::Zero();
    Mat5 initial_cov = Mat5::Identity();
    double dt = 1e-3;  ///< filter step, equal to the simulation step [s]

    void validate() const {
        auto check_sym = [](const auto& m, const char* name) {
            if (!m.isApprox(m.transpose(), 1e-12))
                throw std::invalid_argument(std::string(name) + " must be symmetric");
        };
        check_sym(process_noise_cov, "process_noise_cov");
        check_sym(measurement_noise_cov, "measurement_noise_cov");
        check_sym(initial_cov, "initial_cov");
        Eigen::SelfAdjointEigenSolver<Mat5> q_eig(process_noise_cov);
        if (q_eig.eigenvalues().minCoeff() < -1e-12)
            throw std::invalid_argument("process_noise_cov must be positive semidefinite");
        Eigen::SelfAdjointEigenSolver<Mat2> r_eig(measurement_noise_cov);
        if (!(r_eig.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("measurement_noise_cov must be positive definite");
        Eigen::SelfAdjointEigenSolver<Mat5> p_eig(initial_cov);
        if (!(p_eig.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("initial_cov must be positive definite");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    }
};

struct EstimatorState {
    StateVector x_hat = StateVector::Zero();
    Mat5 p = Mat5::Identity();
};

/// Numerical rank of the observability matrix of (a, c).
inline int observability_rank(const Mat5& a, const Mat25& c) {
    Eigen::Matrix<double, 10, 5> obs;
    Mat25 block = c;
    for (int i = 0; i < 5; ++i) {
        obs.block<2, 5>(2 * i, 0) = block;
        block = block * a;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 10, 5>> svd(obs);
    const auto& sv = svd.singularValues();
    const double tol = 1e-8 * sv.maxCoeff();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return rank;
}

/// Rank using the model's continuous A and the two measurement selectors.
inline int observability_rank(const ContinuousModel& m, const DiscreteModel& d) {
    Mat25 c;
    c.row(0) = d.c_omega;
    c.row(1) = d.c_nu;
    return observability_rank(m.a, c);
}

inline EstimatorState kf_init(const KalmanConfig& cfg) {
    cfg.validate();
    return {cfg.initial_state, cfg.initial_cov};
}

/**
 * One predict/update cycle.  dm_filter must be discretized at cfg.dt (the
 * simulation step), not at the SCC horizon.  u is the input held over the
 * step that produced measurement z.  The covariance update uses the Joseph
 * form and is re-symmetrized to keep P PSD over long runs.
 */
inline EstimatorState kf_step(const EstimatorState& est, const KalmanConfig& cfg,
                              const DiscreteModel& dm_filter, const InputVector& u,
                              const Vec2& z) {
    const StateVector x_pred = dm_filter.a_d * est.x_hat + dm_filter.b_d * u;
    const Mat5 p_pred =
        dm_filter.a_d * est.p * dm_filter.a_d.transpose() + cfg.process_noise_cov;

    Mat25 c;
    c.row(0) = dm_filter.c_omega;
    c.row(1) = dm_filter.c_nu;

    const Mat2 s = c * p_pred * c.transpose() + cfg.measurement_noise_cov;
    Eigen::FullPivLU<Mat2> s_lu(s);
    if (!s_lu.isInvertible())
        throw std::runtime_error("kf_step: innovation covariance is singular in the update step");
    const Eigen::Matrix<double, 5, 2> gain = p_pred * c.transpose() * s_lu.inverse();

    EstimatorState out;
    out.x_hat = x_pred + gain * (z - c * x_pred);
    const Mat5 ikc = Mat5::Identity() - gain * c;
    out.p = ikc * p_pred * ikc.transpose() +
            gain * cfg.measurement_noise_cov * gain.transpose();
    out.p = 0.5 * (out.p + out.p.transpose()).eval();
    return out;
}

}  // namespace lfcsafe

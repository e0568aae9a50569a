#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lfcsafe/dynamics.hpp"

namespace lfcsafe {

enum class AttackKind {
    none,
    sinusoid,
    bias,
    ramp,
};

/// How the injected value combines with the legitimate control signal.
enum class AttackMode {
    replace,  ///< man-in-the-middle overwrite
    add,      ///< superimposed corruption
};

inline const char* to_string(AttackKind k) {
    switch (k) {
        case AttackKind::none: return "none";
        case AttackKind::sinusoid: return "sinusoid";
        case AttackKind::bias: return "bias";
        case AttackKind::ramp: return "ramp";
    }
    return "?";
}

inline const char* to_string(AttackMode m) {
    return m == AttackMode::replace ? "replace" : "add";
}

/// False-data injection on the governor-droop control signal.
struct AttackSpec {
    AttackKind kind = AttackKind::none;
    double amplitude = 0.0;  ///< [pu]
    double frequency = 0.0;  ///< [Hz], sinusoid only
    double phase = 0.0;      ///< [rad]
    double t_start = 0.0;    ///< [s]
    double t_end = 0.0;      ///< [s]
    AttackMode mode = AttackMode::replace;

    void validate() const {
        if (kind == AttackKind::none) return;
        if (!(t_start < t_end)) throw std::invalid_argument("attack requires t_start < t_end");
        if (!(amplitude >= 0.0)) throw std::invalid_argument("attack amplitude must be >= 0");
        if (kind == AttackKind::sinusoid && !(frequency > 0.0))
            throw std::invalid_argument("sinusoid attack requires frequency > 0");
    }
};

/// Control signal seen downstream of the attacker at time t.
inline double attack_signal(const AttackSpec& spec, double t, double dp_c_legit) {
    if (spec.kind == AttackKind::none || t < spec.t_start || t > spec.t_end)
        return dp_c_legit;
    switch (spec.kind) {
        case AttackKind::sinusoid: {
            const double v =
                spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * t + spec.phase);
            return spec.mode == AttackMode::replace ? v : dp_c_legit + v;
        }
        case AttackKind::bias:
            return dp_c_legit + spec.amplitude;
        case AttackKind::ramp: {
            const double v =
                spec.amplitude * (t - spec.t_start) / (spec.t_end - spec.t_start);
            return spec.mode == AttackMode::replace ? v : dp_c_legit + v;
        }
        case AttackKind::none:
            break;
    }
    return dp_c_legit;
}

/// Benign load-change schedule: each entry adds delta to dP_L at its time.
struct DisturbanceSpec {
    struct LoadStep {
        double time = 0.0;   ///< [s]
        double delta = 0.0;  ///< [pu]
    };
    std::vector<LoadStep> load_steps;

    void validate() const {
        for (std::size_t i = 1; i < load_steps.size(); ++i)
            if (load_steps[i].time < load_steps[i - 1].time)
                throw std::invalid_argument("load step times must be non-decreasing");
    }

    /// Cumulative dP_L at time t.
    double load_at(double t) const {
        double sum = 0.0;
        for (const auto& s : load_steps)
            if (t >= s.time) sum += s.delta;
        return sum;
    }
};

/**
 * Frequency [Hz] of the least-damped complex eigenvalue pair of A — the
 * attacker's best sinusoid frequency.  Throws when A has no oscillatory
 * mode; pick the attack frequency manually in that case.
 */
inline double resonant_frequency(const ContinuousModel& m) {
    Eigen::EigenSolver<Mat5> eig(m.a);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("resonant_frequency: eigen decomposition failed");
    double best_re = 0.0;
    double best_im = 0.0;
    bool found = false;
    for (int i = 0; i < 5; ++i) {
        const auto lam = eig.eigenvalues()(i);
        if (std::abs(lam.imag()) <= 1e-9 * (1.0 + std::abs(lam))) continue;
        if (!found || lam.real() > best_re) {
            best_re = lam.real();
            best_im = std::abs(lam.imag());
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error(
            "resonant_frequency: A has no complex eigenvalue pair; choose the attack frequency "
            "manually");
    return best_im / (2.0 * std::numbers::pi);
}

}  // namespace lfcsafe

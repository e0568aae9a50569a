#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lfcsafe {

/**
 * Definite-time protection settings (IEEE 1547 Category III style).  The
 * ROCOF element has no standard clearing time; the 50 ms default suppresses
 * single-step numerical spikes while staying well under the other delays.
 */
struct RelayConfig {
    double of_threshold = 1.03;    ///< over-frequency level [pu]
    double of_clearing = 0.160;    ///< OF clearing time [s]
    double uf_threshold = 0.942;   ///< under-frequency level [pu]
    double uf_clearing = 0.160;    ///< UF clearing time [s]
    double rocof_threshold = 0.05;  ///< |ROCOF| level [pu/s]
    double rocof_pickup = 0.050;    ///< ROCOF pickup duration [s]

    void validate() const {
        if (!(of_threshold > 1.0)) throw std::invalid_argument("of_threshold must exceed 1");
        if (!(uf_threshold > 0.0) || !(uf_threshold < 1.0))
            throw std::invalid_argument("uf_threshold must lie in (0, 1)");
        if (!(rocof_threshold > 0.0))
            throw std::invalid_argument("rocof_threshold must be positive");
        if (!(of_clearing >= 0.0) || !(uf_clearing >= 0.0) || !(rocof_pickup >= 0.0))
            throw std::invalid_argument("relay clearing times must be non-negative");
    }
};

enum class RelayElement {
    over_frequency,
    under_frequency,
    rocof,
};

inline const char* to_string(RelayElement e) {
    switch (e) {
        case RelayElement::over_frequency: return "OF";
        case RelayElement::under_frequency: return "UF";
        case RelayElement::rocof: return "ROCOF";
    }
    return "?";
}

struct TripEvent {
    RelayElement element = RelayElement::over_frequency;
    double time = 0.0;  ///< simulation time of the trip [s]
};

enum class RelayPhase {
    monitoring,
    picked_up,
    tripped,
};

/// Timer state of one protection element.  tripped is absorbing.
struct ElementState {
    RelayPhase phase = RelayPhase::monitoring;
    double elapsed = 0.0;     ///< continuous time the condition has held [s]
    double tripped_at = -1.0;  ///< trip timestamp, -1 until tripped
};

struct RelayBank {
    ElementState of;
    ElementState uf;
    ElementState rocof;

    bool any_tripped() const {
        return of.phase == RelayPhase::tripped || uf.phase == RelayPhase::tripped ||
               rocof.phase == RelayPhase::tripped;
    }
};

namespace detail {

inline bool element_step(ElementState& s, bool condition, double clearing, double dt, double t) {
    if (s.phase == RelayPhase::tripped) return false;
    if (!condition) {
        s.phase = RelayPhase::monitoring;
        s.elapsed = 0.0;
        return false;
    }
    s.elapsed += dt;
    if (s.elapsed >= clearing - 1e-12) {
        s.phase = RelayPhase::tripped;
        s.tripped_at = t;
        return true;
    }
    s.phase = RelayPhase::picked_up;
    return false;
}

}  // namespace detail

/**
 * Advances all three elements one sample.  omega_hat and omega_dot_hat are
 * the sensor outputs (absolute frequency in pu and ROCOF in pu/s) at time t;
 * dt is the time since the previous sample.  Returns the trips raised at
 * this sample.
 */
inline std::vector<TripEvent> relay_step(RelayBank& bank, const RelayConfig& cfg,
                                         double omega_hat, double omega_dot_hat, double dt,
                                         double t) {
    if (!(dt > 0.0)) throw std::invalid_argument("relay_step requires dt > 0");
    std::vector<TripEvent> events;
    if (detail::element_step(bank.of, omega_hat >= cfg.of_threshold, cfg.of_clearing, dt, t))
        events.push_back({RelayElement::over_frequency, t});
    if (detail::element_step(bank.uf, omega_hat <= cfg.uf_threshold, cfg.uf_clearing, dt, t))
        events.push_back({RelayElement::under_frequency, t});
    if (detail::element_step(bank.rocof, std::abs(omega_dot_hat) >= cfg.rocof_threshold,
                             cfg.rocof_pickup, dt, t))
        events.push_back({RelayElement::rocof, t});
    return events;
}

}  // namespace lfcsafe

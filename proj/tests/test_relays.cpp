#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lfcsafe/relays.hpp"

using namespace lfcsafe;
using Catch::Approx;

namespace {

// Feeds constant measurements for n steps, returning the first trip events.
std::vector<TripEvent> feed(RelayBank& bank, const RelayConfig& cfg, double omega_hat,
                            double omega_dot_hat, int n, double dt = 1e-3,
                            double t0 = 0.0) {
    std::vector<TripEvent> events;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k + 1) * dt;
        auto e = relay_step(bank, cfg, omega_hat, omega_dot_hat, dt, t);
        events.insert(events.end(), e.begin(), e.end());
    }
    return events;
}

}  // namespace

TEST_CASE("relay config defaults and validation", "[relays]") {
    const RelayConfig cfg;
    REQUIRE(cfg.of_threshold == 1.03);
    REQUIRE(cfg.uf_threshold == 0.942);
    REQUIRE(cfg.of_clearing == 0.160);
    REQUIRE(cfg.uf_clearing == 0.160);
    REQUIRE(cfg.rocof_threshold == 0.05);
    REQUIRE(cfg.rocof_pickup == 0.050);
    cfg.validate();

    RelayConfig bad = cfg;
    bad.of_threshold = 0.9;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.uf_threshold = 1.2;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.rocof_pickup = -0.01;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("over-frequency violation trips at onset plus clearing time", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    const auto events = feed(bank, cfg, 1.04, 0.0, 400);
    REQUIRE(events.size() == 1);
    REQUIRE(events[0].element == RelayElement::over_frequency);
    REQUIRE(events[0].time == Approx(0.160).margin(1e-3 + 1e-12));
    REQUIRE(bank.of.phase == RelayPhase::tripped);
    REQUIRE(bank.of.tripped_at == events[0].time);
    REQUIRE(bank.any_tripped());
}

TEST_CASE("sub-threshold frequency never trips", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    const auto events = feed(bank, cfg, 1.029, 0.0, 100000);
    REQUIRE(events.empty());
    REQUIRE(bank.of.phase == RelayPhase::monitoring);
    REQUIRE(bank.of.elapsed == 0.0);
    REQUIRE_FALSE(bank.any_tripped());
}

TEST_CASE("thresholds are inclusive and timers show pickup", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    relay_step(bank, cfg, cfg.of_threshold, 0.0, 1e-3, 1e-3);
    REQUIRE(bank.of.phase == RelayPhase::picked_up);
    REQUIRE(bank.of.elapsed == Approx(1e-3));
}

TEST_CASE("dropout resets the clearing timer", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    feed(bank, cfg, 1.05, 0.0, 100);
    REQUIRE(bank.of.phase == RelayPhase::picked_up);
    relay_step(bank, cfg, 1.0, 0.0, 1e-3, 0.101);
    REQUIRE(bank.of.phase == RelayPhase::monitoring);
    REQUIRE(bank.of.elapsed == 0.0);

    const auto events = feed(bank, cfg, 1.05, 0.0, 100, 1e-3, 0.101);
    REQUIRE(events.empty());

    const auto tripping = feed(bank, cfg, 1.05, 0.0, 200, 1e-3, 0.201);
    REQUIRE(tripping.size() == 1);
    // The sustained violation began at t = 0.101 and ran uninterrupted.
    REQUIRE(tripping[0].time == Approx(0.101 + 0.160).margin(1e-3 + 1e-12));
}

TEST_CASE("under-frequency element mirrors the over-frequency logic", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    const auto events = feed(bank, cfg, 0.94, 0.0, 400);
    REQUIRE(events.size() == 1);
    REQUIRE(events[0].element == RelayElement::under_frequency);
    REQUIRE(events[0].time == Approx(0.160).margin(1e-3 + 1e-12));
}

TEST_CASE("rocof element trips on either sign after its pickup time", "[relays]") {
    RelayConfig cfg;
    for (double sign : {1.0, -1.0}) {
        RelayBank bank;
        const auto events = feed(bank, cfg, 1.0, sign * 0.06, 200);
        REQUIRE(events.size() == 1);
        REQUIRE(events[0].element == RelayElement::rocof);
        REQUIRE(events[0].time == Approx(0.050).margin(1e-3 + 1e-12));
    }
}

TEST_CASE("quiet measurements leave every element monitoring", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    const auto events = feed(bank, cfg, 1.005, 0.02, 50000);
    REQUIRE(events.empty());
    REQUIRE(bank.of.phase == RelayPhase::monitoring);
    REQUIRE(bank.uf.phase == RelayPhase::monitoring);
    REQUIRE(bank.rocof.phase == RelayPhase::monitoring);
}

TEST_CASE("a trip is absorbing for the rest of the run", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    feed(bank, cfg, 1.04, 0.0, 400);
    const double tripped_at = bank.of.tripped_at;
    const auto later = feed(bank, cfg, 1.0, 0.0, 1000, 1e-3, 0.4);
    REQUIRE(later.empty());
    REQUIRE(bank.of.phase == RelayPhase::tripped);
    REQUIRE(bank.of.tripped_at == tripped_at);
    REQUIRE(bank.any_tripped());
}

TEST_CASE("simultaneous violations raise one event per element", "[relays]") {
    RelayConfig cfg;
    cfg.of_clearing = 0.05;  // align with the rocof pickup
    RelayBank bank;
    std::vector<TripEvent> events = feed(bank, cfg, 1.05, 0.08, 100);
    REQUIRE(events.size() == 2);
    REQUIRE(events[0].element == RelayElement::over_frequency);
    REQUIRE(events[1].element == RelayElement::rocof);
    REQUIRE(events[0].time == events[1].time);
}

TEST_CASE("relay step validates dt", "[relays]") {
    RelayConfig cfg;
    RelayBank bank;
    REQUIRE_THROWS_AS(relay_step(bank, cfg, 1.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

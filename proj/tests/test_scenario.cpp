#include <doctest.h>

#include <cmath>

#include "qcollapse/engine.hpp"
#include "qcollapse/scenario.hpp"

using namespace qc;

TEST_CASE("every builder yields a valid frozen initial state") {
    for (CaseId id : {CaseId::Baseline, CaseId::Case1, CaseId::Case2, CaseId::Case3,
                      CaseId::Scattering}) {
        const Scenario s = build_scenario(default_config(id));
        check_state_invariants(s.initial_state);
        CHECK(assert_freeze(s.initial_state, s.channels).empty());
        CHECK(s.initial_state.t == 0.0);
        CHECK(std::abs(s.initial_state.s - 1.0) < 1e-12);
        // every ready component is born at zero square modulus
        for (const Component& c : s.initial_state.components) {
            if (c.kind == ComponentKind::Ready) {
                CHECK(squared_norm(c.psi) == 0.0);
            }
        }
    }
}

TEST_CASE("baseline has no channels and never collapses") {
    const Scenario s = build_baseline(default_config(CaseId::Baseline));
    CHECK(s.channels.empty());
    CHECK(s.initial_state.components.size() == 1);
}

TEST_CASE("case1 creates one ready component and channel per crystal") {
    ScenarioConfig cfg = default_config(CaseId::Case1);
    cfg.windows = {{1.0, 2.0}, {3.0, 4.0}, {-4.0, -3.0}};
    const Scenario s = build_case1(cfg);
    CHECK(s.channels.size() == 3);
    CHECK(s.initial_state.components.size() == 4);
    CHECK(s.initial_state.find(s.channels[0].target)->labels.at("crystal") == "1");
    // gamma supported only on its window
    for (int j = 0; j < s.grid.n_points; ++j) {
        const double x = s.grid.x(j);
        const bool inside = x >= 1.0 && x <= 2.0;
        CHECK((s.channels[0].gamma[j] > 0.0) == inside);
    }
}

TEST_CASE("case1 rejects overlapping crystal windows") {
    ScenarioConfig cfg = default_config(CaseId::Case1);
    cfg.windows = {{1.0, 2.0}, {1.5, 2.5}};
    CHECK_THROWS_AS(build_case1(cfg), ArgumentError);
    cfg.windows = {{2.0, 1.0}};
    CHECK_THROWS_AS(build_case1(cfg), ArgumentError);
}

TEST_CASE("symmetric case1 windows carry equal initial currents") {
    ScenarioConfig cfg = default_config(CaseId::Case1);
    cfg.windows = {{0.5, 1.5}, {-1.5, -0.5}};
    const Scenario s = build_case1(cfg);
    const GridWavefunction& psi = s.initial_state.components[0].psi;
    const double j0 = channel_current(s.channels[0], psi);
    const double j1 = channel_current(s.channels[1], psi);
    CHECK(j0 == doctest::Approx(j1).epsilon(1e-10));
}

TEST_CASE("case2 builds branch-offset copies scaled by branch weight") {
    ScenarioConfig cfg = default_config(CaseId::Case2);
    cfg.windows = {{0.5, 1.5}, {-1.5, -0.5}};
    cfg.branch_offset_a = 0.0;
    cfg.branch_offset_b = 0.0; // identical geometry
    cfg.branch_weight_a = 0.8;
    cfg.branch_weight_b = 0.2;
    const Scenario s = build_case2(cfg);
    REQUIRE(s.channels.size() == 4);
    CHECK(s.initial_state.components.size() == 5);

    const GridWavefunction& psi = s.initial_state.components[0].psi;
    // With identical geometry the branch currents stand in the exact weight
    // ratio, crystal by crystal.
    for (int crystal = 0; crystal < 2; ++crystal) {
        const double ja = channel_current(s.channels[crystal], psi);
        const double jb = channel_current(s.channels[2 + crystal], psi);
        CHECK(ja == doctest::Approx(4.0 * jb).epsilon(1e-12));
    }
    const Component* c = s.initial_state.find(s.channels[2].target);
    CHECK(c->labels.at("branch") == "B");
    CHECK(c->labels.at("crystal") == "1");
}

TEST_CASE("case2 validates branch weights") {
    ScenarioConfig cfg = default_config(CaseId::Case2);
    cfg.branch_weight_a = 0.9;
    cfg.branch_weight_b = 0.2;
    CHECK_THROWS_AS(build_case2(cfg), ArgumentError);
}

TEST_CASE("case3 channels sum to the full-extent capture profile") {
    const Scenario s = build_case3(default_config(CaseId::Case3));
    REQUIRE(s.channels.size() == 3);
    // Near the center the summed profile approaches g * sqrt(2 pi) * lambda.
    const double expected = 0.5 * std::sqrt(2.0 * M_PI) * 1.0;
    const int mid = s.grid.n_points / 2;
    double total = 0.0;
    for (const CaptureChannel& ch : s.channels) total += ch.gamma[mid];
    CHECK(total == doctest::Approx(expected).epsilon(1e-6));
    CHECK(s.channel_intervals[0].lo == doctest::Approx(-6.0));
    CHECK(s.channel_intervals[2].hi == doctest::Approx(6.0));
}

TEST_CASE("scattering batches tile the atom extent exactly") {
    const Scenario s = build_scattering(default_config(CaseId::Scattering));
    REQUIRE(s.channels.size() == 4);
    for (int j = 0; j < s.grid.n_points; ++j) {
        const double x = s.grid.x(j);
        double tot = 0.0;
        for (const CaptureChannel& ch : s.channels) tot += ch.gamma[j];
        const bool inside = x >= -3.0 && x <= 3.0;
        if (inside) {
            CHECK(tot == doctest::Approx(0.5).epsilon(1e-12));
        } else {
            CHECK(tot == 0.0);
        }
    }
    CHECK(s.initial_state.find(s.channels[1].target)->labels.at("photon") == "2");
}

TEST_CASE("scattering with one whole-support batch does not localize") {
    ScenarioConfig cfg = default_config(CaseId::Scattering);
    cfg.atom_n_batches = 1;
    cfg.atom_extent_min = cfg.grid_x_min;
    cfg.atom_extent_max = cfg.grid_x_max;
    const Scenario s = build_scattering(cfg);

    UniverseState state = s.initial_state;
    const double pre = position_variance(state.components[0].psi);
    drain_and_fill(state, s.channels, 0.01);
    collapse(state, s.channels[0].target);
    const double post = position_variance(state.components[0].psi);
    CHECK(std::abs(post - pre) < 1e-9);
}

TEST_CASE("step guard rejects dt too large for the configured rates") {
    ScenarioConfig cfg = default_config(CaseId::Case1);
    cfg.window_rate = 50.0; // gamma_max * dt = 0.5 > 0.1
    CHECK_THROWS_AS(build_case1(cfg), StepTooLarge);
    cfg.dt = 0.001;
    CHECK_NOTHROW(build_case1(cfg));
}

TEST_CASE("rate_scale multiplies every capture rate") {
    ScenarioConfig cfg = default_config(CaseId::Case3);
    cfg.rate_scale = 2.0;
    const Scenario doubled = build_case3(cfg);
    const Scenario plain = build_case3(default_config(CaseId::Case3));
    for (int j = 0; j < plain.grid.n_points; j += 100) {
        CHECK(doubled.channels[0].gamma[j] ==
              doctest::Approx(2.0 * plain.channels[0].gamma[j]).epsilon(1e-12));
    }
}

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qcollapse/channel.hpp"
#include "qcollapse/component.hpp"
#include "qcollapse/decoherence.hpp"
#include "qcollapse/hamiltonian.hpp"

namespace qc {

enum class CaseId {
    Baseline,   // no channels: pure unitary spreading
    Case1,      // localized camera, N crystal windows in the lab frame
    Case2,      // two-branch camera, branch-offset window copies x branch weight
    Case3,      // continuous camera split into decoherent batches via a kernel
    Scattering, // emitting atom partitioned into batches, uniform emission rate
};

std::string case_name(CaseId id);
CaseId case_from_name(const std::string& name);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Complete description of one run; this is also the config-file surface.
struct ScenarioConfig {
    CaseId case_id = CaseId::Baseline;

    // grid.*
    double grid_x_min = -20.0;
    double grid_x_max = 20.0;
    int grid_n_points = 1001;

    // object.*
    double object_center = 0.0;
    double object_sigma = 1.0;
    double object_momentum = 0.0;
    double object_mass = 1.0;

    std::string potential = "free"; // free | harmonic
    double potential_omega = 1.0;
    std::string boundary = "reflecting"; // reflecting | periodic

    double dt = 0.01;
    double t_max = 10.0;
    double rate_scale = 1.0; // multiplies every capture rate
    int max_collapses = 1;

    // case1.* / case2.* crystal geometry
    std::vector<Interval> windows = {{1.0, 2.0}};
    double window_rate = 0.5;

    // case2.* branch layout
    double branch_offset_a = 0.0;
    double branch_offset_b = 0.25;
    double branch_weight_a = 0.5; // |alpha|^2
    double branch_weight_b = 0.5; // |beta|^2

    // case3.* continuous detector
    double detector_extent_min = -6.0;
    double detector_extent_max = 6.0;
    int detector_n_batches = 3;
    std::vector<double> detector_boundaries; // optional explicit partition
    double kernel_g = 0.5;
    double kernel_lambda = 1.0;
    std::string detector_density = "uniform"; // uniform | gaussian
    double detector_center = 0.0;
    double detector_sigma = 2.0;
    int quadrature_panels = 1200;

    // scattering.*
    double atom_extent_min = -3.0;
    double atom_extent_max = 3.0;
    int atom_n_batches = 4;
    std::vector<double> atom_boundaries; // optional explicit partition
    double emit_rate = 0.5;

    int n_steps() const;
};

// Built scenario: initial universe state plus the immutable channel set.
// Shared read-only across trajectories; each trajectory copies the state.
struct Scenario {
    ScenarioConfig config;
    Grid1D grid;
    Hamiltonian1D hamiltonian;
    UniverseState initial_state;
    std::vector<CaptureChannel> channels;
    // Detector/batch (or window) interval behind each channel, for reporting
    // the reduced camera / atom location.
    std::vector<Interval> channel_intervals;

    std::string name() const { return case_name(config.case_id); }
};

Scenario build_baseline(const ScenarioConfig& cfg);
Scenario build_case1(const ScenarioConfig& cfg);
Scenario build_case2(const ScenarioConfig& cfg);
Scenario build_case3(const ScenarioConfig& cfg);
Scenario build_scattering(const ScenarioConfig& cfg);
Scenario build_scenario(const ScenarioConfig& cfg); // dispatch on case_id

// Static sufficient condition for the per-step trigger guard:
// dt * max_x gamma_tot(x) <= kStepHazardGuard implies the dynamic guard
// (J/s) dt can never trip. Throws StepTooLarge naming the guard.
void check_step_guard(const Scenario& scenario);

ScenarioConfig default_config(CaseId id);

} // namespace qc

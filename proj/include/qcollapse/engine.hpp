#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcollapse/channel.hpp"
#include "qcollapse/component.hpp"
#include "qcollapse/propagator.hpp"
#include "qcollapse/rng.hpp"

namespace qc {

struct CollapseEvent {
    double t_sc = 0.0;
    ComponentId chosen;
    int channel_index = -1;
    double pre_variance = 0.0;   // realized component just before the hit
    double post_variance = 0.0;  // collapsed state (equals its snapshot variance)
    std::vector<double> hazard_at_hit;
    std::map<std::string, std::string> chosen_labels;
};

// Stochastic trigger: strikes ready component n with probability
// (J_n/s) dt this step, at most one hit per step. A single uniform draw is
// consumed every call (also when nothing fires or no channels exist), and
// candidates are scanned in channel order; both are part of the
// reproducibility contract. Never selects a realized component.
std::optional<std::size_t> sample_trigger_index(const CurrentLedger& ledger, double dt,
                                                RngStream& rng);
std::optional<ComponentId> sample_trigger(const CurrentLedger& ledger,
                                          const UniverseState& state,
                                          const std::vector<CaptureChannel>& channels,
                                          double dt, RngStream& rng);

// The chosen ready component becomes the one realized component: every other
// component's amplitudes go to zero and are dropped, the chosen snapshot is
// renormalized to 1, and s = 1 afterwards. Choosing anything but a ready
// component with accumulated square modulus is a rule violation.
void collapse(UniverseState& state, ComponentId chosen);

struct FreezeReport {
    std::vector<std::string> violations;
    bool empty() const { return violations.empty(); }
};

// Verifies the freeze law: no channel draws current from a ready component,
// and every ready component's content matches what the last drain/fill
// transfer recorded (L2 difference below kFreezeTol). Reporting only.
FreezeReport assert_freeze(const UniverseState& state,
                           const std::vector<CaptureChannel>& channels);

// Hazard advance with currents that were computed before the drain step, so
// drain, ledger and trigger all see the same J_n.
void advance_ledger(CurrentLedger& ledger, const std::vector<double>& currents, double s,
                    double t, double dt);

// One engine step, fixed order: unitary step on the realized component ->
// recompute currents -> drain/fill -> ledger -> trigger -> (if hit) collapse.
// With debug_checks the state invariants and the freeze law are verified
// every step.
std::optional<CollapseEvent> run_step(UniverseState& state, CurrentLedger& ledger,
                                      const std::vector<CaptureChannel>& channels,
                                      const CrankNicolson& propagator, double dt,
                                      RngStream& rng, bool debug_checks = false);

} // namespace qc

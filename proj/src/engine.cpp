#include "qcollapse/engine.hpp"

#include <cmath>
#include <string>

#include "qcollapse/tolerances.hpp"

namespace qc {

std::optional<std::size_t> sample_trigger_index(const CurrentLedger& ledger, double dt,
                                                RngStream& rng) {
    if (!(dt > 0.0)) {
        throw ArgumentError("sample_trigger: dt must be positive");
    }
    double total = 0.0;
    for (double j : ledger.current) total += j / ledger.s * dt;
    if (total > tol::kStepHazardGuard * (1.0 + 1e-12)) {
        throw StepTooLarge("sample_trigger: step hazard " + std::to_string(total) +
                           " exceeds guard " + std::to_string(tol::kStepHazardGuard));
    }

    const double u = rng.uniform(); // always one draw per step
    double cumulative = 0.0;
    for (std::size_t n = 0; n < ledger.current.size(); ++n) {
        cumulative += ledger.current[n] / ledger.s * dt;
        if (u < cumulative) return n;
    }
    return std::nullopt;
}

std::optional<ComponentId> sample_trigger(const CurrentLedger& ledger,
                                          const UniverseState& state,
                                          const std::vector<CaptureChannel>& channels,
                                          double dt, RngStream& rng) {
    const std::optional<std::size_t> idx = sample_trigger_index(ledger, dt, rng);
    if (!idx) return std::nullopt;
    const CaptureChannel& ch = channels.at(*idx);
    const Component* target = state.find(ch.target);
    if (target == nullptr) {
        throw StructuralError("sample_trigger: channel '" + ch.label +
                              "' targets unknown component");
    }
    if (target->kind != ComponentKind::Ready) {
        throw InvariantViolation("sample_trigger: chose non-ready component " +
                                 std::to_string(ch.target.value));
    }
    return ch.target;
}

void collapse(UniverseState& state, ComponentId chosen) {
    Component* target = state.find(chosen);
    if (target == nullptr) {
        throw StructuralError("collapse: unknown component id " + std::to_string(chosen.value));
    }
    if (target->kind != ComponentKind::Ready) {
        throw InvariantViolation("collapse: component " + std::to_string(chosen.value) +
                                 " is not a ready component");
    }
    if (!(squared_norm(target->psi) > 0.0)) {
        throw InvariantViolation("collapse: component " + std::to_string(chosen.value) +
                                 " has no accumulated snapshot");
    }

    // All other components go to zero, then the survivor is rescaled to a
    // unit universe (J/s statistics are scale-invariant, this just avoids
    // float underflow across repeated reductions).
    for (Component& c : state.components) {
        if (c.id == chosen) continue;
        for (cdouble& a : c.psi.amps) a = cdouble{0.0, 0.0};
    }
    Component survivor = std::move(*target);
    survivor.kind = ComponentKind::Realized;
    survivor.has_inflow_record = false;
    survivor.inflow_record = GridWavefunction{};
    normalize(survivor.psi);
    state.components.clear();
    state.components.push_back(std::move(survivor));
    state.s = 1.0; // exact by contract; the recomputed sum differs only by round-off
}

FreezeReport assert_freeze(const UniverseState& state,
                           const std::vector<CaptureChannel>& channels) {
    FreezeReport report;

    for (const CaptureChannel& ch : channels) {
        if (!ch.source.has_value()) continue; // implicit source: the realized component
        const Component* src = state.find(*ch.source);
        if (src == nullptr) {
            report.violations.push_back("channel '" + ch.label + "' names unknown source " +
                                        std::to_string(ch.source->value));
        } else if (src->kind == ComponentKind::Ready) {
            report.violations.push_back("channel '" + ch.label +
                                        "' draws current from ready component " +
                                        std::to_string(src->id.value));
        }
    }

    for (const Component& c : state.components) {
        if (c.kind != ComponentKind::Ready) continue;
        if (!c.has_inflow_record) {
            const double n2 = squared_norm(c.psi);
            if (n2 != 0.0) {
                report.violations.push_back("ready component " + std::to_string(c.id.value) +
                                            " gained square modulus " + std::to_string(n2) +
                                            " without a recorded inflow");
            }
            continue;
        }
        if (c.psi.grid != c.inflow_record.grid) {
            report.violations.push_back("ready component " + std::to_string(c.id.value) +
                                        " changed grid outside drain/fill");
            continue;
        }
        double diff2 = 0.0;
        for (int j = 0; j < c.psi.size(); ++j) {
            diff2 += std::norm(c.psi.amps[j] - c.inflow_record.amps[j]);
        }
        const double diff = std::sqrt(diff2 * c.psi.grid.dx());
        if (diff > tol::kFreezeTol) {
            report.violations.push_back("ready component " + std::to_string(c.id.value) +
                                        " evolved outside drain/fill (L2 diff " +
                                        std::to_string(diff) + ")");
        }
    }
    return report;
}

void advance_ledger(CurrentLedger& ledger, const std::vector<double>& currents, double s,
                    double t, double dt) {
    if (currents.size() != ledger.current.size()) {
        throw StructuralError("advance_ledger: channel count mismatch");
    }
    ledger.current = currents;
    ledger.s = s;
    for (std::size_t n = 0; n < currents.size(); ++n) {
        ledger.hazard[n] += currents[n] / s * dt;
    }
    ledger.push_history(t);
}

std::optional<CollapseEvent> run_step(UniverseState& state, CurrentLedger& ledger,
                                      const std::vector<CaptureChannel>& channels,
                                      const CrankNicolson& propagator, double dt,
                                      RngStream& rng, bool debug_checks) {
    Component& realized = state.components[state.realized_index()];
    propagator.step(realized.psi);
    state.t += dt;

    const std::vector<double> currents = compute_currents(state, channels);
    drain_and_fill(state, channels, dt);
    advance_ledger(ledger, currents, state.s, state.t, dt);

    std::optional<CollapseEvent> event;
    const std::optional<std::size_t> hit = sample_trigger_index(ledger, dt, rng);
    if (hit) {
        const CaptureChannel& ch = channels[*hit];
        const Component* target = state.find(ch.target);
        if (target == nullptr || target->kind != ComponentKind::Ready) {
            throw InvariantViolation("run_step: trigger chose a non-ready component");
        }
        CollapseEvent ev;
        ev.t_sc = state.t;
        ev.chosen = ch.target;
        ev.channel_index = static_cast<int>(*hit);
        ev.hazard_at_hit = ledger.hazard;
        ev.chosen_labels = target->labels;
        ev.pre_variance = position_variance(state.components[state.realized_index()].psi);
        collapse(state, ch.target);
        ev.post_variance = position_variance(state.components[0].psi);
        event = ev;
    }

    if (debug_checks) {
        check_state_invariants(state);
        const FreezeReport fr = assert_freeze(state, channels);
        if (!fr.empty()) {
            std::string msg = "freeze law violated:";
            for (const std::string& v : fr.violations) msg += "\n  " + v;
            throw InvariantViolation(msg);
        }
    }
    return event;
}

} // namespace qc

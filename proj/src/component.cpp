#include "qcollapse/component.hpp"

#include <cmath>
#include <set>
#include <string>

#include "qcollapse/tolerances.hpp"

namespace qc {

Component* UniverseState::find(ComponentId id) {
    for (Component& c : components) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const Component* UniverseState::find(ComponentId id) const {
    for (const Component& c : components) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

int UniverseState::realized_index() const {
    int found = -1;
    for (int i = 0; i < static_cast<int>(components.size()); ++i) {
        if (components[i].kind == ComponentKind::Realized) {
            if (found >= 0) {
                throw InvariantViolation("UniverseState: more than one realized component");
            }
            found = i;
        }
    }
    if (found < 0) {
        throw InvariantViolation("UniverseState: no realized component");
    }
    return found;
}

double total_square_modulus(const UniverseState& state) {
    double acc = 0.0;
    for (const Component& c : state.components) {
        acc += squared_norm(c.psi);
    }
    return acc;
}

void mark_ready(UniverseState& state, ComponentId id) {
    Component* c = state.find(id);
    if (c == nullptr) {
        throw StructuralError("mark_ready: unknown component id " + std::to_string(id.value));
    }
    const double n2 = squared_norm(c->psi);
    if (n2 != 0.0) {
        throw InvariantViolation("mark_ready: component " + std::to_string(id.value) +
                                 " carries square modulus " + std::to_string(n2) +
                                 "; ready components are born at zero");
    }
    c->kind = ComponentKind::Ready;
    c->born_at = state.t;
}

void check_state_invariants(const UniverseState& state) {
    std::set<std::uint32_t> seen;
    for (const Component& c : state.components) {
        if (!seen.insert(c.id.value).second) {
            throw InvariantViolation("duplicate component id " + std::to_string(c.id.value));
        }
        if (!all_finite(c.psi)) {
            throw NumericalError("component " + std::to_string(c.id.value) +
                                 " has non-finite amplitudes");
        }
    }
    state.realized_index(); // exactly one realized

    const double recomputed = total_square_modulus(state);
    const double scale = std::max(std::abs(recomputed), std::abs(state.s));
    if (scale > 0.0 && std::abs(recomputed - state.s) > tol::kConservationRel * scale) {
        throw InvariantViolation("cached total square modulus drifted: cached=" +
                                 std::to_string(state.s) + " recomputed=" +
                                 std::to_string(recomputed));
    }
}

} // namespace qc

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcollapse/grid.hpp"

namespace qc {

// A component is either the single realized branch (driven by the
// Hamiltonian) or a ready branch created by an irreversible interaction,
// frozen until it is stochastically chosen.
enum class ComponentKind {
    Realized,
    Ready,
};

struct ComponentId {
    std::uint32_t value = 0;
    auto operator<=>(const ComponentId&) const = default;
};

struct Component {
    ComponentId id;
    ComponentKind kind = ComponentKind::Realized;
    std::map<std::string, std::string> labels;
    GridWavefunction psi;
    double born_at = 0.0;

    // Snapshot written by the drain/fill transfer; ready components must not
    // change between steps except through that transfer (freeze law).
    GridWavefunction inflow_record;
    bool has_inflow_record = false;
};

// All components of one trajectory plus the simulation clock and the cached
// total square modulus s. Confined to a single trajectory; movable between
// execution contexts, never shared.
struct UniverseState {
    std::vector<Component> components;
    double t = 0.0;
    double s = 0.0;

    Component* find(ComponentId id);
    const Component* find(ComponentId id) const;
    // Index of the unique realized component; throws InvariantViolation if
    // there is not exactly one.
    int realized_index() const;
};

// Recomputed sum of component squared norms (does not touch the cache).
double total_square_modulus(const UniverseState& state);

// Construction-time transition: tags a freshly added zero-norm component as
// ready. Unknown id is a StructuralError; marking a component that already
// carries square modulus violates the born-at-zero invariant.
void mark_ready(UniverseState& state, ComponentId id);

// Full structural check: unique ids, exactly one realized component, finite
// non-negative norms, cached s consistent with the recomputed sum.
void check_state_invariants(const UniverseState& state);

} // namespace qc

#include "qcollapse/channel.hpp"

#include <cmath>
#include <string>

#include "qcollapse/tolerances.hpp"

namespace qc {

CaptureChannel::CaptureChannel(ComponentId tgt, const Grid1D& g, std::vector<double> rate,
                               std::string lbl)
    : target(tgt), grid(g), gamma(std::move(rate)), label(std::move(lbl)) {
    if (static_cast<int>(gamma.size()) != grid.n_points) {
        throw StructuralError("CaptureChannel '" + label + "': gamma size does not match grid");
    }
    for (double gval : gamma) {
        if (!(gval >= 0.0) || !std::isfinite(gval)) {
            throw ArgumentError("CaptureChannel '" + label + "': gamma must be finite and >= 0");
        }
    }
}

double channel_current(const CaptureChannel& channel, const GridWavefunction& realized_psi) {
    if (realized_psi.grid != channel.grid) {
        throw StructuralError("channel_current: wavefunction grid does not match channel '" +
                              channel.label + "'");
    }
    double acc = 0.0;
    for (int j = 0; j < realized_psi.size(); ++j) {
        acc += channel.gamma[j] * std::norm(realized_psi.amps[j]);
    }
    return acc * channel.grid.dx();
}

CurrentLedger::CurrentLedger(std::size_t n_channels, std::size_t history_capacity)
    : current(n_channels, 0.0), hazard(n_channels, 0.0), history_capacity_(history_capacity) {
    history_.reserve(history_capacity_);
}

double CurrentLedger::total_current() const {
    double acc = 0.0;
    for (double j : current) acc += j;
    return acc;
}

double CurrentLedger::total_hazard() const {
    double acc = 0.0;
    for (double h : hazard) acc += h;
    return acc;
}

void CurrentLedger::push_history(double t) {
    LedgerEntry entry{t, s, current, hazard};
    if (history_.size() < history_capacity_) {
        history_.push_back(std::move(entry));
    } else if (history_capacity_ > 0) {
        history_[history_next_] = std::move(entry);
    }
    if (history_capacity_ > 0) history_next_ = (history_next_ + 1) % history_capacity_;
    ++history_seen_;
}

std::vector<double> compute_currents(const UniverseState& state,
                                     const std::vector<CaptureChannel>& channels) {
    const Component& realized = state.components[state.realized_index()];
    std::vector<double> j(channels.size(), 0.0);
    for (std::size_t n = 0; n < channels.size(); ++n) {
        j[n] = channel_current(channels[n], realized.psi);
    }
    return j;
}

void update_ledger(CurrentLedger& ledger, const UniverseState& state,
                   const std::vector<CaptureChannel>& channels, double dt) {
    if (!(dt > 0.0)) {
        throw ArgumentError("update_ledger: dt must be positive");
    }
    if (ledger.current.size() != channels.size()) {
        throw StructuralError("update_ledger: ledger channel count mismatch");
    }
    ledger.current = compute_currents(state, channels);
    ledger.s = state.s;
    for (std::size_t n = 0; n < channels.size(); ++n) {
        ledger.hazard[n] += ledger.current[n] / ledger.s * dt;
    }
    ledger.push_history(state.t);
}

void drain_and_fill(UniverseState& state, const std::vector<CaptureChannel>& channels,
                    double dt) {
    if (!(dt > 0.0)) {
        throw ArgumentError("drain_and_fill: dt must be positive");
    }
    if (channels.empty()) return;

    Component& realized = state.components[state.realized_index()];
    const Grid1D& grid = realized.psi.grid;

    std::vector<double> currents(channels.size(), 0.0);
    double total_current = 0.0;
    for (std::size_t n = 0; n < channels.size(); ++n) {
        Component* target = state.find(channels[n].target);
        if (target == nullptr) {
            throw StructuralError("drain_and_fill: channel '" + channels[n].label +
                                  "' targets unknown component");
        }
        if (target->kind != ComponentKind::Ready) {
            throw InvariantViolation("drain_and_fill: channel '" + channels[n].label +
                                     "' targets a non-ready component");
        }
        currents[n] = channel_current(channels[n], realized.psi);
        total_current += currents[n];
    }

    if (dt * total_current / state.s > tol::kStepHazardGuard * (1.0 + 1e-12)) {
        throw StepTooLarge("drain_and_fill: dt * sum(J)/s = " +
                           std::to_string(dt * total_current / state.s) +
                           " exceeds the per-step hazard guard " +
                           std::to_string(tol::kStepHazardGuard) + "; subdivide dt");
    }

    // Fill each ready target: square modulus grows by exactly J_n dt and the
    // spatial content becomes the latest capture-weighted snapshot
    // sqrt(gamma_n) psi, rescaled to the accumulated norm.
    for (std::size_t n = 0; n < channels.size(); ++n) {
        if (currents[n] <= 0.0) continue; // no inflow, target stays frozen as-is
        Component& target = *state.find(channels[n].target);
        double old_n2 = 0.0;
        if (target.psi.grid == grid) {
            old_n2 = squared_norm(target.psi);
        } else if (target.psi.amps.empty()) {
            target.psi = GridWavefunction(grid);
        } else {
            throw StructuralError("drain_and_fill: target of channel '" + channels[n].label +
                                  "' lives on a different grid");
        }
        const double new_n2 = old_n2 + currents[n] * dt;
        // ||sqrt(gamma_n) psi||^2 == J_n by definition of the current.
        const double scale = std::sqrt(new_n2 / currents[n]);
        for (int j = 0; j < grid.n_points; ++j) {
            target.psi.amps[j] = scale * std::sqrt(channels[n].gamma[j]) * realized.psi.amps[j];
        }
        target.inflow_record = target.psi;
        target.has_inflow_record = true;
    }

    // Pointwise depletion of the realized component: the density drops by
    // gamma_tot(x) |psi(x)|^2 dt, so the norm drops by exactly sum(J_n) dt.
    for (int j = 0; j < grid.n_points; ++j) {
        double gamma_tot = 0.0;
        for (const CaptureChannel& ch : channels) gamma_tot += ch.gamma[j];
        const double depletion = gamma_tot * dt;
        if (depletion >= 1.0) {
            throw StepTooLarge("drain_and_fill: pointwise depletion gamma_tot(x) dt = " +
                               std::to_string(depletion) + " reaches 1 at x = " +
                               std::to_string(grid.x(j)) + "; subdivide dt");
        }
        realized.psi.amps[j] *= std::sqrt(1.0 - depletion);
    }

    state.s = total_square_modulus(state);
}

} // namespace qc

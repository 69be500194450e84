#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qcollapse/component.hpp"
#include "qcollapse/grid.hpp"

namespace qc {

// Irreversible coupling feeding square modulus from the realized component
// into one ready component, as a rate density gamma(x) >= 0 (1/time) on the
// object grid.
struct CaptureChannel {
    ComponentId target;             // must reference a ready component
    Grid1D grid;
    std::vector<double> gamma;      // per grid point, >= 0
    std::string label;
    // Current source; empty means the realized component. Only deliberately
    // broken fixtures set anything else (see assert_freeze).
    std::optional<ComponentId> source;

    CaptureChannel(ComponentId tgt, const Grid1D& g, std::vector<double> rate,
                   std::string lbl);
};

// J = sum_x gamma(x) |psi(x)|^2 dx, the instantaneous current the channel
// draws from the given (realized) wavefunction.
double channel_current(const CaptureChannel& channel, const GridWavefunction& realized_psi);

// One recorded engine step, kept in the ledger's ring buffer.
struct LedgerEntry {
    double t = 0.0;
    double s = 0.0;
    std::vector<double> current; // J_n
    std::vector<double> hazard;  // H_n
};

// Per-channel instantaneous currents and cumulative hazards
// H_n = integral of (J_n / s) dt, accumulated with the engine step.
struct CurrentLedger {
    std::vector<double> current;   // J_n, refreshed every step
    std::vector<double> hazard;    // H_n, non-decreasing
    double s = 1.0;                // total square modulus at last update

    explicit CurrentLedger(std::size_t n_channels, std::size_t history_capacity = 256);

    double total_current() const;
    double total_hazard() const;

    void push_history(double t);
    const std::vector<LedgerEntry>& history() const { return history_; }
    std::size_t history_seen() const { return history_seen_; }

private:
    std::vector<LedgerEntry> history_; // ring buffer, most recent history_seen_ entries
    std::size_t history_capacity_ = 0;
    std::size_t history_next_ = 0;
    std::size_t history_seen_ = 0;
};

// Refreshes J_n from the realized component, sets s, and advances the
// hazards by (J_n/s) dt. Appends one history entry.
void update_ledger(CurrentLedger& ledger, const UniverseState& state,
                   const std::vector<CaptureChannel>& channels, double dt);

// Computes J_n only (no hazard advance); used where currents are needed
// before the transfer.
std::vector<double> compute_currents(const UniverseState& state,
                                     const std::vector<CaptureChannel>& channels);

// First-order transfer step: each ready target gains J_n dt of square
// modulus and records the capture-weighted snapshot sqrt(gamma_n) psi; the
// realized component loses the same total pointwise, weighted by gamma.
// Total square modulus is conserved to round-off. Throws StepTooLarge when
// dt * sum(J_n)/s exceeds the hazard guard or the pointwise depletion
// gamma_tot(x) dt reaches 1.
void drain_and_fill(UniverseState& state, const std::vector<CaptureChannel>& channels,
                    double dt);

} // namespace qc

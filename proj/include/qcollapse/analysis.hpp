#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcollapse/engine.hpp"
#include "qcollapse/scenario.hpp"

namespace qc {

struct SeriesRow {
    double t = 0.0;
    double variance = 0.0;
    double s = 0.0;
    std::vector<double> hazard;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string scenario;
    std::vector<CollapseEvent> events;
    std::vector<SeriesRow> series; // decimated; last row reflects the collapse if any
    bool collapsed = false;
    double t_end = 0.0;
    double final_variance = 0.0;
};

// Deterministic pre-collapse sweep of a scenario: the engine run with the
// trigger disabled. Randomness enters trajectories only through the trigger,
// so every per-step quantity here is shared by all trajectories bit for bit.
// This backs the fast trajectory path and the mean-variance tabulation.
struct PrecollapseTable {
    double dt = 0.0;
    int n_steps = 0;
    int n_channels = 0;
    std::vector<double> t;                          // per step
    std::vector<double> s;                          // total square modulus
    std::vector<double> realized_variance;          // post-drain realized component
    std::vector<std::vector<double>> current;       // [step][channel] J_n
    std::vector<std::vector<double>> hazard;        // [step][channel] cumulative H_n
    std::vector<std::vector<double>> candidate_variance; // [step][channel] if hit here
};

PrecollapseTable sweep_precollapse(const Scenario& scenario);

struct TrajectoryOptions {
    bool debug_checks = false;
    int series_max_rows = 2000;
};

// Reference path: the full per-step engine on an owned UniverseState.
TrajectoryRecord run_trajectory(const Scenario& scenario, RngStream rng,
                                const TrajectoryOptions& opt = {});

// Fast path: replays the trigger against the shared sweep table. Produces
// bit-identical records to run_trajectory for the same (seed, stream) when
// at most one collapse is allowed.
TrajectoryRecord run_trajectory_tabulated(const Scenario& scenario,
                                          const PrecollapseTable& table, RngStream rng,
                                          const TrajectoryOptions& opt = {});

// Fine-step quadrature oracle for the first-hit law: integrates J_n(t)/s at
// dt/refine with the trapezoid rule into per-channel hazards, giving hit
// CDFs 1 - exp(-H). Independent of the engine's per-step thinning path.
struct OracleCdf {
    double t_max = 0.0;
    double dt_fine = 0.0;
    std::vector<double> t;            // fine times, starting at 0
    std::vector<double> total_hazard; // H_tot(t)
    double hit_fraction = 0.0;        // 1 - exp(-H_tot(t_max))
    std::vector<double> channel_hit_weight; // integral (J_n/s) e^{-H} dt, per channel
    double mean_post_variance_given_hit = 0.0; // NaN unless with_variance

    double hazard_at(double time) const; // linear interpolation
    double cdf(double time) const;       // 1 - exp(-hazard_at(time))
    double conditional_cdf(double time) const; // cdf / cdf(t_max)
};

OracleCdf oracle_first_hit_cdf(const Scenario& scenario, int refine = 100,
                               bool with_variance = false);

// Kolmogorov-Smirnov statistic of sorted samples against cdf(t), and the
// one-sample critical value at significance alpha (0.01 or 0.05).
double ks_statistic_sorted(const std::vector<double>& sorted_samples,
                           const OracleCdf& oracle, bool conditional);
double ks_critical_value(double alpha, std::size_t n_samples);

// p-quantile of a sorted vector with linear interpolation; NaN when empty.
double quantile_sorted(const std::vector<double>& sorted_values, double p);

struct EnsembleOptions {
    bool parallel = true;        // OpenMP over trajectories
    bool use_reference = false;  // force the full engine per trajectory
    bool debug_checks = false;   // reference path: invariants + freeze law per step
    bool reverse_order = false;  // serial only; execution-order invariance checks
    int keep_records = 0;        // retain full TrajectoryRecords for streams 0..K-1
    bool with_oracle = true;
    int oracle_refine = 100;
    int series_max_rows = 2000;
    int mean_series_rows = 200;
    int histogram_bins = 50;
};

struct EnsembleSummary {
    std::string scenario;
    std::uint64_t base_seed = 0;
    std::uint64_t n_traj = 0;
    std::uint64_t n_collapsed = 0;
    std::uint64_t n_failed = 0; // trajectories that raised numerical errors
    std::vector<std::string> failures; // per-trajectory error notes (capped)
    std::vector<std::uint64_t> channel_hits;
    double t_sc_p05 = 0.0, t_sc_p50 = 0.0, t_sc_p95 = 0.0;
    double mean_pre_variance = 0.0, ci95_pre_variance = 0.0;
    double mean_post_variance = 0.0, ci95_post_variance = 0.0;
    double mean_final_variance = 0.0; // over all trajectories, post-collapse held frozen
    double ks_stat = 0.0, ks_critical = 0.0;
    double oracle_hit_fraction = 0.0;
    double oracle_mean_post_variance = 0.0;
    std::vector<std::uint64_t> t_sc_histogram; // uniform bins over [0, t_max]
    std::vector<SeriesRow> mean_variance_series; // hazard column: H_tot mean
    // config echo for report-time compatibility checks
    double t_max = 0.0, dt = 0.0;
    double grid_x_min = 0.0, grid_x_max = 0.0;
    std::uint64_t grid_n_points = 0;
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<TrajectoryRecord> records; // first keep_records streams
};

// Runs n_traj independent trajectories on streams base_seed/(0..n-1) and
// aggregates in stream order, so the summary does not depend on scheduling.
EnsembleResult run_ensemble(const Scenario& scenario, std::uint64_t n_traj,
                            std::uint64_t base_seed, const EnsembleOptions& opt = {});

// Serial reference runner kept alongside the parallel path; the two must
// produce identical summaries.
EnsembleResult run_ensemble_serial(const Scenario& scenario, std::uint64_t n_traj,
                                   std::uint64_t base_seed, EnsembleOptions opt = {});

struct LocalizationReport {
    double baseline_variance_tmax = 0.0;
    double mean_post_collapse_variance = 0.0; // NaN when nothing collapsed
    double effective_variance = 0.0; // post-collapse mean, or final mean if no collapses
    double reduction_factor = 0.0;   // baseline_variance_tmax / effective_variance
    double collapse_fraction = 0.0;
    double oracle_prediction = 0.0;  // oracle mean post variance (NaN if absent)
    std::vector<SeriesRow> baseline_series;
    std::vector<SeriesRow> ensemble_series;
};

// Compares a collapsing ensemble against the no-channel baseline at the same
// grid and t_max; throws ArgumentError on mismatched configs.
LocalizationReport localization_report(const EnsembleSummary& ensemble,
                                       const EnsembleSummary& baseline);

// Constant-hazard race harness: drives the production ledger and trigger
// with fixed currents J_n = rates[n] and s = 1, the controlled setting in
// which first-hit times are exactly exponential. Returns the hit time and
// channel, or nullopt if nothing fired by t_cap.
struct RaceOutcome {
    double t = 0.0;
    int channel = -1;
};
std::optional<RaceOutcome> constant_rate_race(const std::vector<double>& rates, double dt,
                                              double t_cap, RngStream& rng);

} // namespace qc

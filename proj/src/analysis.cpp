#include "qcollapse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qcollapse/tolerances.hpp"

namespace qc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

int series_stride(int n_steps, int max_rows) {
    if (max_rows < 1) max_rows = 1;
    return std::max(1, (n_steps + max_rows - 1) / max_rows);
}

// Variance of the density gamma(x) |psi(x)|^2 in one pass; this is the
// variance of the capture snapshot sqrt(gamma) psi without forming it.
double weighted_density_variance(const std::vector<double>& gamma,
                                 const GridWavefunction& psi) {
    double n2 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < psi.size(); ++j) {
        const double w = gamma[j] * std::norm(psi.amps[j]);
        const double x = psi.grid.x(j);
        n2 += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    if (!(n2 > 0.0)) return kNaN;
    const double mean = m1 / n2;
    return m2 / n2 - mean * mean;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double ci95_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return kNaN;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    const double sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
    return kZ95 * sd / std::sqrt(static_cast<double>(v.size()));
}

} // namespace

PrecollapseTable sweep_precollapse(const Scenario& scenario) {
    const double dt = scenario.config.dt;
    const int n_steps = scenario.config.n_steps();
    const int n_channels = static_cast<int>(scenario.channels.size());

    PrecollapseTable table;
    table.dt = dt;
    table.n_steps = n_steps;
    table.n_channels = n_channels;
    table.t.resize(n_steps);
    table.s.resize(n_steps);
    table.realized_variance.resize(n_steps);
    table.current.assign(n_steps, std::vector<double>(n_channels, 0.0));
    table.hazard.assign(n_steps, std::vector<double>(n_channels, 0.0));
    table.candidate_variance.assign(n_steps, std::vector<double>(n_channels, kNaN));

    UniverseState state = scenario.initial_state;
    CurrentLedger ledger(n_channels);
    CrankNicolson propagator(scenario.hamiltonian, dt);

    for (int k = 0; k < n_steps; ++k) {
        // Same sequence as run_step, with the trigger left out.
        Component& realized = state.components[state.realized_index()];
        propagator.step(realized.psi);
        state.t += dt;
        const std::vector<double> currents = compute_currents(state, scenario.channels);
        drain_and_fill(state, scenario.channels, dt);
        advance_ledger(ledger, currents, state.s, state.t, dt);

        // The trigger would reject this step; fail here instead of sampling.
        double step_hazard = 0.0;
        for (double j : ledger.current) step_hazard += j / ledger.s * dt;
        if (step_hazard > tol::kStepHazardGuard * (1.0 + 1e-12)) {
            throw StepTooLarge("sweep_precollapse: step hazard " + std::to_string(step_hazard) +
                               " exceeds guard at t = " + std::to_string(state.t));
        }

        table.t[k] = state.t;
        table.s[k] = state.s;
        table.realized_variance[k] =
            position_variance(state.components[state.realized_index()].psi);
        table.current[k] = ledger.current;
        table.hazard[k] = ledger.hazard;
        for (int n = 0; n < n_channels; ++n) {
            const Component* target = state.find(scenario.channels[n].target);
            if (target != nullptr && squared_norm(target->psi) > 0.0) {
                GridWavefunction snapshot = target->psi;
                normalize(snapshot);
                table.candidate_variance[k][n] = position_variance(snapshot);
            }
        }
    }
    return table;
}

namespace {

// Re-arms a trajectory-local copy of the channel set after a collapse:
// fresh zero-norm ready components, same capture profiles.
void rearm_channels(UniverseState& state, std::vector<CaptureChannel>& channels) {
    for (CaptureChannel& ch : channels) {
        Component fresh;
        fresh.id = ComponentId{static_cast<std::uint32_t>(
            state.components.empty() ? 1 : state.components.back().id.value + 1)};
        fresh.kind = ComponentKind::Realized; // provisional until mark_ready
        fresh.labels["channel"] = ch.label;
        fresh.psi = GridWavefunction(ch.grid);
        const ComponentId id = fresh.id;
        state.components.push_back(std::move(fresh));
        mark_ready(state, id);
        ch.target = id;
    }
}

} // namespace

TrajectoryRecord run_trajectory(const Scenario& scenario, RngStream rng,
                                const TrajectoryOptions& opt) {
    const double dt = scenario.config.dt;
    const int n_steps = scenario.config.n_steps();
    const int max_collapses = std::max(1, scenario.config.max_collapses);
    const int stride = series_stride(n_steps, opt.series_max_rows);

    TrajectoryRecord rec;
    rec.seed = rng.seed();
    rec.stream = rng.stream();
    rec.scenario = scenario.name();

    UniverseState state = scenario.initial_state;
    std::vector<CaptureChannel> channels = scenario.channels;
    CurrentLedger ledger(channels.size());
    CrankNicolson propagator(scenario.hamiltonian, dt);

    bool done = false;
    for (int k = 0; k < n_steps && !done; ++k) {
        std::optional<CollapseEvent> event;
        try {
            event = run_step(state, ledger, channels, propagator, dt, rng, opt.debug_checks);
        } catch (const NumericalError& e) {
            throw NumericalError("trajectory (seed " + std::to_string(rec.seed) + ", stream " +
                                 std::to_string(rec.stream) + "): " + e.what());
        }
        if (event) {
            rec.events.push_back(*event);
            rec.series.push_back(
                SeriesRow{event->t_sc, event->post_variance, 1.0, event->hazard_at_hit});
            if (static_cast<int>(rec.events.size()) >= max_collapses) {
                done = true;
            } else {
                rearm_channels(state, channels);
                ledger = CurrentLedger(channels.size());
            }
        } else if (k % stride == 0) {
            rec.series.push_back(
                SeriesRow{state.t, position_variance(state.components[state.realized_index()].psi),
                          state.s, ledger.hazard});
        }
    }

    rec.collapsed = !rec.events.empty();
    if (rec.collapsed && static_cast<int>(rec.events.size()) >= max_collapses) {
        rec.t_end = rec.events.back().t_sc;
        rec.final_variance = rec.events.back().post_variance;
    } else {
        rec.t_end = state.t;
        rec.final_variance =
            position_variance(state.components[state.realized_index()].psi);
        if (n_steps > 0 && (n_steps - 1) % stride != 0) {
            rec.series.push_back(SeriesRow{state.t, rec.final_variance, state.s, ledger.hazard});
        }
    }
    return rec;
}

TrajectoryRecord run_trajectory_tabulated(const Scenario& scenario,
                                          const PrecollapseTable& table, RngStream rng,
                                          const TrajectoryOptions& opt) {
    if (scenario.config.max_collapses != 1) {
        throw ArgumentError("run_trajectory_tabulated: only single-collapse scenarios "
                            "can replay against the sweep table");
    }
    const double dt = table.dt;
    const int n_steps = table.n_steps;
    const int n_channels = table.n_channels;
    const int stride = series_stride(n_steps, opt.series_max_rows);

    TrajectoryRecord rec;
    rec.seed = rng.seed();
    rec.stream = rng.stream();
    rec.scenario = scenario.name();

    int hit_step = -1;
    int hit_channel = -1;
    for (int k = 0; k < n_steps; ++k) {
        const double u = rng.uniform(); // same draw pattern as sample_trigger
        double cumulative = 0.0;
        for (int n = 0; n < n_channels; ++n) {
            cumulative += table.current[k][n] / table.s[k] * dt;
            if (u < cumulative) {
                hit_step = k;
                hit_channel = n;
                break;
            }
        }
        if (hit_step >= 0) break;
        if (k % stride == 0) {
            rec.series.push_back(SeriesRow{table.t[k], table.realized_variance[k], table.s[k],
                                           table.hazard[k]});
        }
    }

    if (hit_step >= 0) {
        const CaptureChannel& ch = scenario.channels[hit_channel];
        CollapseEvent ev;
        ev.t_sc = table.t[hit_step];
        ev.chosen = ch.target;
        ev.channel_index = hit_channel;
        ev.pre_variance = table.realized_variance[hit_step];
        ev.post_variance = table.candidate_variance[hit_step][hit_channel];
        ev.hazard_at_hit = table.hazard[hit_step];
        if (const Component* target = scenario.initial_state.find(ch.target)) {
            ev.chosen_labels = target->labels;
        }
        rec.events.push_back(ev);
        rec.series.push_back(SeriesRow{ev.t_sc, ev.post_variance, 1.0, ev.hazard_at_hit});
        rec.collapsed = true;
        rec.t_end = ev.t_sc;
        rec.final_variance = ev.post_variance;
    } else {
        rec.collapsed = false;
        rec.t_end = n_steps > 0 ? table.t[n_steps - 1] : 0.0;
        rec.final_variance = n_steps > 0 ? table.realized_variance[n_steps - 1] : kNaN;
        if (n_steps > 0 && (n_steps - 1) % stride != 0) {
            rec.series.push_back(SeriesRow{table.t[n_steps - 1],
                                           table.realized_variance[n_steps - 1],
                                           table.s[n_steps - 1], table.hazard[n_steps - 1]});
        }
    }
    return rec;
}

double OracleCdf::hazard_at(double time) const {
    if (t.empty() || time <= t.front()) return 0.0;
    if (time >= t.back()) return total_hazard.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double frac = (time - t[lo]) / (t[hi] - t[lo]);
    return total_hazard[lo] + frac * (total_hazard[hi] - total_hazard[lo]);
}

double OracleCdf::cdf(double time) const { return 1.0 - std::exp(-hazard_at(time)); }

double OracleCdf::conditional_cdf(double time) const {
    const double full = cdf(t_max);
    if (!(full > 0.0)) return 0.0;
    return cdf(time) / full;
}

OracleCdf oracle_first_hit_cdf(const Scenario& scenario, int refine, bool with_variance) {
    if (refine < 1) throw ArgumentError("oracle_first_hit_cdf: refine must be >= 1");
    const double dt_fine = scenario.config.dt / static_cast<double>(refine);
    const long n_fine = static_cast<long>(scenario.config.n_steps()) * refine;
    const int n_channels = static_cast<int>(scenario.channels.size());

    OracleCdf oracle;
    oracle.t_max = scenario.config.t_max;
    oracle.dt_fine = dt_fine;
    oracle.t.reserve(n_fine + 1);
    oracle.total_hazard.reserve(n_fine + 1);
    oracle.channel_hit_weight.assign(n_channels, 0.0);
    oracle.mean_post_variance_given_hit = kNaN;

    UniverseState state = scenario.initial_state;
    CrankNicolson propagator(scenario.hamiltonian, dt_fine);

    std::vector<double> hazard(n_channels, 0.0);
    std::vector<double> z_prev(n_channels, 0.0);
    std::vector<double> f_prev(n_channels, 0.0);
    std::vector<double> q_prev(n_channels, 0.0);
    double var_num = 0.0;

    // Node 0: currents from the initial state.
    {
        const std::vector<double> j0 = compute_currents(state, scenario.channels);
        for (int n = 0; n < n_channels; ++n) {
            z_prev[n] = j0[n] / state.s;
            f_prev[n] = z_prev[n]; // exp(-0) = 1
            if (with_variance && z_prev[n] > 0.0) {
                const Component& realized = state.components[state.realized_index()];
                const double v = weighted_density_variance(scenario.channels[n].gamma,
                                                           realized.psi);
                q_prev[n] = std::isnan(v) ? 0.0 : v * f_prev[n];
            }
        }
        oracle.t.push_back(0.0);
        oracle.total_hazard.push_back(0.0);
    }

    double h_tot = 0.0;
    for (long k = 1; k <= n_fine; ++k) {
        Component& realized = state.components[state.realized_index()];
        propagator.step(realized.psi);
        state.t += dt_fine;
        const std::vector<double> currents = compute_currents(state, scenario.channels);
        drain_and_fill(state, scenario.channels, dt_fine);

        double h_tot_new = h_tot;
        std::vector<double> z(n_channels, 0.0);
        for (int n = 0; n < n_channels; ++n) {
            z[n] = currents[n] / state.s;
            const double dh = 0.5 * (z_prev[n] + z[n]) * dt_fine;
            hazard[n] += dh;
            h_tot_new += dh;
        }
        const double decay = std::exp(-h_tot_new);
        for (int n = 0; n < n_channels; ++n) {
            const double f = z[n] * decay;
            oracle.channel_hit_weight[n] += 0.5 * (f_prev[n] + f) * dt_fine;
            if (with_variance) {
                double q = 0.0;
                if (z[n] > 0.0) {
                    const double v = weighted_density_variance(
                        scenario.channels[n].gamma,
                        state.components[state.realized_index()].psi);
                    q = std::isnan(v) ? 0.0 : v * f;
                }
                var_num += 0.5 * (q_prev[n] + q) * dt_fine;
                q_prev[n] = q;
            }
            f_prev[n] = f;
            z_prev[n] = z[n];
        }
        h_tot = h_tot_new;
        oracle.t.push_back(state.t);
        oracle.total_hazard.push_back(h_tot);
    }

    oracle.hit_fraction = 1.0 - std::exp(-h_tot);
    if (with_variance) {
        double weight_sum = 0.0;
        for (double w : oracle.channel_hit_weight) weight_sum += w;
        oracle.mean_post_variance_given_hit = weight_sum > 0.0 ? var_num / weight_sum : kNaN;
    }
    return oracle;
}

double ks_statistic_sorted(const std::vector<double>& sorted_samples, const OracleCdf& oracle,
                           bool conditional) {
    const std::size_t m = sorted_samples.size();
    if (m == 0) return kNaN;
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double g = conditional ? oracle.conditional_cdf(sorted_samples[i])
                                     : oracle.cdf(sorted_samples[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(m);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(m);
        d = std::max(d, std::max(hi - g, g - lo));
    }
    return d;
}

double ks_critical_value(double alpha, std::size_t n_samples) {
    double c = 0.0;
    if (alpha == 0.01) {
        c = 1.62762;
    } else if (alpha == 0.05) {
        c = 1.35810;
    } else {
        c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    }
    const double root = std::sqrt(static_cast<double>(n_samples));
    return c / (root + 0.12 + 0.11 / root);
}

double quantile_sorted(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty()) return kNaN;
    if (p <= 0.0) return sorted_values.front();
    if (p >= 1.0) return sorted_values.back();
    const double rank = p * static_cast<double>(sorted_values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

namespace {

struct TrajOutcome {
    int hit_step = -1;
    int hit_channel = -1;
    bool failed = false;
    std::string error;
};

// Trigger-only replay; must consume randomness exactly like the full paths.
TrajOutcome scan_trajectory(const PrecollapseTable& table, RngStream rng) {
    TrajOutcome out;
    for (int k = 0; k < table.n_steps; ++k) {
        const double u = rng.uniform();
        double cumulative = 0.0;
        for (int n = 0; n < table.n_channels; ++n) {
            cumulative += table.current[k][n] / table.s[k] * table.dt;
            if (u < cumulative) {
                out.hit_step = k;
                out.hit_channel = n;
                return out;
            }
        }
    }
    return out;
}

} // namespace

EnsembleResult run_ensemble(const Scenario& scenario, std::uint64_t n_traj,
                            std::uint64_t base_seed, const EnsembleOptions& opt) {
    if (n_traj < 1) throw ArgumentError("run_ensemble: n_traj must be >= 1");
    const bool tabulated = !opt.use_reference && scenario.config.max_collapses == 1;
    const PrecollapseTable table = sweep_precollapse(scenario);

    std::vector<TrajOutcome> outcomes(n_traj);
    std::vector<TrajectoryRecord> records(
        std::min<std::uint64_t>(opt.keep_records, n_traj));

    const auto run_one = [&](std::uint64_t i) {
        try {
            if (tabulated) {
                outcomes[i] = scan_trajectory(table, RngStream(base_seed, i));
            } else {
                TrajectoryOptions topt;
                topt.debug_checks = opt.debug_checks;
                topt.series_max_rows = opt.series_max_rows;
                TrajectoryRecord rec = run_trajectory(scenario, RngStream(base_seed, i), topt);
                outcomes[i].hit_step =
                    rec.collapsed
                        ? static_cast<int>(std::llround(rec.events.front().t_sc / table.dt)) - 1
                        : -1;
                outcomes[i].hit_channel = rec.collapsed ? rec.events.front().channel_index : -1;
                if (i < records.size()) records[i] = std::move(rec);
            }
        } catch (const Error& e) {
            // Per-trajectory failures are reported in the summary; the
            // aggregation runs over completions.
            outcomes[i].failed = true;
            outcomes[i].error = "stream " + std::to_string(i) + ": " + e.what();
        }
    };

    if (opt.parallel && !opt.reverse_order) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < static_cast<long long>(n_traj); ++i) {
            run_one(static_cast<std::uint64_t>(i));
        }
    } else if (opt.reverse_order) {
        for (std::uint64_t i = n_traj; i-- > 0;) run_one(i);
    } else {
        for (std::uint64_t i = 0; i < n_traj; ++i) run_one(i);
    }

    if (tabulated) {
        TrajectoryOptions topt;
        topt.series_max_rows = opt.series_max_rows;
        for (std::uint64_t i = 0; i < records.size(); ++i) {
            records[i] = run_trajectory_tabulated(scenario, table, RngStream(base_seed, i), topt);
        }
    }

    // Aggregation in stream order: the summary cannot depend on scheduling.
    EnsembleSummary sum;
    sum.scenario = scenario.name();
    sum.base_seed = base_seed;
    sum.n_traj = n_traj;
    sum.channel_hits.assign(scenario.channels.size(), 0);
    sum.t_max = scenario.config.t_max;
    sum.dt = scenario.config.dt;
    sum.grid_x_min = scenario.config.grid_x_min;
    sum.grid_x_max = scenario.config.grid_x_max;
    sum.grid_n_points = static_cast<std::uint64_t>(scenario.config.grid_n_points);

    std::vector<double> t_sc;
    std::vector<double> pre_vars, post_vars, final_vars;
    std::vector<std::uint64_t> hits_by_step(table.n_steps, 0);
    std::vector<double> post_sum_by_step(table.n_steps, 0.0);
    t_sc.reserve(n_traj);
    final_vars.reserve(n_traj);

    const double tail_var =
        table.n_steps > 0 ? table.realized_variance[table.n_steps - 1] : kNaN;
    for (std::uint64_t i = 0; i < n_traj; ++i) {
        const TrajOutcome& o = outcomes[i];
        if (o.failed) {
            ++sum.n_failed;
            if (sum.failures.size() < 8) sum.failures.push_back(o.error);
            continue;
        }
        if (o.hit_step >= 0) {
            ++sum.n_collapsed;
            ++sum.channel_hits[o.hit_channel];
            t_sc.push_back(table.t[o.hit_step]);
            pre_vars.push_back(table.realized_variance[o.hit_step]);
            const double post = table.candidate_variance[o.hit_step][o.hit_channel];
            post_vars.push_back(post);
            final_vars.push_back(post);
            ++hits_by_step[o.hit_step];
            post_sum_by_step[o.hit_step] += post;
        } else {
            final_vars.push_back(tail_var);
        }
    }

    std::sort(t_sc.begin(), t_sc.end());
    sum.t_sc_p05 = quantile_sorted(t_sc, 0.05);
    sum.t_sc_p50 = quantile_sorted(t_sc, 0.50);
    sum.t_sc_p95 = quantile_sorted(t_sc, 0.95);
    sum.mean_pre_variance = mean_of(pre_vars);
    sum.ci95_pre_variance = ci95_of(pre_vars, sum.mean_pre_variance);
    sum.mean_post_variance = mean_of(post_vars);
    sum.ci95_post_variance = ci95_of(post_vars, sum.mean_post_variance);
    sum.mean_final_variance = mean_of(final_vars);

    sum.t_sc_histogram.assign(opt.histogram_bins, 0);
    for (double tv : t_sc) {
        const int bin = std::min(opt.histogram_bins - 1,
                                 static_cast<int>(tv / sum.t_max *
                                                  static_cast<double>(opt.histogram_bins)));
        ++sum.t_sc_histogram[std::max(0, bin)];
    }

    // Mean variance vs t: collapsed trajectories hold their post-collapse
    // value; hazards column carries the shared pre-collapse H_n.
    {
        const std::uint64_t completed = n_traj - sum.n_failed;
        const int stride = series_stride(table.n_steps, opt.mean_series_rows);
        std::uint64_t hits_so_far = 0;
        double post_so_far = 0.0;
        for (int k = 0; k < table.n_steps && completed > 0; ++k) {
            hits_so_far += hits_by_step[k];
            post_so_far += post_sum_by_step[k];
            if (k % stride == 0 || k == table.n_steps - 1) {
                const double alive = static_cast<double>(completed - hits_so_far);
                const double mean_var =
                    (alive * table.realized_variance[k] + post_so_far) /
                    static_cast<double>(completed);
                sum.mean_variance_series.push_back(
                    SeriesRow{table.t[k], mean_var, table.s[k], table.hazard[k]});
            }
        }
    }

    sum.ks_stat = kNaN;
    sum.ks_critical = kNaN;
    sum.oracle_hit_fraction = kNaN;
    sum.oracle_mean_post_variance = kNaN;
    if (opt.with_oracle && !scenario.channels.empty()) {
        const OracleCdf oracle = oracle_first_hit_cdf(scenario, opt.oracle_refine, true);
        sum.oracle_hit_fraction = oracle.hit_fraction;
        sum.oracle_mean_post_variance = oracle.mean_post_variance_given_hit;
        if (!t_sc.empty()) {
            sum.ks_stat = ks_statistic_sorted(t_sc, oracle, /*conditional=*/true);
            sum.ks_critical = ks_critical_value(0.01, t_sc.size());
        }
    }

    return EnsembleResult{std::move(sum), std::move(records)};
}

EnsembleResult run_ensemble_serial(const Scenario& scenario, std::uint64_t n_traj,
                                   std::uint64_t base_seed, EnsembleOptions opt) {
    opt.parallel = false;
    return run_ensemble(scenario, n_traj, base_seed, opt);
}

LocalizationReport localization_report(const EnsembleSummary& ensemble,
                                       const EnsembleSummary& baseline) {
    if (ensemble.grid_n_points != baseline.grid_n_points ||
        ensemble.grid_x_min != baseline.grid_x_min ||
        ensemble.grid_x_max != baseline.grid_x_max) {
        throw ArgumentError("localization_report: ensembles use different grids");
    }
    if (ensemble.t_max != baseline.t_max) {
        throw ArgumentError("localization_report: ensembles use different t_max");
    }

    LocalizationReport rep;
    rep.baseline_variance_tmax = baseline.mean_final_variance;
    rep.collapse_fraction = ensemble.n_traj > 0
                                ? static_cast<double>(ensemble.n_collapsed) /
                                      static_cast<double>(ensemble.n_traj)
                                : 0.0;
    rep.mean_post_collapse_variance =
        ensemble.n_collapsed > 0 ? ensemble.mean_post_variance : kNaN;
    rep.effective_variance = ensemble.n_collapsed > 0 ? ensemble.mean_post_variance
                                                      : ensemble.mean_final_variance;
    rep.reduction_factor = rep.baseline_variance_tmax / rep.effective_variance;
    rep.oracle_prediction = ensemble.oracle_mean_post_variance;
    rep.baseline_series = baseline.mean_variance_series;
    rep.ensemble_series = ensemble.mean_variance_series;
    return rep;
}

std::optional<RaceOutcome> constant_rate_race(const std::vector<double>& rates, double dt,
                                              double t_cap, RngStream& rng) {
    CurrentLedger ledger(rates.size());
    const long n_steps = static_cast<long>(std::llround(t_cap / dt));
    for (long k = 1; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        advance_ledger(ledger, rates, 1.0, t, dt);
        const std::optional<std::size_t> hit = sample_trigger_index(ledger, dt, rng);
        if (hit) return RaceOutcome{t, static_cast<int>(*hit)};
    }
    return std::nullopt;
}

} // namespace qc

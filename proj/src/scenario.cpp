#include "qcollapse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcollapse/engine.hpp"
#include "qcollapse/tolerances.hpp"

namespace qc {

std::string case_name(CaseId id) {
    switch (id) {
        case CaseId::Baseline: return "baseline";
        case CaseId::Case1: return "case1";
        case CaseId::Case2: return "case2";
        case CaseId::Case3: return "case3";
        case CaseId::Scattering: return "scattering";
    }
    return "unknown";
}

CaseId case_from_name(const std::string& name) {
    if (name == "baseline") return CaseId::Baseline;
    if (name == "case1") return CaseId::Case1;
    if (name == "case2") return CaseId::Case2;
    if (name == "case3") return CaseId::Case3;
    if (name == "scattering") return CaseId::Scattering;
    throw ArgumentError("unknown case id '" + name + "'");
}

int ScenarioConfig::n_steps() const {
    return static_cast<int>(std::llround(t_max / dt));
}

namespace {

Grid1D make_grid(const ScenarioConfig& cfg) {
    return Grid1D(cfg.grid_x_min, cfg.grid_x_max, cfg.grid_n_points);
}

Boundary boundary_from(const ScenarioConfig& cfg) {
    if (cfg.boundary == "reflecting") return Boundary::Reflecting;
    if (cfg.boundary == "periodic") return Boundary::Periodic;
    throw ArgumentError("unknown boundary '" + cfg.boundary + "'");
}

Hamiltonian1D make_hamiltonian(const ScenarioConfig& cfg, const Grid1D& grid) {
    if (cfg.potential == "free") {
        return free_hamiltonian(grid, cfg.object_mass, boundary_from(cfg));
    }
    if (cfg.potential == "harmonic") {
        return harmonic_hamiltonian(grid, cfg.potential_omega, cfg.object_center,
                                    cfg.object_mass, boundary_from(cfg));
    }
    throw ArgumentError("unknown potential '" + cfg.potential + "'");
}

void validate_common(const ScenarioConfig& cfg) {
    if (!(cfg.object_sigma > 0.0)) throw ArgumentError("object.sigma must be > 0");
    if (!(cfg.dt > 0.0)) throw ArgumentError("dt must be > 0");
    if (!(cfg.t_max > 0.0)) throw ArgumentError("t_max must be > 0");
    if (!(cfg.rate_scale >= 0.0)) throw ArgumentError("rate_scale must be >= 0");
    if (cfg.max_collapses < 0) throw ArgumentError("max_collapses must be >= 0");
}

// Realized object packet as component 0.
UniverseState make_object_state(const ScenarioConfig& cfg, const Grid1D& grid) {
    UniverseState state;
    Component object;
    object.id = ComponentId{0};
    object.kind = ComponentKind::Realized;
    object.labels["role"] = "object";
    object.psi = gaussian_packet(grid, cfg.object_center, cfg.object_sigma,
                                 cfg.object_momentum);
    state.components.push_back(std::move(object));
    state.t = 0.0;
    state.s = total_square_modulus(state);
    return state;
}

// Adds a zero-amplitude component and marks it ready. Returns its id.
ComponentId add_ready(UniverseState& state, const Grid1D& grid,
                      std::map<std::string, std::string> labels) {
    Component c;
    c.id = ComponentId{static_cast<std::uint32_t>(state.components.size())};
    c.kind = ComponentKind::Realized; // provisional until mark_ready
    c.labels = std::move(labels);
    c.psi = GridWavefunction(grid);
    const ComponentId id = c.id;
    state.components.push_back(std::move(c));
    mark_ready(state, id);
    return id;
}

// gamma = rate on [lo, hi] (closed, tiny relative slack at the edges), else 0.
std::vector<double> window_gamma(const Grid1D& grid, double lo, double hi, double rate) {
    std::vector<double> g(grid.n_points, 0.0);
    const double slack = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        if (x >= lo - slack && x <= hi + slack) g[j] = rate;
    }
    return g;
}

void validate_windows(const std::vector<Interval>& windows) {
    if (windows.empty()) throw ArgumentError("need at least one crystal window");
    for (const Interval& w : windows) {
        if (!(w.hi > w.lo)) {
            throw ArgumentError("crystal window [" + std::to_string(w.lo) + ", " +
                                std::to_string(w.hi) + "] is empty");
        }
    }
    std::vector<Interval> sorted = windows;
    std::sort(sorted.begin(), sorted.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].lo < sorted[i - 1].hi - 1e-12) {
            throw ArgumentError("crystal windows overlap near x = " +
                                std::to_string(sorted[i].lo) + "; crystals are distinct");
        }
    }
}

BatchPartition make_partition(double lo, double hi, int n,
                              const std::vector<double>& explicit_boundaries) {
    if (!explicit_boundaries.empty()) return partition_batches(explicit_boundaries);
    return partition_batches(lo, hi, n);
}

} // namespace

Scenario build_baseline(const ScenarioConfig& cfg) {
    validate_common(cfg);
    Scenario s;
    s.config = cfg;
    s.config.case_id = CaseId::Baseline;
    s.grid = make_grid(cfg);
    s.hamiltonian = make_hamiltonian(cfg, s.grid);
    s.initial_state = make_object_state(cfg, s.grid);
    check_state_invariants(s.initial_state);
    return s;
}

Scenario build_case1(const ScenarioConfig& cfg) {
    validate_common(cfg);
    validate_windows(cfg.windows);
    if (!(cfg.window_rate >= 0.0)) throw ArgumentError("case1.rate must be >= 0");

    Scenario s;
    s.config = cfg;
    s.grid = make_grid(cfg);
    s.hamiltonian = make_hamiltonian(cfg, s.grid);
    s.initial_state = make_object_state(cfg, s.grid);

    const double rate = cfg.window_rate * cfg.rate_scale;
    for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
        const Interval& w = cfg.windows[i];
        const std::string crystal = std::to_string(i + 1);
        const ComponentId target =
            add_ready(s.initial_state, s.grid, {{"crystal", crystal}});
        s.channels.emplace_back(target, s.grid, window_gamma(s.grid, w.lo, w.hi, rate),
                                "crystal_" + crystal);
        s.channel_intervals.push_back(w);
    }
    check_state_invariants(s.initial_state);
    check_step_guard(s);
    return s;
}

Scenario build_case2(const ScenarioConfig& cfg) {
    validate_common(cfg);
    validate_windows(cfg.windows);
    if (!(cfg.window_rate >= 0.0)) throw ArgumentError("case2.rate must be >= 0");
    if (std::abs(cfg.branch_weight_a + cfg.branch_weight_b - 1.0) > 1e-9) {
        throw ArgumentError("case2 branch weights must sum to 1 (|alpha|^2 + |beta|^2)");
    }
    if (!(cfg.branch_weight_a >= 0.0) || !(cfg.branch_weight_b >= 0.0)) {
        throw ArgumentError("case2 branch weights must be >= 0");
    }

    Scenario s;
    s.config = cfg;
    s.grid = make_grid(cfg);
    s.hamiltonian = make_hamiltonian(cfg, s.grid);
    s.initial_state = make_object_state(cfg, s.grid);

    const double rate = cfg.window_rate * cfg.rate_scale;
    const struct {
        const char* name;
        double offset;
        double weight;
    } branches[2] = {{"A", cfg.branch_offset_a, cfg.branch_weight_a},
                     {"B", cfg.branch_offset_b, cfg.branch_weight_b}};

    for (const auto& br : branches) {
        for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
            const Interval w{cfg.windows[i].lo + br.offset, cfg.windows[i].hi + br.offset};
            const std::string crystal = std::to_string(i + 1);
            const ComponentId target = add_ready(
                s.initial_state, s.grid, {{"branch", br.name}, {"crystal", crystal}});
            s.channels.emplace_back(target, s.grid,
                                    window_gamma(s.grid, w.lo, w.hi, rate * br.weight),
                                    std::string("branch_") + br.name + "_crystal_" + crystal);
            s.channel_intervals.push_back(w);
        }
    }
    check_state_invariants(s.initial_state);
    check_step_guard(s);
    return s;
}

Scenario build_case3(const ScenarioConfig& cfg) {
    validate_common(cfg);
    if (!(cfg.kernel_g >= 0.0)) throw ArgumentError("case3.kernel_g must be >= 0");
    if (!(cfg.kernel_lambda > 0.0)) throw ArgumentError("case3.kernel_lambda must be > 0");

    Scenario s;
    s.config = cfg;
    s.grid = make_grid(cfg);
    s.hamiltonian = make_hamiltonian(cfg, s.grid);
    s.initial_state = make_object_state(cfg, s.grid);

    const BatchPartition partition = make_partition(
        cfg.detector_extent_min, cfg.detector_extent_max, cfg.detector_n_batches,
        cfg.detector_boundaries);

    std::vector<ComponentId> targets;
    for (int a = 0; a < partition.n_batches(); ++a) {
        targets.push_back(add_ready(s.initial_state, s.grid,
                                    {{"batch", std::to_string(a + 1)}}));
    }

    DetectorDensity density;
    if (cfg.detector_density == "uniform") {
        density = [](double) { return 1.0; };
    } else if (cfg.detector_density == "gaussian") {
        const double c = cfg.detector_center;
        const double sd = cfg.detector_sigma;
        if (!(sd > 0.0)) throw ArgumentError("case3.detector_sigma must be > 0");
        density = [c, sd](double u) {
            const double d = (u - c) / sd;
            return std::exp(-0.5 * d * d);
        };
    } else {
        throw ArgumentError("unknown detector density '" + cfg.detector_density + "'");
    }

    BatchChannelSet set = build_batch_channels(
        partition, gaussian_capture_kernel(cfg.kernel_g * cfg.rate_scale, cfg.kernel_lambda),
        density, s.grid, targets, cfg.quadrature_panels);
    s.channels = std::move(set.channels);
    for (int a = 0; a < partition.n_batches(); ++a) {
        s.channel_intervals.push_back({partition.lo(a), partition.hi(a)});
    }
    check_state_invariants(s.initial_state);
    check_step_guard(s);
    return s;
}

Scenario build_scattering(const ScenarioConfig& cfg) {
    validate_common(cfg);
    if (!(cfg.emit_rate >= 0.0)) throw ArgumentError("scattering.emit_rate must be >= 0");

    Scenario s;
    s.config = cfg;
    s.grid = make_grid(cfg);
    s.hamiltonian = make_hamiltonian(cfg, s.grid);
    s.initial_state = make_object_state(cfg, s.grid);
    s.initial_state.components[0].labels["role"] = "atom";

    const BatchPartition partition = make_partition(
        cfg.atom_extent_min, cfg.atom_extent_max, cfg.atom_n_batches, cfg.atom_boundaries);
    const double rate = cfg.emit_rate * cfg.rate_scale;

    for (int a = 0; a < partition.n_batches(); ++a) {
        const std::string batch = std::to_string(a + 1);
        const ComponentId target = add_ready(
            s.initial_state, s.grid, {{"batch", batch}, {"photon", batch}});
        // Uniform emission rate over the atom's support, restricted to the
        // batch interval; grid points belong to exactly one batch.
        std::vector<double> gamma(s.grid.n_points, 0.0);
        for (int j = 0; j < s.grid.n_points; ++j) {
            const double x = s.grid.x(j);
            const bool in_batch = (a + 1 == partition.n_batches())
                                      ? (x >= partition.lo(a) && x <= partition.hi(a))
                                      : (x >= partition.lo(a) && x < partition.hi(a));
            if (in_batch) gamma[j] = rate;
        }
        s.channels.emplace_back(target, s.grid, std::move(gamma), "atom_batch_" + batch);
        s.channel_intervals.push_back({partition.lo(a), partition.hi(a)});
    }
    check_state_invariants(s.initial_state);
    check_step_guard(s);
    return s;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    switch (cfg.case_id) {
        case CaseId::Baseline: return build_baseline(cfg);
        case CaseId::Case1: return build_case1(cfg);
        case CaseId::Case2: return build_case2(cfg);
        case CaseId::Case3: return build_case3(cfg);
        case CaseId::Scattering: return build_scattering(cfg);
    }
    throw ArgumentError("build_scenario: unknown case id");
}

void check_step_guard(const Scenario& scenario) {
    double gamma_max = 0.0;
    for (int j = 0; j < scenario.grid.n_points; ++j) {
        double tot = 0.0;
        for (const CaptureChannel& ch : scenario.channels) tot += ch.gamma[j];
        gamma_max = std::max(gamma_max, tot);
    }
    const double worst = scenario.config.dt * gamma_max;
    if (worst > tol::kStepHazardGuard) {
        throw StepTooLarge("dt violates the guard 'total hazard per step <= " +
                           std::to_string(tol::kStepHazardGuard) + "': dt * max gamma_tot = " +
                           std::to_string(worst) + "; reduce dt below " +
                           std::to_string(tol::kStepHazardGuard / gamma_max));
    }
}

ScenarioConfig default_config(CaseId id) {
    ScenarioConfig cfg;
    cfg.case_id = id;
    return cfg;
}

} // namespace qc

// Command-line front end: ensemble runs, parameter sweeps, localization
// reports and a quick self-test of the statistical oracles.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "qcollapse/analysis.hpp"
#include "qcollapse/config.hpp"
#include "qcollapse/output.hpp"

namespace fs = std::filesystem;
using namespace qc;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitSelftest = 4;

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError({{s, "--set expects key=value"}});
        }
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

struct RunFlags {
    std::string config_path;
    std::uint64_t n_traj = 20000;
    std::uint64_t seed = 42;
    std::string out_dir;
    int series = 10;
    int threads = 0;
    bool reference = false;
    bool no_oracle = false;
    bool debug_checks = false;
    std::vector<std::string> sets;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_path, "scenario config file")->required();
    cmd->add_option("--traj", f.n_traj, "trajectory count");
    cmd->add_option("--seed", f.seed, "base seed; trajectory i uses stream i");
    cmd->add_option("--out", f.out_dir, "results directory (default <root>/<scenario>)");
    cmd->add_option("--series", f.series, "write per-trajectory series for streams 0..N-1");
    cmd->add_option("--threads", f.threads, "OpenMP thread count (0 = library default)");
    cmd->add_flag("--reference", f.reference, "run the full per-step engine per trajectory");
    cmd->add_flag("--no-oracle", f.no_oracle, "skip the fine-step quadrature oracle");
    cmd->add_flag("--debug-checks", f.debug_checks,
                  "verify state invariants and the freeze law every step (reference path)");
    cmd->add_option("--set", f.sets, "override a config key, key=value (repeatable)");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int do_run(const RunFlags& f, bool force_baseline) {
    ScenarioConfig cfg = parse_config(f.config_path, parse_overrides(f.sets));
    if (force_baseline) cfg.case_id = CaseId::Baseline;
    const Scenario scenario = build_scenario(cfg);

    apply_threads(f.threads);
    EnsembleOptions opt;
    opt.use_reference = f.reference;
    opt.debug_checks = f.debug_checks;
    opt.keep_records = f.series;
    opt.with_oracle = !f.no_oracle && !scenario.channels.empty();

    const EnsembleResult result = run_ensemble(scenario, f.n_traj, f.seed, opt);

    const fs::path dir = f.out_dir.empty()
                             ? fs::path(results_root()) / scenario.name()
                             : fs::path(f.out_dir);
    fs::create_directories(dir / "series");

    RunManifest manifest;
    manifest.command = force_baseline ? "baseline" : "run";
    manifest.scenario = scenario.name();
    manifest.config_hash = config_hash(cfg);
    manifest.config_canonical = canonical_config(cfg);
    manifest.seed = f.seed;
    manifest.n_traj = f.n_traj;
    manifest.created_utc = utc_timestamp_now();

    write_summary_jsonl((dir / "summary.jsonl").string(), {result.summary});
    manifest.outputs.push_back("summary.jsonl");
    write_series_csv((dir / "mean_series.csv").string(),
                     result.summary.mean_variance_series, scenario.channels.size());
    manifest.outputs.push_back("mean_series.csv");
    for (const TrajectoryRecord& rec : result.records) {
        const std::string name = "series/" + std::to_string(rec.stream) + ".csv";
        write_series_csv((dir / name).string(), rec.series, scenario.channels.size());
        manifest.outputs.push_back(name);
    }
    write_manifest((dir / "manifest").string(), manifest);

    const EnsembleSummary& s = result.summary;
    std::cout << s.scenario << ": " << s.n_collapsed << "/" << s.n_traj << " collapsed";
    if (s.n_collapsed > 0) {
        std::cout << ", median t_sc " << s.t_sc_p50 << ", mean post variance "
                  << s.mean_post_variance;
    }
    std::cout << ", mean final variance " << s.mean_final_variance << "\n"
              << "results in " << dir.string() << "\n";
    return 0;
}

int do_sweep(const RunFlags& f, const std::string& param, const std::string& values_csv) {
    std::vector<std::string> values;
    std::string item;
    std::stringstream ss(values_csv);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
    }
    if (values.empty()) {
        throw ConfigError({{param, "sweep needs at least one value"}});
    }

    const fs::path root = f.out_dir.empty() ? fs::path(results_root()) / "sweep"
                                            : fs::path(f.out_dir);
    fs::create_directories(root);
    std::vector<EnsembleSummary> summaries;
    for (const std::string& v : values) {
        RunFlags one = f;
        one.sets.push_back(param + "=" + v);
        one.out_dir = (root / (param + "=" + v)).string();
        const int rc = do_run(one, false);
        if (rc != 0) return rc;
        const auto written = read_summary_jsonl((fs::path(one.out_dir) / "summary.jsonl").string());
        summaries.push_back(written.front());
    }
    write_summary_jsonl((root / "summary.jsonl").string(), summaries);
    std::cout << "sweep over " << param << " done, " << values.size()
              << " runs under " << root.string() << "\n";
    return 0;
}

std::vector<SeriesRow> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open series file '" + path + "'");
    std::vector<SeriesRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        SeriesRow r;
        std::stringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            if (col == 0) r.t = v;
            else if (col == 1) r.variance = v;
            else if (col == 2) r.s = v;
            else r.hazard.push_back(v);
            ++col;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

int do_report(const std::string& ensemble_dir, const std::string& baseline_dir,
              const std::string& out_file) {
    auto load = [](const std::string& dir) {
        auto summaries = read_summary_jsonl((fs::path(dir) / "summary.jsonl").string());
        if (summaries.empty()) throw Error("no summary lines in " + dir);
        EnsembleSummary s = summaries.front();
        s.mean_variance_series = read_series_csv((fs::path(dir) / "mean_series.csv").string());
        return s;
    };
    const EnsembleSummary ensemble = load(ensemble_dir);
    const EnsembleSummary baseline = load(baseline_dir);
    const LocalizationReport rep = localization_report(ensemble, baseline);

    std::printf("scenario                     %s vs %s\n", ensemble.scenario.c_str(),
                baseline.scenario.c_str());
    std::printf("baseline variance at t_max   %.6g\n", rep.baseline_variance_tmax);
    std::printf("mean post-collapse variance  %.6g\n", rep.mean_post_collapse_variance);
    std::printf("collapse fraction            %.4f\n", rep.collapse_fraction);
    std::printf("oracle prediction            %.6g\n", rep.oracle_prediction);
    std::printf("reduction factor             %.6g\n", rep.reduction_factor);

    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        out << "{\"baseline_variance_tmax\":" << format_g17(rep.baseline_variance_tmax)
            << ",\"mean_post_collapse_variance\":"
            << (std::isnan(rep.mean_post_collapse_variance)
                    ? "null"
                    : format_g17(rep.mean_post_collapse_variance))
            << ",\"effective_variance\":" << format_g17(rep.effective_variance)
            << ",\"reduction_factor\":" << format_g17(rep.reduction_factor)
            << ",\"collapse_fraction\":" << format_g17(rep.collapse_fraction)
            << ",\"oracle_prediction\":"
            << (std::isnan(rep.oracle_prediction) ? "null" : format_g17(rep.oracle_prediction))
            << "}\n";
        std::cout << "report written to " << out_file << "\n";
    }
    return 0;
}

bool check(bool ok, const std::string& what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    return ok;
}

// Fast oracle checks; exits nonzero on any failure.
int do_selftest() {
    bool all = true;

    { // free spreading vs the closed form
        ScenarioConfig cfg = default_config(CaseId::Baseline);
        cfg.t_max = 2.0;
        const Scenario scn = build_baseline(cfg);
        const PrecollapseTable table = sweep_precollapse(scn);
        const double got = table.realized_variance.back();
        const double want = 1.0 + (2.0 / 2.0) * (2.0 / 2.0);
        all &= check(std::abs(got - want) / want < 0.01,
                     "free Gaussian variance at t=2 within 1% of analytic value");
    }

    { // unitarity over a long run
        ScenarioConfig cfg = default_config(CaseId::Baseline);
        cfg.t_max = 2.0;
        const Scenario scn = build_baseline(cfg);
        const PrecollapseTable table = sweep_precollapse(scn);
        double worst = 0.0;
        for (double sv : table.s) worst = std::max(worst, std::abs(sv - 1.0));
        all &= check(worst < 1e-10, "norm conserved to 1e-10 over 200 unitary steps");
    }

    { // trigger race: two-channel fractions
        const std::vector<double> rates{2.0, 1.0};
        std::uint64_t hits1 = 0, total = 0;
        for (std::uint64_t i = 0; i < 20000; ++i) {
            RngStream rng(7, i);
            const auto hit = constant_rate_race(rates, 0.005, 10.0, rng);
            if (hit) {
                ++total;
                if (hit->channel == 0) ++hits1;
            }
        }
        const double frac = static_cast<double>(hits1) / static_cast<double>(total);
        const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / static_cast<double>(total));
        all &= check(std::abs(frac - 2.0 / 3.0) < 3.0 * sigma,
                     "two-channel hit fraction within 3 sigma of r1/(r1+r2)");
    }

    { // trigger race: analytic exponential first-hit law (dt keeps the
      // per-step probability atom below the KS resolution)
        const double r = 1.0;
        const double dt = 0.002;
        const double cap = 20.0;
        std::vector<double> times;
        for (std::uint64_t i = 0; i < 20000; ++i) {
            RngStream rng(7, i);
            const auto hit = constant_rate_race({r}, dt, cap, rng);
            if (hit) times.push_back(hit->t);
        }
        std::sort(times.begin(), times.end());
        double d = 0.0;
        const double m = static_cast<double>(times.size());
        const double f_cap = 1.0 - std::exp(-r * cap);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double g = (1.0 - std::exp(-r * times[i])) / f_cap;
            d = std::max(d, std::max((i + 1) / m - g, g - i / m));
        }
        all &= check(d < ks_critical_value(0.01, times.size()),
                     "first-hit times pass KS vs 1-exp(-rt) at the 1% level");
    }

    { // partition refinement leaves the total CDF unchanged
        ScenarioConfig cfg = default_config(CaseId::Case3);
        cfg.t_max = 2.0;
        std::vector<double> f1, f3;
        for (int n : {1, 3}) {
            cfg.detector_n_batches = n;
            const Scenario scn = build_case3(cfg);
            const OracleCdf oracle = oracle_first_hit_cdf(scn, 10);
            (n == 1 ? f1 : f3) = oracle.total_hazard;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            worst = std::max(worst, std::abs(f1[i] - f3[i]));
        }
        all &= check(worst < 1e-9, "total hazard invariant under batch refinement (1 vs 3)");
    }

    { // deterministic replay
        ScenarioConfig cfg = default_config(CaseId::Case3);
        cfg.t_max = 2.0;
        const Scenario scn = build_case3(cfg);
        const TrajectoryRecord a = run_trajectory(scn, RngStream(11, 5));
        const TrajectoryRecord b = run_trajectory(scn, RngStream(11, 5));
        const bool same = a.collapsed == b.collapsed && a.t_end == b.t_end &&
                          a.final_variance == b.final_variance;
        all &= check(same, "same (seed, stream) replays the same trajectory");
    }

    std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
    return all ? 0 : kExitSelftest;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic-reduction trajectory engine"};
    app.require_subcommand(1);

    RunFlags run_flags, base_flags, sweep_flags;
    std::string sweep_param, sweep_values;
    std::string rep_ensemble, rep_baseline, rep_out;

    CLI::App* cmd_run = app.add_subcommand("run", "run an ensemble from a config");
    add_run_flags(cmd_run, run_flags);
    CLI::App* cmd_base = app.add_subcommand("baseline", "run the no-channel baseline of a config");
    add_run_flags(cmd_base, base_flags);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "vary one config key over a list");
    add_run_flags(cmd_sweep, sweep_flags);
    cmd_sweep->add_option("--param", sweep_param, "config key to vary")->required();
    cmd_sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    CLI::App* cmd_report = app.add_subcommand("report", "localization report from two runs");
    cmd_report->add_option("--ensemble", rep_ensemble, "collapsing run directory")->required();
    cmd_report->add_option("--baseline", rep_baseline, "baseline run directory")->required();
    cmd_report->add_option("--out", rep_out, "write report JSON here");
    app.add_subcommand("selftest", "run the oracle suites");
    CLI::App* cmd_schema = app.add_subcommand("schema", "print the config schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_run->parsed()) return do_run(run_flags, false);
        if (cmd_base->parsed()) return do_run(base_flags, true);
        if (cmd_sweep->parsed()) return do_sweep(sweep_flags, sweep_param, sweep_values);
        if (cmd_report->parsed()) return do_report(rep_ensemble, rep_baseline, rep_out);
        if (cmd_schema->parsed()) {
            std::cout << config_schema_help();
            return 0;
        }
        return do_selftest();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

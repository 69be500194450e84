// Compares the serial reference engine against the table-driven runner
// (serial and OpenMP) on the same ensemble and verifies that all three
// produce identical summaries.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qcollapse/analysis.hpp"
#include "qcollapse/output.hpp"

using namespace qc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t n_traj = 1000;
    if (argc > 1) n_traj = std::stoull(argv[1]);

    ScenarioConfig cfg = default_config(CaseId::Case3);
    cfg.t_max = 5.0;
    const Scenario scn = build_case3(cfg);
    const std::uint64_t seed = 4242;

    EnsembleOptions reference;
    reference.use_reference = true;
    reference.parallel = false;
    reference.with_oracle = false;

    EnsembleOptions table_serial;
    table_serial.parallel = false;
    table_serial.with_oracle = false;

    EnsembleOptions table_parallel;
    table_parallel.with_oracle = false;

    std::printf("scenario %s, %llu trajectories, %d steps each\n", scn.name().c_str(),
                static_cast<unsigned long long>(n_traj), scn.config.n_steps());
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#endif

    auto t0 = std::chrono::steady_clock::now();
    const EnsembleSummary ref = run_ensemble(scn, n_traj, seed, reference).summary;
    const double t_ref = seconds_since(t0);
    std::printf("reference engine (serial):   %8.3f s  (%.1f traj/s)\n", t_ref,
                n_traj / t_ref);

    t0 = std::chrono::steady_clock::now();
    const EnsembleSummary ser = run_ensemble(scn, n_traj, seed, table_serial).summary;
    const double t_ser = seconds_since(t0);
    std::printf("table runner (serial):       %8.3f s  (%.1f traj/s)\n", t_ser,
                n_traj / t_ser);

    t0 = std::chrono::steady_clock::now();
    const EnsembleSummary par = run_ensemble(scn, n_traj, seed, table_parallel).summary;
    const double t_par = seconds_since(t0);
    std::printf("table runner (OpenMP):       %8.3f s  (%.1f traj/s)\n", t_par,
                n_traj / t_par);

    std::printf("speedup vs reference:        %.1fx serial table, %.1fx parallel table\n",
                t_ref / t_ser, t_ref / t_par);

    const std::string sref = summary_to_jsonl_line(ref);
    const std::string sser = summary_to_jsonl_line(ser);
    const std::string spar = summary_to_jsonl_line(par);
    if (sref != sser || sser != spar) {
        std::printf("ERROR: summaries differ between paths\n");
        return 1;
    }
    std::printf("summaries identical across all three paths\n");
    return 0;
}

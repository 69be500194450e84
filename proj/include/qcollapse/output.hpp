#pragma once

#include <string>
#include <vector>

#include "qcollapse/analysis.hpp"

namespace qc {

inline constexpr const char* kEngineVersion = "0.1.0";

// All floats in summary/series files use 17 significant digits so a re-read
// reproduces the exact doubles.
std::string format_g17(double v);

// One JSON object per line, fixed field order: scenario, n_traj,
// channel_hits, t_sc quantiles, mean pre/post variance, KS stats, then the
// remaining fields. NaN serializes as null.
std::string summary_to_jsonl_line(const EnsembleSummary& s);
void write_summary_jsonl(const std::string& path, const std::vector<EnsembleSummary>& summaries);
std::vector<EnsembleSummary> read_summary_jsonl(const std::string& path);

// CSV with header t,variance,s,H_1..H_n.
void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows,
                      std::size_t n_channels);

struct RunManifest {
    std::string engine_version = kEngineVersion;
    std::string command;
    std::string scenario;
    std::string config_hash;
    std::string config_canonical;
    std::uint64_t seed = 0;
    std::uint64_t n_traj = 0;
    std::string created_utc;
    std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
std::string utc_timestamp_now();

// Results root: QCOLLAPSE_RESULTS_ROOT or "out".
std::string results_root();

} // namespace qc

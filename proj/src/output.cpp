#include "qcollapse/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include <json.hpp>

namespace qc {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// JSON number or null for NaN.
std::string num(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    return format_g17(v);
}

std::string uints(const std::vector<std::uint64_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

double json_num(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nan("");
    return j[key].get<double>();
}

} // namespace

std::string summary_to_jsonl_line(const EnsembleSummary& s) {
    // std::to_string and snprintf "%.17g" are locale-independent here, so the
    // bytes never depend on a globally imbued locale.
    std::string o = "{\"scenario\":\"" + s.scenario + "\"";
    o += ",\"n_traj\":" + std::to_string(s.n_traj);
    o += ",\"channel_hits\":" + uints(s.channel_hits);
    o += ",\"t_sc_p05\":" + num(s.t_sc_p05);
    o += ",\"t_sc_p50\":" + num(s.t_sc_p50);
    o += ",\"t_sc_p95\":" + num(s.t_sc_p95);
    o += ",\"mean_pre_variance\":" + num(s.mean_pre_variance);
    o += ",\"mean_post_variance\":" + num(s.mean_post_variance);
    o += ",\"ks_stat\":" + num(s.ks_stat);
    o += ",\"ks_critical\":" + num(s.ks_critical);
    o += ",\"n_collapsed\":" + std::to_string(s.n_collapsed);
    o += ",\"n_failed\":" + std::to_string(s.n_failed);
    o += ",\"base_seed\":" + std::to_string(s.base_seed);
    o += ",\"ci95_pre_variance\":" + num(s.ci95_pre_variance);
    o += ",\"ci95_post_variance\":" + num(s.ci95_post_variance);
    o += ",\"mean_final_variance\":" + num(s.mean_final_variance);
    o += ",\"oracle_hit_fraction\":" + num(s.oracle_hit_fraction);
    o += ",\"oracle_mean_post_variance\":" + num(s.oracle_mean_post_variance);
    o += ",\"t_max\":" + num(s.t_max);
    o += ",\"dt\":" + num(s.dt);
    o += ",\"grid_x_min\":" + num(s.grid_x_min);
    o += ",\"grid_x_max\":" + num(s.grid_x_max);
    o += ",\"grid_n_points\":" + std::to_string(s.grid_n_points);
    o += ",\"t_sc_histogram\":" + uints(s.t_sc_histogram);
    o += "}";
    return o;
}

void write_summary_jsonl(const std::string& path,
                         const std::vector<EnsembleSummary>& summaries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    for (const EnsembleSummary& s : summaries) {
        out << summary_to_jsonl_line(s) << "\n";
    }
}

std::vector<EnsembleSummary> read_summary_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open summary file '" + path + "'");
    std::vector<EnsembleSummary> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        EnsembleSummary s;
        s.scenario = j["scenario"].get<std::string>();
        s.n_traj = j["n_traj"].get<std::uint64_t>();
        s.channel_hits = j["channel_hits"].get<std::vector<std::uint64_t>>();
        s.t_sc_p05 = json_num(j, "t_sc_p05");
        s.t_sc_p50 = json_num(j, "t_sc_p50");
        s.t_sc_p95 = json_num(j, "t_sc_p95");
        s.mean_pre_variance = json_num(j, "mean_pre_variance");
        s.mean_post_variance = json_num(j, "mean_post_variance");
        s.ks_stat = json_num(j, "ks_stat");
        s.ks_critical = json_num(j, "ks_critical");
        s.n_collapsed = j["n_collapsed"].get<std::uint64_t>();
        s.n_failed = j.value("n_failed", std::uint64_t{0});
        s.base_seed = j["base_seed"].get<std::uint64_t>();
        s.ci95_pre_variance = json_num(j, "ci95_pre_variance");
        s.ci95_post_variance = json_num(j, "ci95_post_variance");
        s.mean_final_variance = json_num(j, "mean_final_variance");
        s.oracle_hit_fraction = json_num(j, "oracle_hit_fraction");
        s.oracle_mean_post_variance = json_num(j, "oracle_mean_post_variance");
        s.t_max = json_num(j, "t_max");
        s.dt = json_num(j, "dt");
        s.grid_x_min = json_num(j, "grid_x_min");
        s.grid_x_max = json_num(j, "grid_x_max");
        s.grid_n_points = j["grid_n_points"].get<std::uint64_t>();
        s.t_sc_histogram = j["t_sc_histogram"].get<std::vector<std::uint64_t>>();
        out.push_back(std::move(s));
    }
    return out;
}

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows,
                      std::size_t n_channels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "t,variance,s";
    for (std::size_t n = 1; n <= n_channels; ++n) out << ",H_" << n;
    out << "\n";
    for (const SeriesRow& r : rows) {
        out << format_g17(r.t) << "," << format_g17(r.variance) << "," << format_g17(r.s);
        for (std::size_t n = 0; n < n_channels; ++n) {
            out << "," << format_g17(n < r.hazard.size() ? r.hazard[n] : 0.0);
        }
        out << "\n";
    }
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["engine_version"] = m.engine_version;
    j["command"] = m.command;
    j["scenario"] = m.scenario;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["n_traj"] = m.n_traj;
    j["created_utc"] = m.created_utc;
    j["outputs"] = m.outputs;
    j["config"] = m.config_canonical;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string results_root() {
    const char* env = std::getenv("QCOLLAPSE_RESULTS_ROOT");
    return env != nullptr && env[0] != '\0' ? env : "out";
}

} // namespace qc

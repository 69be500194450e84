#include "qcollapse/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, int& out) {
    try {
        std::size_t pos = 0;
        out = std::stoi(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) parts.push_back(t);
    }
    return parts;
}

enum class Applies { All, Case1, Case12, Case2, Case3, Scattering };

bool applies_to(Applies a, CaseId c) {
    switch (a) {
        case Applies::All: return true;
        case Applies::Case1: return c == CaseId::Case1;
        case Applies::Case12: return c == CaseId::Case1 || c == CaseId::Case2;
        case Applies::Case2: return c == CaseId::Case2;
        case Applies::Case3: return c == CaseId::Case3;
        case Applies::Scattering: return c == CaseId::Scattering;
    }
    return false;
}

struct KeySpec {
    const char* key;
    const char* type;
    Applies applies;
    const char* descr;
    // Returns an error message, empty on success.
    std::function<std::string(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> render;
};

std::string set_double(double& field, const std::string& v) {
    double d = 0.0;
    if (!parse_double(v, d)) return "not a number: '" + v + "'";
    field = d;
    return {};
}

std::string set_int(int& field, const std::string& v) {
    int i = 0;
    if (!parse_int(v, i)) return "not an integer: '" + v + "'";
    field = i;
    return {};
}

std::string set_windows(std::vector<Interval>& field, const std::string& v) {
    std::vector<Interval> out;
    for (const std::string& part : split_list(v)) {
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) {
            return "window '" + part + "' must be lo:hi";
        }
        Interval w;
        if (!parse_double(trim(part.substr(0, colon)), w.lo) ||
            !parse_double(trim(part.substr(colon + 1)), w.hi)) {
            return "window '" + part + "' must be numeric lo:hi";
        }
        out.push_back(w);
    }
    if (out.empty()) return "empty window list";
    field = std::move(out);
    return {};
}

std::string set_double_list(std::vector<double>& field, const std::string& v) {
    std::vector<double> out;
    for (const std::string& part : split_list(v)) {
        double d = 0.0;
        if (!parse_double(part, d)) return "not a number: '" + part + "'";
        out.push_back(d);
    }
    field = std::move(out);
    return {};
}

std::string render_windows(const std::vector<Interval>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0) s += ", ";
        s += g17(w[i].lo) + ":" + g17(w[i].hi);
    }
    return s;
}

std::string render_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ", ";
        s += g17(v[i]);
    }
    return s;
}

#define DOUBLE_KEY(name, field, applies, descr)                                     \
    KeySpec{name, "float", applies, descr,                                          \
            [](ScenarioConfig& c, const std::string& v) { return set_double(c.field, v); }, \
            [](const ScenarioConfig& c) { return g17(c.field); }}

#define INT_KEY(name, field, applies, descr)                                        \
    KeySpec{name, "int", applies, descr,                                            \
            [](ScenarioConfig& c, const std::string& v) { return set_int(c.field, v); },    \
            [](const ScenarioConfig& c) { return std::to_string(c.field); }}

#define STRING_KEY(name, field, applies, descr)                                     \
    KeySpec{name, "string", applies, descr,                                         \
            [](ScenarioConfig& c, const std::string& v) {                           \
                c.field = v;                                                        \
                return std::string{};                                               \
            },                                                                      \
            [](const ScenarioConfig& c) { return c.field; }}

const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> table = {
        KeySpec{"case", "string", Applies::All,
                "scenario id: baseline | case1 | case2 | case3 | scattering",
                [](ScenarioConfig& c, const std::string& v) {
                    try {
                        c.case_id = case_from_name(v);
                    } catch (const ArgumentError& e) {
                        return std::string(e.what());
                    }
                    return std::string{};
                },
                [](const ScenarioConfig& c) { return case_name(c.case_id); }},
        DOUBLE_KEY("grid.x_min", grid_x_min, Applies::All, "left grid edge"),
        DOUBLE_KEY("grid.x_max", grid_x_max, Applies::All, "right grid edge"),
        INT_KEY("grid.n_points", grid_n_points, Applies::All, "grid points (>= 8)"),
        DOUBLE_KEY("object.center", object_center, Applies::All, "initial packet center"),
        DOUBLE_KEY("object.sigma", object_sigma, Applies::All, "initial position sd (> 0)"),
        DOUBLE_KEY("object.momentum", object_momentum, Applies::All, "initial mean momentum"),
        DOUBLE_KEY("object.mass", object_mass, Applies::All, "particle mass (> 0)"),
        STRING_KEY("potential", potential, Applies::All, "free | harmonic"),
        DOUBLE_KEY("potential.omega", potential_omega, Applies::All, "harmonic frequency"),
        STRING_KEY("boundary", boundary, Applies::All, "reflecting | periodic"),
        DOUBLE_KEY("dt", dt, Applies::All, "engine step (> 0, hazard guard applies)"),
        DOUBLE_KEY("t_max", t_max, Applies::All, "simulated time span"),
        DOUBLE_KEY("rate_scale", rate_scale, Applies::All, "multiplier on every capture rate"),
        INT_KEY("max_collapses", max_collapses, Applies::All, "reductions per trajectory (>= 1)"),
        KeySpec{"case1.windows", "intervals", Applies::Case1,
                "disjoint crystal windows, lo:hi pairs",
                [](ScenarioConfig& c, const std::string& v) { return set_windows(c.windows, v); },
                [](const ScenarioConfig& c) { return render_windows(c.windows); }},
        DOUBLE_KEY("case1.rate", window_rate, Applies::Case1, "capture rate per crystal"),
        KeySpec{"case2.windows", "intervals", Applies::Case2,
                "per-branch crystal windows, lo:hi pairs",
                [](ScenarioConfig& c, const std::string& v) { return set_windows(c.windows, v); },
                [](const ScenarioConfig& c) { return render_windows(c.windows); }},
        DOUBLE_KEY("case2.rate", window_rate, Applies::Case2, "capture rate per crystal"),
        DOUBLE_KEY("case2.offset_a", branch_offset_a, Applies::Case2, "branch A window offset"),
        DOUBLE_KEY("case2.offset_b", branch_offset_b, Applies::Case2, "branch B window offset"),
        DOUBLE_KEY("case2.weight_a", branch_weight_a, Applies::Case2, "|alpha|^2, sums to 1 with weight_b"),
        DOUBLE_KEY("case2.weight_b", branch_weight_b, Applies::Case2, "|beta|^2"),
        DOUBLE_KEY("case3.extent_min", detector_extent_min, Applies::Case3, "detector line start"),
        DOUBLE_KEY("case3.extent_max", detector_extent_max, Applies::Case3, "detector line end"),
        INT_KEY("case3.n_batches", detector_n_batches, Applies::Case3, "uniform batch count"),
        KeySpec{"case3.boundaries", "floats", Applies::Case3,
                "explicit batch boundaries (overrides n_batches)",
                [](ScenarioConfig& c, const std::string& v) {
                    return set_double_list(c.detector_boundaries, v);
                },
                [](const ScenarioConfig& c) { return render_list(c.detector_boundaries); }},
        DOUBLE_KEY("case3.kernel_g", kernel_g, Applies::Case3, "capture kernel strength"),
        DOUBLE_KEY("case3.kernel_lambda", kernel_lambda, Applies::Case3, "capture kernel width"),
        STRING_KEY("case3.detector_density", detector_density, Applies::Case3,
                   "uniform | gaussian"),
        DOUBLE_KEY("case3.detector_center", detector_center, Applies::Case3,
                   "gaussian density center"),
        DOUBLE_KEY("case3.detector_sigma", detector_sigma, Applies::Case3,
                   "gaussian density sd"),
        INT_KEY("case3.quadrature_panels", quadrature_panels, Applies::Case3,
                "detector quadrature panels"),
        DOUBLE_KEY("scattering.extent_min", atom_extent_min, Applies::Scattering,
                   "atom extent start"),
        DOUBLE_KEY("scattering.extent_max", atom_extent_max, Applies::Scattering,
                   "atom extent end"),
        INT_KEY("scattering.n_batches", atom_n_batches, Applies::Scattering,
                "uniform batch count"),
        KeySpec{"scattering.boundaries", "floats", Applies::Scattering,
                "explicit batch boundaries (overrides n_batches)",
                [](ScenarioConfig& c, const std::string& v) {
                    return set_double_list(c.atom_boundaries, v);
                },
                [](const ScenarioConfig& c) { return render_list(c.atom_boundaries); }},
        DOUBLE_KEY("scattering.emit_rate", emit_rate, Applies::Scattering,
                   "uniform emission rate density"),
    };
    return table;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef STRING_KEY

const KeySpec* find_key(const std::string& key) {
    for (const KeySpec& spec : schema()) {
        if (key == spec.key) return &spec;
    }
    return nullptr;
}

ScenarioConfig parse_entries(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::vector<ConfigIssue> issues;
    ScenarioConfig cfg;

    // The case id steers applicability, so resolve it first.
    bool case_seen = false;
    for (const auto& [key, value] : entries) {
        if (key == "case") {
            const std::string err = find_key("case")->set(cfg, value);
            if (!err.empty()) issues.push_back({key, err});
            case_seen = true;
        }
    }
    if (!case_seen) {
        issues.push_back({"case", "required key missing"});
    }

    std::map<std::string, int> counts;
    for (const auto& [key, value] : entries) {
        ++counts[key];
        if (key == "case") continue;
        const KeySpec* spec = find_key(key);
        if (spec == nullptr) {
            issues.push_back({key, "unknown key (strict schema, no silent ignoring)"});
            continue;
        }
        if (case_seen && !applies_to(spec->applies, cfg.case_id)) {
            issues.push_back({key, "does not apply to case '" + case_name(cfg.case_id) + "'"});
            continue;
        }
        const std::string err = spec->set(cfg, value);
        if (!err.empty()) issues.push_back({key, err});
    }
    for (const auto& [key, n] : counts) {
        if (n > 1) issues.push_back({key, "key appears " + std::to_string(n) + " times"});
    }

    if (issues.empty()) {
        // Range and guard validation through the builders themselves.
        try {
            build_scenario(cfg);
        } catch (const StepTooLarge& e) {
            issues.push_back({"dt", e.what()});
        } catch (const Error& e) {
            issues.push_back({"scenario", e.what()});
        }
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

} // namespace

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::vector<ConfigIssue> issues;
    std::vector<std::pair<std::string, std::string>> entries;

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            issues.push_back({"line " + std::to_string(line_no), "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            issues.push_back({"line " + std::to_string(line_no), "empty key"});
            continue;
        }
        entries.emplace_back(key, value);
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    for (const auto& ov : overrides) {
        bool replaced = false;
        for (auto& e : entries) {
            if (e.first == ov.first) {
                e.second = ov.second;
                replaced = true;
            }
        }
        if (!replaced) entries.push_back(ov);
    }
    return parse_entries(entries);
}

ScenarioConfig parse_config(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({{path, "cannot open config file"}});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

std::string canonical_config(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const KeySpec& spec : schema()) {
        if (!applies_to(spec.applies, cfg.case_id)) continue;
        rows.emplace_back(spec.key, spec.render(cfg));
    }
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [k, v] : rows) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const ScenarioConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config(cfg))));
    return buf;
}

std::string config_schema_help() {
    std::string out;
    for (const KeySpec& spec : schema()) {
        out += spec.key;
        out += "  <";
        out += spec.type;
        out += ">  ";
        out += spec.descr;
        out += "\n";
    }
    return out;
}

} // namespace qc

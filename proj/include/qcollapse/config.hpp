#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qcollapse/scenario.hpp"

namespace qc {

// Strict plain-text config: `key = value` lines, full-line # comments.
// Unknown keys, duplicate keys, type errors, keys for a different case and
// step-guard violations are all collected and reported together via
// ConfigError. Keys not present fall back to documented defaults.
ScenarioConfig parse_config(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Canonical `key = value` rendering of every effective field (defaults
// applied, floats at 17 significant digits, keys sorted), so the hash is
// stable across key re-ordering and formatting.
std::string canonical_config(const ScenarioConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);
std::string config_hash(const ScenarioConfig& cfg); // 16 hex digits

// One line per known key: "key  <type>  default  description".
std::string config_schema_help();

} // namespace qc

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qustat::cli {

/// Parsed and validated experiment description. `normalized` holds the full
/// config with every default filled in; it is what the hash covers.
struct Config {
  std::string command;
  nlohmann::json normalized;
};

/// Schema validation; throws ValidationError on unknown fields, wrong types or
/// out-of-range values.
Config parse_config(const nlohmann::json& raw, std::optional<std::uint64_t> seed_override = std::nullopt);

/// FNV-1a 64 of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& normalized);

/// Everything a run writes, kept in memory until the experiment succeeded.
struct Artifacts {
  nlohmann::json result;
  std::map<std::string, std::string> tables;  // file name -> CSV text
};

Artifacts execute(const Config& config, int threads);

nlohmann::json manifest(const Config& config, const Artifacts& artifacts);

/// Writes manifest.json, result.json and tables/*.csv under out_dir.
void write_outputs(const std::filesystem::path& out_dir, const Config& config, const Artifacts& artifacts);

/// Full CLI flow. Returns the process exit code; errors go to `err` as JSON.
int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        std::optional<std::uint64_t> seed_override, int threads, std::ostream& err);

/// printf("%.17g") with nan/inf spelled out.
std::string format_double(double v);

}  // namespace qustat::cli

#include <Eigen/Core>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qustat/error.hpp"
#include "qustat_cli/cli.hpp"

#ifndef QUSTAT_VERSION
#define QUSTAT_VERSION "unknown"
#endif

namespace qustat::cli {

using nlohmann::json;

json manifest(const Config& config, const Artifacts& artifacts) {
  json files = json::array({"manifest.json", "result.json"});
  for (const auto& [name, _] : artifacts.tables) files.push_back("tables/" + name);
  return {{"command", config.command},
          {"config_hash", config_hash(config.normalized)},
          {"seed", config.normalized.at("seed")},
          {"config", config.normalized},
          {"files", files},
          {"versions",
           {{"qustat", QUSTAT_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

void write_outputs(const std::filesystem::path& out_dir, const Config& config, const Artifacts& artifacts) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "tables", ec);
  if (ec) throw ValidationError("cannot create " + (out_dir / "tables").string() + ": " + ec.message());
  for (const auto& [name, text] : artifacts.tables) write_file(out_dir / "tables" / name, text);
  write_file(out_dir / "result.json", pretty(artifacts.result));
  write_file(out_dir / "manifest.json", pretty(manifest(config, artifacts)));
}

int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        std::optional<std::uint64_t> seed_override, int threads, std::ostream& err) {
  auto report = [&](const char* kind, int code, const std::string& message, json extra = json::object()) {
    json e = {{"kind", kind}, {"exit_code", code}, {"message", message}};
    for (auto& [k, v] : extra.items()) e[k] = v;
    err << json{{"error", e}}.dump() << "\n";
    return code;
  };
  try {
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot read config " + config_path.string());
    json raw;
    try {
      raw = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    const Config config = parse_config(raw, seed_override);
    const Artifacts artifacts = execute(config, threads);
    write_outputs(out_dir, config, artifacts);
    return 0;
  } catch (const BudgetError& e) {
    return report(e.kind(), 2, e.what(),
                  {{"required_dim", e.required_dim()}, {"max_dim", e.max_dim()}, {"required_bytes", e.required_bytes()}});
  } catch (const ToleranceError& e) {
    return report(e.kind(), 3, e.what());
  } catch (const ValidationError& e) {
    return report(e.kind(), 1, e.what());
  } catch (const json::exception& e) {
    return report("validation", 1, e.what());
  } catch (const std::exception& e) {
    return report("internal", 1, e.what());
  }
}

}  // namespace qustat::cli

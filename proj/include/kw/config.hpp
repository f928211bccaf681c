#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kw/experiments.hpp"

namespace kw {

/// Validation failure tied to a config field, identified by JSON pointer.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Parse and validate a JSON experiment config. Fills defaults (t1 = 0,
/// identity path, projector-normalized rho0, n_list = {100, 1000, 10000},
/// seed = 0) and resolves "random" matrix specs from the seed.
ExperimentConfig parse_config(const std::string& text);

/// Same, starting from an already parsed JSON document (used after
/// applying overrides).
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Applies `--set key=value` overrides: the key is a dotted path mapped to a
/// JSON pointer, the value is parsed as JSON with a fallback to string.
nlohmann::json apply_overrides(nlohmann::json j,
                               const std::vector<std::string>& sets);

struct RunManifest {
  std::string scenario;  // zeno | anti-zeno | converge | residual
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

/// Runs a scenario end to end: reads and validates the config, runs the
/// experiment, writes report.json, series.csv and timings.json into out_dir.
/// Returns 0 on success, 2 on validation errors, 3 on numerical-quality
/// errors; every error path prints one machine-parsable line prefixed
/// "ERROR:" plus a prose hint on stderr.
int dispatch(const RunManifest& manifest);

}  // namespace kw

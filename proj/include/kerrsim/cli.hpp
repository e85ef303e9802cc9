#pragma once

// Command-line front end: run configuration, artifacts and the subcommand drivers.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kerrsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNoViolation = 4;

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 1;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct RunConfig {
  std::string command;
  std::optional<double> alpha;
  std::vector<double> n_list;
  std::optional<double> phi;
  GridSpec phi_grid{-0.01, 0.01, 201};
  GridSpec delta_phi_grid{0.0, 0.05, 51};
  std::optional<std::size_t> threshold;
  std::uint64_t seed = 1;
  std::size_t shots = 1000000;
  std::string mode = "exact";
  std::string format = "csv";
  std::string output;
  std::string scope = "all";
  double jitter = 0.0;
  bool refine = false;
  bool gaussian = false;
  std::string circuit;
  std::string dump_state;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Fills command-specific defaults (alpha, N list) and checks every field.
/// Throws std::invalid_argument on an invalid configuration.
RunConfig resolve(RunConfig config);

nlohmann::json to_json(const RunConfig& c);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);

/// A rendered table plus its summary and run metadata.
struct Artifact {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json cutoffs = nlohmann::json::object();
  int exit_code = kExitOk;
};

Artifact run_command(const RunConfig& config);

/// Numbers in 17 significant digits, integers verbatim, LF line endings.
std::string render_csv(const Artifact& a);
nlohmann::json render_json(const Artifact& a);

/// Parses argv, runs, writes artifacts and returns the exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kerrsim::cli

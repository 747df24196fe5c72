#pragma once

#include "sharedeq/efficiency.hpp"
#include "sharedeq/equilibrium.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharedeq::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNoConvergence = 3,
  kExitCertification = 4,
};

/// Malformed configuration or command input. For syntax errors `line` and
/// `column` are 1-based; for semantic errors `field` names the offender.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string field = {}, int line = 0,
                       int column = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line), column_(column) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

struct ScalarSpec {
  std::string family;  ///< "quadratic" | "log" | "affine"
  double a = 0.0;
  double b = 0.0;
};

struct UtilitySpec {
  std::string kind;  ///< linear | exponential | perfectly_competitive | quasi_linear | scaled_aggregate
  Vector d;          ///< linear, exponential
  ScalarSpec scalar; ///< u for perfectly_competitive / quasi_linear, g for scaled_aggregate
  Vector offdiag;    ///< quasi_linear
};

struct GameConfig {
  int schema_version = kSchemaVersion;
  int n = 0;
  double capacity = 0.0;
  std::vector<UtilitySpec> utilities;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

/// Strict parse: unknown fields are rejected and only solver fields (and
/// the seed) have defaults. Throws ConfigError.
GameConfig parse_config(const std::string& text);
Json to_json(const GameConfig& config);
/// Throws ConfigError naming the utility when construction fails.
Game build_game(const GameConfig& config);

/// A point file holds a bare JSON array of numbers.
Allocation parse_point(const std::string& text);

/// Compact JSON with every floating value printed with 17 significant digits.
std::string write_json(const Json& value);
/// CSV with header `parameter,efficiency,closed_form`; failed rows leave the
/// efficiency column empty.
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// "a:b:step" -> a, a+step, ..., b.
std::vector<double> parse_grid(const std::string& spec);

Json to_json(const EquilibriumCertificate& cert);
Json to_json(const EfficiencyReport& report);
Json to_json(const LinearAnalysis& analysis);
Json to_json(const SweepRow& row);

struct RunRequest {
  std::string command;
  std::optional<GameConfig> config;
  std::optional<Allocation> point;
  std::optional<EquilibriumKind> kind;
  std::string family;
  std::string grid;
  std::optional<double> alpha;
  std::optional<double> beta;
  int samples = 200;
};

struct RunResult {
  Json report;
  int exit_code = kExitOk;
  std::vector<SweepRow> sweep;
};

/// Dispatches one command. Library exceptions are mapped to exit codes and
/// an "error" entry in the report.
RunResult run(const RunRequest& request);

}  // namespace sharedeq::cli

// Command-line front end: parses flags, loads the config and point files,
// and prints the JSON run report on stdout.

#include "sharedeq/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sharedeq;
using namespace sharedeq::cli;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria and efficiency of shared-constraint resource allocation games"};
  app.require_subcommand(1);

  std::string config_path, point_path, kind_name = "gne", family, grid, csv_path;
  double alpha = 0.0, beta = 0.0;
  int samples = 200;
  bool timing = false;

  app.add_option("--config", config_path, "Game configuration (JSON)");
  app.add_flag("--timing", timing, "Add wall-clock time to the report (breaks byte-identical output)");

  app.add_subcommand("solve-social", "Maximize aggregate utility");
  app.add_subcommand("solve-ve", "Compute a variational equilibrium");
  auto* certify_cmd = app.add_subcommand("certify", "Certify a point as GNE, VE or social optimum");
  certify_cmd->add_option("--point", point_path, "Point file (JSON array)")->required();
  certify_cmd->add_option("--kind", kind_name, "gne | ve | social")
      ->check(CLI::IsMember({"gne", "ve", "social"}));
  auto* efficiency_cmd = app.add_subcommand("efficiency", "Efficiency of a point");
  efficiency_cmd->add_option("--point", point_path, "Point file (JSON array)")->required();
  app.add_subcommand("analyze-linear", "Closed-form analysis of a linear game");
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep a constructive family");
  sweep_cmd->add_option("--family", family, "wcve | wcgne | reserve | bounded_exp")->required();
  sweep_cmd->add_option("--grid", grid, "a:b:step")->required();
  sweep_cmd->add_option("--csv", csv_path, "Also write the sweep as CSV");
  auto* bound_cmd = app.add_subcommand("bound", "Worst GNE efficiency for bounded gradients");
  bound_cmd->add_option("--alpha", alpha)->required();
  bound_cmd->add_option("--beta", beta)->required();
  auto* check_cmd = app.add_subcommand("check-class", "Assumption and class-membership checks");
  check_cmd->add_option("--samples", samples, "Sampled points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  RunRequest request;
  request.command = app.get_subcommands().front()->get_name();
  request.family = family;
  request.grid = grid;
  request.samples = samples;
  if (request.command == "bound") {
    request.alpha = alpha;
    request.beta = beta;
  }

  RunResult result;
  try {
    if (!config_path.empty()) {
      request.config = parse_config(slurp(config_path));
      if (const char* env = std::getenv("SHAREDEQ_SEED")) {
        char* end = nullptr;
        const auto seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw ConfigError("SHAREDEQ_SEED is not an integer", "seed");
        request.config->seed = seed;
        request.config->solver.seed = seed;
      }
    }
    if (!point_path.empty()) request.point = parse_point(slurp(point_path));
    if (request.command == "certify")
      request.kind = kind_name == "ve"       ? EquilibriumKind::VE
                     : kind_name == "social" ? EquilibriumKind::SOCIAL
                                             : EquilibriumKind::GNE;
    result = run(request);
  } catch (const ConfigError& e) {
    result.report = Json{{"command", request.command}, {"error", e.what()}};
    if (e.line() > 0) {
      result.report["line"] = e.line();
      result.report["column"] = e.column();
    }
    if (!e.field().empty()) result.report["field"] = e.field();
    result.exit_code = kExitConfig;
  }

  if (!csv_path.empty() && !result.sweep.empty()) {
    std::ofstream csv(csv_path);
    csv << sweep_csv(result.sweep);
    if (!csv) {
      std::cerr << "failed to write " << csv_path << '\n';
      result.exit_code = kExitConfig;
    }
  }
  if (timing) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    result.report["timing_ms"] =
        std::chrono::duration<double, std::milli>(elapsed).count();
  }
  std::cout << write_json(result.report) << '\n';
  return result.exit_code;
}

#include "sharedeq/cli.hpp"

#include "sharedeq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace sharedeq::cli {
namespace {

void reject_unknown(const Json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items())
    if (!allowed.count(key)) throw ConfigError("unknown field '" + where + key + "'", where + key);
}

const Json& require(const Json& object, const std::string& key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw ConfigError("missing field '" + where + key + "'", where + key);
  return *it;
}

double as_number(const Json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError("field '" + field + "' must be a number", field);
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError("field '" + field + "' must be finite", field);
  return v;
}

int as_int(const Json& value, const std::string& field) {
  if (!value.is_number_integer()) throw ConfigError("field '" + field + "' must be an integer", field);
  return value.get<int>();
}

Vector as_vector(const Json& value, const std::string& field) {
  if (!value.is_array()) throw ConfigError("field '" + field + "' must be an array", field);
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t k = 0; k < value.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = as_number(value[k], field + "[" + std::to_string(k) + "]");
  return v;
}

ScalarSpec parse_scalar(const Json& value, const std::string& where) {
  if (!value.is_object()) throw ConfigError("field '" + where + "' must be an object", where);
  reject_unknown(value, {"family", "a", "b"}, where + ".");
  ScalarSpec spec;
  const Json& family = require(value, "family", where + ".");
  if (!family.is_string()) throw ConfigError("field '" + where + ".family' must be a string", where + ".family");
  spec.family = family.get<std::string>();
  if (spec.family != "quadratic" && spec.family != "log" && spec.family != "affine")
    throw ConfigError("field '" + where + ".family' must be quadratic, log or affine",
                      where + ".family");
  spec.a = as_number(require(value, "a", where + "."), where + ".a");
  spec.b = as_number(require(value, "b", where + "."), where + ".b");
  return spec;
}

UtilitySpec parse_utility(const Json& value, const std::string& where) {
  if (!value.is_object()) throw ConfigError("field '" + where + "' must be an object", where);
  const Json& kind = require(value, "kind", where + ".");
  if (!kind.is_string()) throw ConfigError("field '" + where + ".kind' must be a string", where + ".kind");
  UtilitySpec spec;
  spec.kind = kind.get<std::string>();
  const std::string prefix = where + ".";
  if (spec.kind == "linear" || spec.kind == "exponential") {
    reject_unknown(value, {"kind", "d"}, prefix);
    spec.d = as_vector(require(value, "d", prefix), prefix + "d");
  } else if (spec.kind == "perfectly_competitive") {
    reject_unknown(value, {"kind", "u"}, prefix);
    spec.scalar = parse_scalar(require(value, "u", prefix), prefix + "u");
  } else if (spec.kind == "quasi_linear") {
    reject_unknown(value, {"kind", "u", "offdiag"}, prefix);
    spec.scalar = parse_scalar(require(value, "u", prefix), prefix + "u");
    spec.offdiag = as_vector(require(value, "offdiag", prefix), prefix + "offdiag");
  } else if (spec.kind == "scaled_aggregate") {
    reject_unknown(value, {"kind", "g"}, prefix);
    spec.scalar = parse_scalar(require(value, "g", prefix), prefix + "g");
  } else {
    throw ConfigError("field '" + prefix + "kind' has unknown value '" + spec.kind + "'",
                      prefix + "kind");
  }
  return spec;
}

ScalarFunction make_scalar(const ScalarSpec& spec) {
  if (spec.family == "quadratic") return ScalarFunction::quadratic(spec.a, spec.b);
  if (spec.family == "log") return ScalarFunction::logarithmic(spec.a, spec.b);
  return ScalarFunction::affine(spec.a, spec.b);
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Json scalar_json(const ScalarSpec& spec) {
  return Json{{"family", spec.family}, {"a", spec.a}, {"b", spec.b}};
}

void write_value(const Json& value, std::string& out) {
  switch (value.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write_value(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t k = 0; k < value.size(); ++k) {
        if (k) out += ',';
        write_value(value[k], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buffer[40];
      std::snprintf(buffer, sizeof buffer, "%.17g", v);
      std::string text(buffer);
      if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
      out += text;
      break;
    }
    default:
      out += value.dump();
  }
}

std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string read_config_error_position(const std::string& text, std::size_t byte, int& line,
                                       int& column) {
  line = 1;
  column = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Json parse_document(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 0, column = 0;
    const std::string where = read_config_error_position(text, e.byte, line, column);
    throw ConfigError(std::string(what) + " syntax error at " + where, {}, line, column);
  }
}

GameFamily family_for(const RunRequest& request) {
  GameFamily family;
  const std::string& name = request.family;
  if (name == "wcve") family.kind = GameFamily::Kind::WCVE;
  else if (name == "wcgne") family.kind = GameFamily::Kind::WCGNE;
  else if (name == "reserve") family.kind = GameFamily::Kind::ReservePriceLinear;
  else if (name == "bounded_exp") family.kind = GameFamily::Kind::BoundedGradientExp;
  else throw ConfigError("unknown family '" + name + "'", "family");

  if (request.config) {
    family.n = request.config->n;
    family.capacity = request.config->capacity;
  }
  if (family.kind == GameFamily::Kind::ReservePriceLinear) {
    if (request.config) {
      const Game game = build_game(*request.config);
      family.coefficients = analyze_linear(game).own_coefficients;
    } else {
      family.coefficients = Vector::Constant(4, 0.25);
      family.coefficients[0] = 1.0;
      family.n = 4;
    }
  }
  family.parameters = parse_grid(request.grid);
  return family;
}

const GameConfig& need_config(const RunRequest& request) {
  if (!request.config) throw ConfigError("command '" + request.command + "' needs --config", "config");
  return *request.config;
}

const Allocation& need_point(const RunRequest& request) {
  if (!request.point) throw ConfigError("command '" + request.command + "' needs --point", "point");
  return *request.point;
}

}  // namespace

GameConfig parse_config(const std::string& text) {
  const Json doc = parse_document(text, "config");
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, {"schema_version", "n", "capacity", "utilities", "solver", "seed"}, "");

  GameConfig config;
  config.schema_version = as_int(require(doc, "schema_version", ""), "schema_version");
  if (config.schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(config.schema_version),
                      "schema_version");
  config.n = as_int(require(doc, "n", ""), "n");
  if (config.n < 1) throw ConfigError("field 'n' must be >= 1", "n");
  config.capacity = as_number(require(doc, "capacity", ""), "capacity");
  if (!(config.capacity > 0.0)) throw ConfigError("field 'capacity' must be positive", "capacity");

  const Json& utilities = require(doc, "utilities", "");
  if (!utilities.is_array()) throw ConfigError("field 'utilities' must be an array", "utilities");
  if (static_cast<int>(utilities.size()) != config.n)
    throw ConfigError("utilities length " + std::to_string(utilities.size()) +
                          " does not match n = " + std::to_string(config.n),
                      "utilities");
  for (std::size_t i = 0; i < utilities.size(); ++i)
    config.utilities.push_back(parse_utility(utilities[i], "utilities[" + std::to_string(i) + "]"));

  if (auto it = doc.find("solver"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("field 'solver' must be an object", "solver");
    reject_unknown(*it, {"max_iterations", "step_size", "backtracking", "kkt_tolerance"}, "solver.");
    if (it->contains("max_iterations"))
      config.solver.max_iterations = as_int((*it)["max_iterations"], "solver.max_iterations");
    if (it->contains("step_size"))
      config.solver.step_size = as_number((*it)["step_size"], "solver.step_size");
    if (it->contains("backtracking"))
      config.solver.backtracking = as_number((*it)["backtracking"], "solver.backtracking");
    if (it->contains("kkt_tolerance"))
      config.solver.kkt_tolerance = as_number((*it)["kkt_tolerance"], "solver.kkt_tolerance");
    try {
      config.solver.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what(), "solver");
    }
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("field 'seed' must be a nonnegative integer", "seed");
    config.seed = it->get<std::uint64_t>();
  }
  config.solver.seed = config.seed;
  return config;
}

Json to_json(const GameConfig& config) {
  Json utilities = Json::array();
  for (const auto& u : config.utilities) {
    Json item{{"kind", u.kind}};
    if (u.kind == "linear" || u.kind == "exponential") item["d"] = vector_json(u.d);
    if (u.kind == "perfectly_competitive" || u.kind == "quasi_linear") item["u"] = scalar_json(u.scalar);
    if (u.kind == "quasi_linear") item["offdiag"] = vector_json(u.offdiag);
    if (u.kind == "scaled_aggregate") item["g"] = scalar_json(u.scalar);
    utilities.push_back(std::move(item));
  }
  return Json{{"schema_version", config.schema_version},
              {"n", config.n},
              {"capacity", config.capacity},
              {"utilities", std::move(utilities)},
              {"solver",
               {{"max_iterations", config.solver.max_iterations},
                {"step_size", config.solver.step_size},
                {"backtracking", config.solver.backtracking},
                {"kkt_tolerance", config.solver.kkt_tolerance}}},
              {"seed", config.seed}};
}

Game build_game(const GameConfig& config) {
  std::vector<UtilityFunction> utilities;
  for (int i = 0; i < config.n; ++i) {
    const auto& spec = config.utilities.at(i);
    const std::string field = "utilities[" + std::to_string(i) + "]";
    try {
      if ((spec.kind == "linear" || spec.kind == "exponential" || spec.kind == "quasi_linear") &&
          (spec.kind == "quasi_linear" ? spec.offdiag.size() : spec.d.size()) != config.n)
        throw ConfigError(field + ": coefficient vector must have n entries", field);
      if (spec.kind == "linear") utilities.push_back(UtilityFunction::linear(i, spec.d));
      else if (spec.kind == "exponential") utilities.push_back(UtilityFunction::exponential(i, spec.d));
      else if (spec.kind == "perfectly_competitive")
        utilities.push_back(UtilityFunction::perfectly_competitive(i, config.n, make_scalar(spec.scalar)));
      else if (spec.kind == "quasi_linear")
        utilities.push_back(UtilityFunction::quasi_linear(i, make_scalar(spec.scalar), spec.offdiag));
      else utilities.push_back(UtilityFunction::scaled_aggregate(i, config.n, make_scalar(spec.scalar)));
    } catch (const DomainError& e) {
      throw ConfigError(field + ": " + e.what(), field);
    }
  }
  try {
    return Game(config.capacity, std::move(utilities));
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), "utilities");
  }
}

Allocation parse_point(const std::string& text) {
  const Json doc = parse_document(text, "point");
  return as_vector(doc, "point");
}

std::string write_json(const Json& value) {
  std::string out;
  write_value(value, out);
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "parameter,efficiency,closed_form\n";
  for (const auto& row : rows) {
    out += format_number(row.parameter);
    out += ',';
    if (row.efficiency) out += format_number(*row.efficiency);
    out += ',';
    out += format_number(row.closed_form);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  double values[3];
  std::istringstream in(spec);
  std::string part;
  int count = 0;
  while (std::getline(in, part, ':')) {
    if (count == 3) throw ConfigError("grid must be a:b:step", "grid");
    try {
      std::size_t used = 0;
      values[count] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("grid entry '" + part + "' is not a number", "grid");
    }
    ++count;
  }
  if (count != 3) throw ConfigError("grid must be a:b:step", "grid");
  const double a = values[0], b = values[1], step = values[2];
  if (!(step > 0.0) || b < a) throw ConfigError("grid needs a <= b and step > 0", "grid");
  const auto steps = static_cast<long>(std::floor((b - a) / step + 1e-9));
  std::vector<double> out;
  for (long k = 0; k <= steps; ++k) out.push_back(std::round((a + k * step) * 1e12) / 1e12);
  return out;
}

Json to_json(const EquilibriumCertificate& cert) {
  Json warnings = Json::array();
  for (const auto& w : cert.warnings) warnings.push_back(w);
  return Json{{"kind", to_string(cert.kind)},
              {"x", vector_json(cert.x)},
              {"multipliers", vector_json(cert.multipliers)},
              {"residual", cert.residual},
              {"certified", cert.certified()},
              {"iterations", cert.iterations},
              {"warnings", std::move(warnings)}};
}

Json to_json(const EfficiencyReport& report) {
  return Json{{"theta_at_x", report.theta_at_x},
              {"theta_opt", report.theta_opt},
              {"ratio", report.ratio ? Json(*report.ratio) : Json(nullptr)},
              {"lemma1_bound", report.lemma1_bound ? Json(*report.lemma1_bound) : Json(nullptr)},
              {"denominator_degenerate", report.denominator_degenerate}};
}

Json to_json(const LinearAnalysis& analysis) {
  Json support = Json::array();
  for (int i : analysis.ve_support) support.push_back(i);
  return Json{{"own_coefficients", vector_json(analysis.own_coefficients)},
              {"theta_gradient", vector_json(analysis.theta_gradient)},
              {"capacity", analysis.capacity},
              {"ve_support", std::move(support)},
              {"ve_multiplier", analysis.ve_multiplier},
              {"social_value", analysis.social_value},
              {"worst_gne_player", analysis.worst_gne_player},
              {"worst_gne_efficiency", analysis.worst_gne_efficiency},
              {"best_gne_efficiency", analysis.best_gne_efficiency},
              {"worst_ve_efficiency", analysis.worst_ve_efficiency},
              {"best_ve_efficiency", analysis.best_ve_efficiency}};
}

Json to_json(const SweepRow& row) {
  Json out{{"parameter", row.parameter},
           {"efficiency", row.efficiency ? Json(*row.efficiency) : Json(nullptr)},
           {"closed_form", row.closed_form}};
  if (!row.error.empty()) out["error"] = row.error;
  return out;
}

RunResult run(const RunRequest& request) {
  RunResult result;
  Json& report = result.report;
  report["command"] = request.command;
  report["config"] = request.config ? to_json(*request.config) : Json(nullptr);
  try {
    const std::string& cmd = request.command;
    if (cmd == "solve-social") {
      const Game game = build_game(need_config(request));
      const auto cert = solve_social(game, request.config->solver);
      report["certificate"] = to_json(cert);
      report["theta"] = game.theta(cert.x);
    } else if (cmd == "solve-ve") {
      const Game game = build_game(need_config(request));
      const auto cert = solve_ve(game, request.config->solver);
      report["certificate"] = to_json(cert);
      report["efficiency"] = to_json(efficiency(game, cert.x, request.config->solver));
    } else if (cmd == "certify") {
      const Game game = build_game(need_config(request));
      const auto kind = request.kind.value_or(EquilibriumKind::GNE);
      const auto cert = certify(game, need_point(request), kind, request.config->solver.kkt_tolerance);
      report["certificate"] = to_json(cert);
      if (!cert.certified(request.config->solver.kkt_tolerance)) result.exit_code = kExitCertification;
    } else if (cmd == "efficiency") {
      const Game game = build_game(need_config(request));
      report["efficiency"] = to_json(efficiency(game, need_point(request), request.config->solver));
    } else if (cmd == "analyze-linear") {
      report["analysis"] = to_json(analyze_linear(build_game(need_config(request))));
    } else if (cmd == "sweep") {
      const GameFamily family = family_for(request);
      const SolverConfig solver = request.config ? request.config->solver : SolverConfig{};
      result.sweep = sweep_family(family, solver);
      Json rows = Json::array();
      for (const auto& row : result.sweep) {
        rows.push_back(to_json(row));
        if (!row.error.empty()) result.exit_code = kExitNoConvergence;
      }
      report["family"] = to_string(family.kind);
      report["sweep"] = std::move(rows);
    } else if (cmd == "bound") {
      if (!request.alpha || !request.beta)
        throw ConfigError("command 'bound' needs --alpha and --beta", "alpha");
      report["bound"] = bounded_gradient_bound(*request.alpha, *request.beta);
    } else if (cmd == "check-class") {
      const Game game = build_game(need_config(request));
      const auto a1 = check_assumption1(game, request.samples, request.config->seed + 1);
      Json violations = Json::array();
      for (const auto& v : a1.violations) violations.push_back(v);
      report["assumption1"] = Json{{"ok", a1.ok()},
                                   {"min_own_partial", a1.min_own_partial},
                                   {"min_theta_gradient", a1.min_theta_gradient},
                                   {"max_concavity_violation", a1.max_concavity_violation},
                                   {"min_value_at_zero", a1.min_value_at_zero},
                                   {"violations", std::move(violations)}};
      const auto fprime = is_in_Fprime(game, request.samples, request.config->seed + 2);
      report["fprime"] = Json{{"member", fprime.member}, {"max_gap", fprime.max_gap}};
      const auto scaled = scaled_membership(game, request.samples, request.config->seed + 3);
      report["scaled_fprime"] = Json{{"member", scaled.member},
                                     {"scale", scaled.scale},
                                     {"residual", std::isfinite(scaled.residual)
                                                      ? Json(scaled.residual)
                                                      : Json(nullptr)}};
    } else {
      throw ConfigError("unknown command '" + cmd + "'", "command");
    }
  } catch (const ConfigError& e) {
    report["error"] = e.what();
    if (!e.field().empty()) report["field"] = e.field();
    result.exit_code = kExitConfig;
  } catch (const DomainError& e) {
    report["error"] = e.what();
    result.exit_code = kExitConfig;
  } catch (const ConvergenceError& e) {
    report["error"] = e.what();
    report["best"] = to_json(e.best());
    result.exit_code = kExitNoConvergence;
  } catch (const EvaluationError& e) {
    report["error"] = e.what();
    result.exit_code = kExitNoConvergence;
  }
  return result;
}

}  // namespace sharedeq::cli

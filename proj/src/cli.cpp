#include "geostep/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "geostep/experiments.hpp"
#include "geostep/geometry.hpp"
#include "geostep/integrators.hpp"
#include "geostep/methods.hpp"
#include "geostep/registry.hpp"
#include "geostep/systems.hpp"

namespace geostep {
namespace {

/// Raised for bad flag values after CLI11 parsing succeeded.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kDefaultTol = 1e-10;
constexpr double kReversibilityTol = 1e-11;
constexpr std::size_t kReversibilitySteps = 100;

std::string real(double x) { return fmt::format("{:.16e}", x); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Named or file-loaded system; `linear` is set for quadratic Hamiltonians.
struct SystemChoice {
  std::string label;
  std::optional<LinearHamiltonian> linear;
  GradientField field;
};

SystemChoice select_system(const std::string& name, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw UsageError("--omega must be a positive finite number");
  if (name == "sho") {
    auto sys = sho(omega);
    auto field = sys.field();
    return SystemChoice{"sho", std::move(sys), std::move(field)};
  }
  if (name == "pendulum") return SystemChoice{"pendulum", std::nullopt, pendulum(omega)};
  auto sys = load_quadratic(read_file(name), name);
  auto field = sys.field();
  return SystemChoice{name, std::move(sys), std::move(field)};
}

void check_step(double h) {
  if (!std::isfinite(h) || !(h > 0.0)) throw UsageError("--h must be a positive finite number");
}

nlohmann::json report_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["k"] = r.k;
  j["kind"] = std::string(to_string(r.kind));
  j["order"] = r.order;
  auto defects = nlohmann::json::array();
  for (const auto& d : r.defects) defects.push_back(d.str());
  j["defects"] = defects;
  j["consistent"] = r.consistent;
  j["symmetric"] = r.symmetric;
  j["irreducible"] = r.irreducible;
  j["rootConditionSatisfied"] = r.rootConditionSatisfied;
  auto roots = nlohmann::json::array();
  for (const auto& root : r.rhoRoots) {
    roots.push_back({{"re", root.value.real()}, {"im", root.value.imag()}, {"multiplicity", root.multiplicity}});
  }
  j["rhoRoots"] = roots;
  j["normalization"] = r.normalization.str();
  if (r.lambda) {
    auto rows = nlohmann::json::array();
    for (const auto& row : *r.lambda) {
      auto entries = nlohmann::json::array();
      for (const auto& v : row) entries.push_back(v.str());
      rows.push_back(entries);
    }
    j["lambda"] = rows;
  }
  j["warnings"] = r.warnings;
  return j;
}

/// Methods making up a scheme, labelled for reports.
std::vector<std::pair<std::string, MethodSpec>> members(const Scheme& scheme) {
  return std::visit(
      [](const auto& s) -> std::vector<std::pair<std::string, MethodSpec>> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MethodSpec>) {
          return {{s.name, s}};
        } else if constexpr (std::is_same_v<T, PredictorCorrector>) {
          return {{s.name + "/predictor", s.predictor}, {s.name + "/corrector", s.corrector}};
        } else {
          return {{s.name + "/q", s.q_method}, {s.name + "/p", s.p_method}};
        }
      },
      scheme);
}

int cmd_analyze(const std::string& method, bool json, std::ostream& out) {
  const Scheme scheme = resolve_scheme(method);
  const auto parts = members(scheme);
  bool inconsistent = false;
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto report = analyze(parts[i].second);
    if (parts.size() > 1) report.method = parts[i].first;
    inconsistent = inconsistent || !report.consistent;
    if (json) {
      doc.push_back(report_json(report));
    } else {
      if (i) out << '\n';
      out << format_report(report);
    }
  }
  if (json) out << (parts.size() == 1 ? doc.front() : doc).dump(2) << '\n';
  return inconsistent ? exit_warnings : exit_ok;
}

struct IntegrateOptions {
  std::string method;
  std::string system = "sho";
  double omega = 1.0;
  double h = 0.1;
  std::size_t steps = 1000;
  double p0 = 0.0;
  double q0 = 1.0;
  std::string starter = "rk4";
  std::string out = ".";
  std::size_t stride = 1;
};

int cmd_integrate(const IntegrateOptions& o, std::ostream& out, std::ostream& err) {
  check_step(o.h);
  if (o.stride == 0) throw UsageError("--stride must be at least 1");
  const auto sys = select_system(o.system, o.omega);
  Scenario s{.name = "", .scheme = resolve_scheme(o.method)};
  s.name = scheme_name(s.scheme);
  s.system = sys.label;
  s.omega = o.omega;
  s.h = o.h;
  s.steps = o.steps;
  s.p0 = o.p0;
  s.q0 = o.q0;
  s.starter = parse_starter(o.starter);
  s.stride = o.stride;
  if (s.steps < static_cast<std::size_t>(window_length(s.scheme))) {
    throw UsageError(fmt::format("--steps must be at least {} for {}", window_length(s.scheme), s.name));
  }
  const auto summary = run_scenario(s, sys.field, o.out);
  out << fmt::format("method: {} system: {} steps: {} final_dH: {}", s.name, sys.label, summary.recorded,
                     real(summary.final_energy - summary.initial_energy));
  if (summary.final_error) out << " final_error: " << real(*summary.final_error);
  out << '\n';
  for (const auto& n : summary.notes) err << "warning: " << n << '\n';
  if (summary.aborted_at) {
    err << fmt::format("error: aborted at step {}: {}\n", *summary.aborted_at, summary.abort_message);
    return exit_usage;
  }
  return summary.notes.empty() ? exit_ok : exit_warnings;
}

struct VerifyOptions {
  std::vector<std::string> checks;
  std::vector<std::string> methods;
  std::string system = "sho";
  double omega = 1.0;
  double h = 0.1;
  std::optional<double> tol;
};

struct VerifyRow {
  std::string method;
  std::string check;
  double value;
  double threshold;
};

double rational_abs(const Rational& r) { return std::abs(r.to_double()); }

double consistency_defect(const MethodSpec& m) {
  const auto c = order_defects(m);
  return std::max(rational_abs(c.at(0)), rational_abs(c.at(1)));
}

double symmetry_defect(const MethodSpec& m) {
  double worst = 0.0;
  const auto k = static_cast<std::size_t>(m.k);
  for (std::size_t j = 0; j <= k; ++j) {
    worst = std::max(worst, rational_abs(m.alpha[j] + m.alpha[k - j]));
    worst = std::max(worst, rational_abs(m.beta[j] - m.beta[k - j]));
  }
  return worst;
}

const LinearHamiltonian& require_linear(const SystemChoice& sys, const std::string& check) {
  if (!sys.linear) {
    throw UsageError("check '" + check + "' needs a linear system; '" + sys.label + "' is nonlinear");
  }
  return *sys.linear;
}

const MethodSpec& require_single(const Scheme& scheme, const std::string& check) {
  if (const auto* m = std::get_if<MethodSpec>(&scheme)) return *m;
  throw UsageError("check '" + check + "' applies to single multistep methods, not to '" + scheme_name(scheme) + "'");
}

/// | |det| − 1 | of the window map, from the transfer matrix on linear
/// systems and by finite differences at the starter window otherwise.
double window_area_defect(const Scheme& scheme, const SystemChoice& sys, double h) {
  if (sys.linear) return area_defect(transfer_matrix(scheme, *sys.linear, h).m);
  const auto k = window_length(scheme);
  const auto dof = sys.field.dof();
  const auto start = rk4_start(sys.field, initial_state(dof, 0.0, 1.0), h, static_cast<std::size_t>(k - 1));
  const auto map = [&](const StateVector& stacked) {
    auto window = unstack_window(stacked, dof);
    window.push_back(step(scheme, sys.field, window, h));
    window.erase(window.begin());
    return StateVector(stack_window(window));
  };
  return area_defect(map, stack_window(start));
}

double reversibility(const MethodSpec& m, const SystemChoice& sys, double h) {
  SolverConfig cfg;
  cfg.starter = sys.field.has_exact_flow() ? Starter::exact : Starter::rk4;
  const auto traj =
      integrate(m, sys.field, initial_state(sys.field.dof(), 0.0, 1.0), h, kReversibilitySteps + m.k, cfg);
  return reversibility_residual(m, sys.field, traj);
}

std::vector<VerifyRow> verify_one(const std::string& check, const std::string& method_name,
                                  const SystemChoice& sys, double h, double default_tol, bool tol_given) {
  const Scheme scheme = resolve_scheme(method_name);
  const auto name = scheme_name(scheme);
  const auto tol = [&](double fallback) { return tol_given ? default_tol : fallback; };
  std::vector<VerifyRow> rows;
  if (check == "order") {
    for (const auto& [label, m] : members(scheme)) rows.push_back({label, check, consistency_defect(m), tol(kDefaultTol)});
  } else if (check == "symmetry") {
    for (const auto& [label, m] : members(scheme)) rows.push_back({label, check, symmetry_defect(m), tol(kDefaultTol)});
  } else if (check == "g-symplectic") {
    const auto& m = require_single(scheme, check);
    rows.push_back({name, check, g_symplecticity_defect(m, require_linear(sys, check), h).defect, tol(kDefaultTol)});
  } else if (check == "area") {
    rows.push_back({name, check, window_area_defect(scheme, sys, h), tol(kDefaultTol)});
  } else if (check == "reversibility") {
    rows.push_back({name, check, reversibility(require_single(scheme, check), sys, h), tol(kReversibilityTol)});
  } else if (check == "step-transition") {
    const auto g = step_transition(scheme, require_linear(sys, check), h);
    rows.push_back({name, check, g.residual, tol(kDefaultTol)});
  } else {
    throw UsageError("unknown check '" + check + "'");
  }
  return rows;
}

std::optional<double> env_tolerance() {
  const char* raw = std::getenv("GEOSTEP_TOL");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw UsageError("GEOSTEP_TOL must be a positive decimal, got '" + text + "'");
  }
  return v;
}

int cmd_verify(VerifyOptions o, std::ostream& out) {
  check_step(o.h);
  const auto sys = select_system(o.system, o.omega);
  std::optional<double> tol = o.tol ? o.tol : env_tolerance();
  if (tol && (!(*tol > 0.0) || !std::isfinite(*tol))) throw UsageError("--tol must be a positive finite number");
  std::sort(o.methods.begin(), o.methods.end());
  o.methods.erase(std::unique(o.methods.begin(), o.methods.end()), o.methods.end());

  std::vector<VerifyRow> rows;
  for (const auto& method : o.methods) {
    for (const auto& check : o.checks) {
      auto more = verify_one(check, method, sys, o.h, tol.value_or(0.0), tol.has_value());
      rows.insert(rows.end(), more.begin(), more.end());
    }
  }
  bool all = true;
  out << "method,system,omega,h,check,value,threshold,pass\n";
  for (const auto& r : rows) {
    const bool pass = std::isfinite(r.value) && r.value <= r.threshold;
    all = all && pass;
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.method, sys.label, real(o.omega), real(o.h), r.check,
                       real(r.value), real(r.threshold), pass ? "true" : "false");
  }
  return all ? exit_ok : exit_warnings;
}

struct ExperimentOptions {
  std::optional<int> figure;
  std::optional<std::string> scenario;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> stride;
  std::string outdir = "geostep-out";
  bool swap_partition = false;
  bool pec = false;
};

void apply_overrides(Scenario& s, const ExperimentOptions& o) {
  if (o.steps) s.steps = *o.steps;
  if (o.stride) s.stride = *o.stride;
  if (o.swap_partition) {
    if (auto* pair = std::get_if<PartitionedPair>(&s.scheme)) {
      auto swapped = make_partitioned_pair(pair->name, pair->q_method, pair->p_method, true);
      swapped.name = partitioned_name(swapped.q_method.name, swapped.p_method.name);
      s.scheme = std::move(swapped);
    }
  }
  if (o.pec) {
    if (auto* pc = std::get_if<PredictorCorrector>(&s.scheme)) pc->mode = PcMode::pec;
  }
  if (s.steps < static_cast<std::size_t>(window_length(s.scheme))) {
    throw UsageError(fmt::format("--steps must be at least {} for {}", window_length(s.scheme), s.name));
  }
  if (s.stride == 0) throw UsageError("--stride must be at least 1");
}

int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  if (o.figure.has_value() == o.scenario.has_value()) throw UsageError("give exactly one of --figure or --scenario");
  std::vector<Scenario> scenarios;
  if (o.figure) {
    try {
      scenarios = figure_scenarios(*o.figure);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    scenarios.push_back(parse_scenario(read_file(*o.scenario)));
  }
  for (auto& s : scenarios) apply_overrides(s, o);

  const auto summaries = run_scenarios(scenarios, o.outdir);
  bool warnings = false;
  for (const auto& r : summaries) {
    std::string line = fmt::format("{}: steps {}", r.scenario, r.recorded);
    if (r.requested_steps >= 10000) {
      line += fmt::format(" behavior {}", to_string(classify(r)));
    } else {
      line += " behavior n/a (fewer than 10^4 steps)";
    }
    line += fmt::format(" max_deviation {} slope {} max_radius_deviation {}", real(r.drift.max_deviation),
                        real(r.drift.slope), real(r.max_radius_deviation));
    if (r.explode_index) line += fmt::format(" explode_step {}", *r.explode_index);
    if (r.final_error) line += " final_error " + real(*r.final_error);
    if (r.aborted_at) line += fmt::format(" aborted_at {}", *r.aborted_at);
    out << line << '\n';
    for (const auto& n : r.notes) err << r.scenario << ": warning: " << n << '\n';
    warnings = warnings || r.aborted_at || !r.notes.empty();
  }
  return warnings ? exit_warnings : exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-aware multistep integrators for Hamiltonian systems", "geostep"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string analyze_method;
  bool analyze_json = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Order, symmetry, root condition and Lambda of a method");
  analyze_cmd->add_option("--method", analyze_method, "Registry name or method file")->required();
  analyze_cmd->add_flag("--json", analyze_json, "Emit JSON");

  IntegrateOptions io;
  auto* integrate_cmd = app.add_subcommand("integrate", "Integrate a system and write CSV files");
  integrate_cmd->add_option("--method", io.method, "Registry name or method file")->required();
  integrate_cmd->add_option("--system", io.system, "sho, pendulum, or a symmetric-matrix file");
  integrate_cmd->add_option("--omega", io.omega, "Oscillator frequency");
  integrate_cmd->add_option("--h", io.h, "Step size");
  integrate_cmd->add_option("--steps", io.steps, "Grid points to record");
  integrate_cmd->add_option("--p0", io.p0, "Initial momentum");
  integrate_cmd->add_option("--q0", io.q0, "Initial position");
  integrate_cmd->add_option("--starter", io.starter, "rk4 or exact");
  integrate_cmd->add_option("--out", io.out, "Output directory");
  integrate_cmd->add_option("--stride", io.stride, "Write every n-th row");

  VerifyOptions vo;
  double verify_tol = 0.0;
  auto* verify_cmd = app.add_subcommand("verify", "Run structure checks and print a verification CSV");
  verify_cmd->add_option("--check", vo.checks, "order|symmetry|g-symplectic|area|reversibility|step-transition")
      ->required();
  verify_cmd->add_option("--method", vo.methods, "Registry names or method files")->required();
  verify_cmd->add_option("--system", vo.system, "sho, pendulum, or a symmetric-matrix file");
  verify_cmd->add_option("--omega", vo.omega, "Oscillator frequency");
  verify_cmd->add_option("--h", vo.h, "Step size");
  auto* tol_opt = verify_cmd->add_option("--tol", verify_tol, "Pass threshold for every check");

  ExperimentOptions eo;
  int figure = 0;
  std::string scenario_file;
  std::size_t steps = 0;
  std::size_t stride = 0;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run the oscillator experiments");
  auto* figure_opt = experiment_cmd->add_option("--figure", figure, "Figure number 1-4");
  auto* scenario_opt = experiment_cmd->add_option("--scenario", scenario_file, "Scenario file");
  auto* steps_opt = experiment_cmd->add_option("--steps", steps, "Override grid points");
  auto* stride_opt = experiment_cmd->add_option("--stride", stride, "Write every n-th row");
  experiment_cmd->add_option("--outdir", eo.outdir, "Output directory");
  experiment_cmd->add_flag("--swap-partition", eo.swap_partition, "Exchange the q and p formulas");
  experiment_cmd->add_flag("--pec", eo.pec, "Use PEC instead of PECE");

  auto* list_cmd = app.add_subcommand("list", "List built-in methods");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_method, analyze_json, out);
    if (*integrate_cmd) return cmd_integrate(io, out, err);
    if (*verify_cmd) {
      if (*tol_opt) vo.tol = verify_tol;
      return cmd_verify(vo, out);
    }
    if (*experiment_cmd) {
      if (*figure_opt) eo.figure = figure;
      if (*scenario_opt) eo.scenario = scenario_file;
      if (*steps_opt) eo.steps = steps;
      if (*stride_opt) eo.stride = stride;
      return cmd_experiment(eo, out, err);
    }
    if (*list_cmd) {
      for (const auto& name : registry_names()) out << name << '\n';
      return exit_ok;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace geostep

#include "geostep/experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>

#include "geostep/registry.hpp"
#include "geostep/text_format.hpp"

namespace geostep {
namespace {

std::string real(double x) { return fmt::format("{:.16e}", x); }

/// Shortest text that parses back to the same double.
std::string round_trip(double x) {
  for (int precision = 1; precision <= 17; ++precision) {
    auto s = fmt::format("{:.{}g}", x, precision);
    if (std::stod(s) == x) return s;
  }
  return fmt::format("{:.17g}", x);
}

double parse_real(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("scenario field '" + key + "': malformed real '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || text.front() == '-') {
    throw std::invalid_argument("scenario field '" + key + "': malformed count '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument("scenario field '" + key + "': expected true|false");
}

PartitionedPair named_pair(const std::string& q_name, const std::string& p_name) {
  return make_partitioned_pair(partitioned_name(q_name, p_name), builtin_method(q_name), builtin_method(p_name));
}

PredictorCorrector named_pc(const std::string& predictor, const std::string& corrector, PcMode mode) {
  return make_predictor_corrector(fmt::format("pc({},{})", predictor, corrector), builtin_method(predictor),
                                  builtin_method(corrector), mode);
}

Scenario base(std::string name, Scheme scheme, std::size_t steps, std::size_t stride) {
  Scenario s{.name = std::move(name), .scheme = std::move(scheme)};
  s.steps = steps;
  s.stride = stride;
  return s;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out_ << header << '\n';
  }
  void row(const std::string& line) { out_ << line << '\n'; }
  void close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failure on '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

StateVector Scenario::initial_state() const {
  const Eigen::Index dof = 1;
  return geostep::initial_state(dof, p0, q0);
}

std::string partitioned_name(std::string_view q_method, std::string_view p_method) {
  return fmt::format("partitioned({},{})", q_method, p_method);
}

std::vector<Scenario> builtin_scenarios() {
  constexpr std::size_t kLong = 1000000;
  std::vector<Scenario> out;
  out.push_back(base("fig1-explicit-euler", builtin_scheme("explicit-euler"), 1000, 1));
  out.push_back(base("fig1-implicit-euler", builtin_scheme("implicit-euler"), 1000, 1));
  out.push_back(base("fig2-m1", builtin_scheme("m1-as-printed"), kLong, 1000));
  out.push_back(base("fig2-m1-corrected", builtin_scheme("m1-corrected"), kLong, 1000));
  out.push_back(base("fig3-pc", builtin_scheme("pc-m2"), kLong, 1000));
  out.push_back(base("fig4-partitioned", named_pair("m3-line1", "m3-line2-as-printed"), kLong, 1000));
  out.push_back(base("fig4-partitioned-corrected", named_pair("m3-line1", "m3b-corrected"), kLong, 1000));
  return out;
}

std::vector<Scenario> figure_scenarios(int figure) {
  const auto all = builtin_scenarios();
  const std::string prefix = fmt::format("fig{}-", figure);
  std::vector<Scenario> out;
  for (const auto& s : all) {
    if (s.name.rfind(prefix, 0) == 0) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("unknown figure {} (expected 1-4)", figure));
  return out;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s{.name = "", .scheme = builtin_scheme("explicit-euler")};
  std::optional<std::string> name;
  std::optional<std::string> method;
  std::optional<std::string> predictor;
  std::optional<std::string> corrector;
  std::optional<std::string> part_q;
  std::optional<std::string> part_p;
  PcMode mode = PcMode::pece;
  bool swap = false;
  std::string inline_method;

  for (const auto& e : parse_document(text)) {
    const auto& k = e.key;
    if (k == "scenario") {
      name = e.value;
    } else if (k == "method") {
      method = e.value;
    } else if (k == "predictor") {
      predictor = e.value;
    } else if (k == "corrector") {
      corrector = e.value;
    } else if (k == "pc-mode") {
      mode = parse_pc_mode(e.value);
    } else if (k == "partition-q") {
      part_q = e.value;
    } else if (k == "partition-p") {
      part_p = e.value;
    } else if (k == "swap-partition") {
      swap = parse_bool(e.value, k);
    } else if (k == "system") {
      if (e.value != "sho" && e.value != "pendulum") {
        throw std::invalid_argument("scenario system must be sho or pendulum, got '" + e.value + "'");
      }
      s.system = e.value;
    } else if (k == "omega") {
      s.omega = parse_real(e.value, k);
    } else if (k == "h") {
      s.h = parse_real(e.value, k);
    } else if (k == "steps") {
      s.steps = parse_count(e.value, k);
    } else if (k == "p0") {
      s.p0 = parse_real(e.value, k);
    } else if (k == "q0") {
      s.q0 = parse_real(e.value, k);
    } else if (k == "starter") {
      s.starter = parse_starter(e.value);
    } else if (k == "stride") {
      s.stride = parse_count(e.value, k);
    } else if (k == "outputs") {
      s.phase_output = s.energy_output = s.error_output = false;
      for (const auto& o : split_whitespace(e.value)) {
        if (o == "phase") s.phase_output = true;
        else if (o == "energy") s.energy_output = true;
        else if (o == "error") s.error_output = true;
        else throw std::invalid_argument("unknown scenario output '" + o + "'");
      }
    } else if (k == "name" || k == "k" || k == "alpha" || k == "beta" || k == "gamma" || k == "kind") {
      inline_method += k + ": " + e.value + "\n";
      for (const auto& row : e.rows) inline_method += row + "\n";
    } else {
      throw std::invalid_argument(fmt::format("line {}: unknown scenario key '{}'", e.line, k));
    }
  }
  if (!name || name->empty()) throw std::invalid_argument("scenario document lacks 'scenario: <name>'");
  s.name = *name;

  const int routes = (method ? 1 : 0) + (predictor || corrector ? 1 : 0) + (part_q || part_p ? 1 : 0) +
                     (inline_method.empty() ? 0 : 1);
  if (routes != 1) {
    throw std::invalid_argument(
        "scenario must define exactly one of: method, predictor/corrector, partition-q/partition-p, inline method");
  }
  if (method) {
    s.scheme = resolve_scheme(*method);
  } else if (predictor || corrector) {
    if (!predictor || !corrector) throw std::invalid_argument("predictor and corrector must both be given");
    s.scheme = named_pc(*predictor, *corrector, mode);
  } else if (part_q || part_p) {
    if (!part_q || !part_p) throw std::invalid_argument("partition-q and partition-p must both be given");
    if (swap) std::swap(part_q, part_p);
    s.scheme = named_pair(*part_q, *part_p);
  } else {
    s.scheme = parse_method(inline_method);
  }
  if (!(s.h > 0.0)) throw std::invalid_argument("scenario h must be positive");
  if (!(s.omega > 0.0)) throw std::invalid_argument("scenario omega must be positive");
  if (s.stride == 0) throw std::invalid_argument("scenario stride must be at least 1");
  if (s.steps < static_cast<std::size_t>(window_length(s.scheme))) {
    throw std::invalid_argument("scenario steps must be at least the method step count");
  }
  return s;
}

std::string to_text(const Scenario& s) {
  std::string out = "scenario: " + s.name + "\n";
  const auto& registry = builtin_registry();
  std::visit(
      [&](const auto& scheme) {
        using T = std::decay_t<decltype(scheme)>;
        if (const auto it = registry.find(scheme.name); it != registry.end() && it->second == Scheme(scheme)) {
          out += "method: " + scheme.name + "\n";
          return;
        }
        if constexpr (std::is_same_v<T, MethodSpec>) {
          out += to_text(scheme);
        } else if constexpr (std::is_same_v<T, PredictorCorrector>) {
          out += "predictor: " + scheme.predictor.name + "\n";
          out += "corrector: " + scheme.corrector.name + "\n";
          out += "pc-mode: " + std::string(to_string(scheme.mode)) + "\n";
        } else {
          out += "partition-q: " + scheme.q_method.name + "\n";
          out += "partition-p: " + scheme.p_method.name + "\n";
          out += "swap-partition: false\n";
        }
      },
      s.scheme);
  out += "system: " + s.system + "\n";
  out += "omega: " + round_trip(s.omega) + "\n";
  out += "h: " + round_trip(s.h) + "\n";
  out += fmt::format("steps: {}\n", s.steps);
  out += "p0: " + round_trip(s.p0) + "\n";
  out += "q0: " + round_trip(s.q0) + "\n";
  out += "starter: " + std::string(to_string(s.starter)) + "\n";
  std::string outputs;
  if (s.phase_output) outputs += " phase";
  if (s.energy_output) outputs += " energy";
  if (s.error_output) outputs += " error";
  out += "outputs:" + outputs + "\n";
  out += fmt::format("stride: {}\n", s.stride);
  return out;
}

std::string_view to_string(Behavior behavior) {
  switch (behavior) {
    case Behavior::bounded: return "bounded";
    case Behavior::drifting: return "drifting";
    case Behavior::exploding: return "exploding";
  }
  return "drifting";
}

GradientField scenario_field(const Scenario& s) {
  if (s.system == "sho") return sho(s.omega).field();
  if (s.system == "pendulum") return pendulum(s.omega);
  throw std::invalid_argument("unknown scenario system '" + s.system + "'");
}

RunSummary run_scenario(const Scenario& s, const std::filesystem::path& outdir, const BehaviorThresholds& thresholds) {
  return run_scenario(s, scenario_field(s), outdir, thresholds);
}

RunSummary run_scenario(const Scenario& s, const GradientField& field, const std::filesystem::path& outdir,
                        const BehaviorThresholds& thresholds) {
  const StateVector y0 = geostep::initial_state(field.dof(), s.p0, s.q0);
  const bool files = !outdir.empty();
  const bool with_error = field.has_exact_flow();

  RunSummary summary;
  summary.scenario = s.name;
  summary.requested_steps = s.steps;
  std::visit(
      [&](const auto& scheme) {
        using T = std::decay_t<decltype(scheme)>;
        if constexpr (std::is_same_v<T, MethodSpec>) {
          summary.notes = scheme.warnings;
        } else if constexpr (std::is_same_v<T, PredictorCorrector>) {
          summary.notes = scheme.corrector.warnings;
        } else {
          summary.notes = scheme.q_method.warnings;
          summary.notes.insert(summary.notes.end(), scheme.p_method.warnings.begin(), scheme.p_method.warnings.end());
        }
      },
      s.scheme);

  std::unique_ptr<CsvFile> phase;
  std::unique_ptr<CsvFile> energy;
  std::unique_ptr<CsvFile> error;
  if (files) {
    std::filesystem::create_directories(outdir);
    const auto dof = field.dof();
    std::string header = "step,t";
    for (Eigen::Index i = 1; i <= dof; ++i) header += fmt::format(",q{}", i);
    for (Eigen::Index i = 1; i <= dof; ++i) header += fmt::format(",p{}", i);
    if (s.phase_output) {
      summary.files.push_back(outdir / (s.name + "_phase.csv"));
      phase = std::make_unique<CsvFile>(summary.files.back(), header);
    }
    if (s.energy_output) {
      summary.files.push_back(outdir / (s.name + "_energy.csv"));
      energy = std::make_unique<CsvFile>(summary.files.back(), "step,t,H,dH");
    }
    if (s.error_output && with_error) {
      summary.files.push_back(outdir / (s.name + "_error.csv"));
      error = std::make_unique<CsvFile>(summary.files.back(), "step,t,error");
    }
  }

  EnergyDriftAccumulator acc;
  const double r0 = y0.squaredNorm();
  SolverConfig cfg;
  cfg.starter = s.starter;
  std::size_t start_count = static_cast<std::size_t>(window_length(s.scheme));
  const auto observer = [&](std::size_t i, double t, const StateVector& y, double e) {
    acc.add(t, e);
    if (i == 0) summary.initial_energy = e;
    summary.final_energy = e;
    summary.t_final = t;
    if (!summary.explode_index && std::abs(e) > thresholds.explode_factor * std::abs(acc.initial())) {
      summary.explode_index = i;
    }
    if (r0 > 0.0) {
      summary.max_radius_deviation = std::max(summary.max_radius_deviation, std::abs(y.squaredNorm() / r0 - 1.0));
    }
    std::optional<double> err;
    if (with_error) {
      err = (y - field.exact(y0, t)).norm();
      summary.final_error = err;
      if (i < start_count) summary.max_starter_error = std::max(summary.max_starter_error.value_or(0.0), *err);
    }
    if (i % s.stride != 0) return;
    if (phase) {
      std::string line = fmt::format("{},{}", i, real(t));
      for (Eigen::Index c = 0; c < y.size(); ++c) line += "," + real(y[c]);
      phase->row(line);
    }
    if (energy) energy->row(fmt::format("{},{},{},{}", i, real(t), real(e), real(e - acc.initial())));
    if (error) error->row(fmt::format("{},{},{}", i, real(t), real(*err)));
  };

  const auto status = integrate_streaming(s.scheme, field, y0, s.h, s.steps, cfg, observer);
  summary.recorded = status.recorded;
  summary.start_count = status.start_count;
  summary.drift = acc.result();
  summary.max_energy = acc.max_energy();
  if (status.aborted_at) {
    summary.aborted_at = status.aborted_at;
    summary.abort_message = status.message;
    const std::string trailer = fmt::format("# aborted at step {}", *status.aborted_at);
    for (auto* f : {phase.get(), energy.get(), error.get()}) {
      if (f) f->row(trailer);
    }
  }
  for (auto* f : {phase.get(), energy.get(), error.get()}) {
    if (f) f->close();
  }
  if (files) {
    const auto path = outdir / (s.name + "_summary.txt");
    std::ofstream out(path);
    out << format_summary(summary, thresholds);
    if (!out) throw std::runtime_error("write failure on '" + path.string() + "'");
    summary.files.push_back(path);
  }
  return summary;
}

std::vector<RunSummary> run_scenarios(const std::vector<Scenario>& scenarios, const std::filesystem::path& outdir,
                                      const BehaviorThresholds& thresholds) {
  std::vector<std::future<RunSummary>> jobs;
  jobs.reserve(scenarios.size());
  for (const auto& s : scenarios) {
    jobs.push_back(std::async(std::launch::async, [&s, &outdir, &thresholds] { return run_scenario(s, outdir, thresholds); }));
  }
  std::vector<RunSummary> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

Behavior classify(const RunSummary& summary, const BehaviorThresholds& thresholds) {
  const double h0 = std::abs(summary.initial_energy);
  if (summary.explode_index) return Behavior::exploding;
  if (summary.aborted_at) return Behavior::exploding;
  const double limit = thresholds.bounded_fraction * h0;
  if (summary.drift.max_deviation <= limit && std::abs(summary.drift.slope) * summary.t_final <= limit) {
    return Behavior::bounded;
  }
  return Behavior::drifting;
}

LongRunReport long_run_report(const Scenario& scenario, const BehaviorThresholds& thresholds) {
  if (scenario.steps < 10000) {
    throw std::invalid_argument(
        fmt::format("long-run report needs at least 10^4 steps, scenario '{}' has {}", scenario.name, scenario.steps));
  }
  LongRunReport r;
  r.summary = run_scenario(scenario, {}, thresholds);
  r.behavior = classify(r.summary, thresholds);
  return r;
}

std::string format_summary(const RunSummary& s, const BehaviorThresholds& thresholds) {
  std::ostringstream out;
  out << "scenario: " << s.scenario << '\n';
  out << "requested_steps: " << s.requested_steps << '\n';
  out << "recorded: " << s.recorded << '\n';
  out << "start_count: " << s.start_count << '\n';
  out << "status: " << (s.aborted_at ? fmt::format("aborted at step {}", *s.aborted_at) : std::string("completed"))
      << '\n';
  if (s.aborted_at) out << "abort_reason: " << s.abort_message << '\n';
  out << "H0: " << real(s.initial_energy) << '\n';
  out << "final_H: " << real(s.final_energy) << '\n';
  out << "max_H: " << real(s.max_energy) << '\n';
  out << "max_deviation: " << real(s.drift.max_deviation) << '\n';
  out << "slope: " << real(s.drift.slope) << '\n';
  out << "max_radius_deviation: " << real(s.max_radius_deviation) << '\n';
  if (s.explode_index) out << "explode_step: " << *s.explode_index << '\n';
  if (s.final_error) out << "final_error: " << real(*s.final_error) << '\n';
  if (s.max_starter_error) out << "max_starter_error: " << real(*s.max_starter_error) << '\n';
  if (s.requested_steps >= 10000) out << "behavior: " << to_string(classify(s, thresholds)) << '\n';
  for (const auto& n : s.notes) out << "note: " << n << '\n';
  return out.str();
}

}  // namespace geostep

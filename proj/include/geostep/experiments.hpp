#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geostep/geometry.hpp"
#include "geostep/integrators.hpp"

namespace geostep {

/// One reproducible run: scheme, oscillator parameters, grid and outputs.
/// The initial value is stored as the (p₀, q₀) pair and mapped to the
/// (q, p) state ordering when the run starts.
struct Scenario {
  std::string name;
  Scheme scheme;
  std::string system = "sho";
  double omega = 1.0;
  double h = 0.1;
  std::size_t steps = 1000;
  double p0 = 0.0;
  double q0 = 1.0;
  Starter starter = Starter::rk4;
  bool phase_output = true;
  bool energy_output = true;
  bool error_output = true;
  /// Every `stride`-th row is written; summaries use every step.
  std::size_t stride = 1;

  [[nodiscard]] StateVector initial_state() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// fig1-explicit-euler, fig1-implicit-euler, fig2-m1, fig2-m1-corrected,
/// fig3-pc, fig4-partitioned, fig4-partitioned-corrected.
std::vector<Scenario> builtin_scenarios();
/// Scenarios behind a figure number 1–4; throws std::invalid_argument otherwise.
std::vector<Scenario> figure_scenarios(int figure);

/// Name used for a partitioned pair built from two registry methods.
std::string partitioned_name(std::string_view q_method, std::string_view p_method);

Scenario parse_scenario(std::string_view text);
std::string to_text(const Scenario& scenario);

enum class Behavior { bounded, drifting, exploding };
std::string_view to_string(Behavior behavior);

struct BehaviorThresholds {
  /// Bounded when max |H − H₀| and |slope|·t_final are both ≤ this · |H₀|.
  double bounded_fraction = 0.01;
  /// Exploding once H exceeds this · |H₀|.
  double explode_factor = 1e3;
};

struct RunSummary {
  std::string scenario;
  std::size_t requested_steps = 0;
  std::size_t recorded = 0;
  std::size_t start_count = 0;
  std::optional<std::size_t> aborted_at;
  std::string abort_message;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_energy = 0.0;
  EnergyDrift drift;
  /// First grid index with H > explode_factor · H₀.
  std::optional<std::size_t> explode_index;
  /// max_j | ‖y_j‖² / ‖y_0‖² − 1 |
  double max_radius_deviation = 0.0;
  std::optional<double> final_error;
  std::optional<double> max_starter_error;
  double t_final = 0.0;
  std::vector<std::string> notes;
  std::vector<std::filesystem::path> files;
};

/// Streams the run into CSVs under `outdir` (created if missing) named
/// `<scenario>_phase.csv`, `<scenario>_energy.csv`, `<scenario>_error.csv`,
/// plus `<scenario>_summary.txt`. Pass an empty path to skip all file output.
/// Stepper failures are recorded in the summary and as a trailing
/// `# aborted at step N` line; the partial output is kept.
RunSummary run_scenario(const Scenario& scenario, const std::filesystem::path& outdir,
                        const BehaviorThresholds& thresholds = {});
/// Same, on an explicit field (its dof sets the state size); `scenario.system`
/// is ignored.
RunSummary run_scenario(const Scenario& scenario, const GradientField& field, const std::filesystem::path& outdir,
                        const BehaviorThresholds& thresholds = {});

/// Runs independent scenarios concurrently; results keep the input order.
std::vector<RunSummary> run_scenarios(const std::vector<Scenario>& scenarios, const std::filesystem::path& outdir,
                                      const BehaviorThresholds& thresholds = {});

Behavior classify(const RunSummary& summary, const BehaviorThresholds& thresholds = {});

struct LongRunReport {
  RunSummary summary;
  Behavior behavior = Behavior::bounded;
};

/// Runs without file output and classifies; requires steps ≥ 10⁴.
LongRunReport long_run_report(const Scenario& scenario, const BehaviorThresholds& thresholds = {});

std::string format_summary(const RunSummary& summary, const BehaviorThresholds& thresholds = {});

/// Scheme factory for scenarios on the named system ("sho" or "pendulum").
GradientField scenario_field(const Scenario& scenario);

}  // namespace geostep

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geostep/experiments.hpp"
#include "geostep/registry.hpp"
#include "geostep/text_format.hpp"

using namespace geostep;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("geostep-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::vector<std::string>* comments = nullptr) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Scenario find(const std::string& name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  FAIL("no scenario " << name);
  return {};
}

}  // namespace

TEST_CASE("built-in scenarios") {
  const auto all = builtin_scenarios();
  std::vector<std::string> names;
  for (const auto& s : all) {
    names.push_back(s.name);
    CHECK(s.h == 0.1);
    CHECK(s.p0 == 0.0);
    CHECK(s.q0 == 1.0);
    CHECK(s.omega == 1.0);
    CHECK(s.initial_state()[0] == 1.0);
    CHECK(s.initial_state()[1] == 0.0);
  }
  CHECK(names == std::vector<std::string>{"fig1-explicit-euler", "fig1-implicit-euler", "fig2-m1", "fig2-m1-corrected",
                                          "fig3-pc", "fig4-partitioned", "fig4-partitioned-corrected"});
  CHECK(find("fig4-partitioned").steps == 1000000);
  CHECK(find("fig3-pc").steps == 1000000);
  const auto fig4 = find("fig4-partitioned");
  const auto& pair = std::get<PartitionedPair>(fig4.scheme);
  CHECK(pair.q_method.name == "m3-line1");
  CHECK(pair.p_method.name == "m3-line2-as-printed");
  CHECK(figure_scenarios(2).size() == 2);
  CHECK_THROWS_AS(figure_scenarios(9), std::invalid_argument);
}

TEST_CASE("scenario text round-trips") {
  auto all = builtin_scenarios();
  Scenario custom{.name = "custom", .scheme = builtin_scheme("am4")};
  custom.system = "pendulum";
  custom.omega = 1.7;
  custom.h = 0.013;
  custom.steps = 12345;
  custom.p0 = -0.25;
  custom.q0 = 1.0 / 3.0;
  custom.starter = Starter::exact;
  custom.error_output = false;
  custom.stride = 7;
  all.push_back(custom);

  Scenario inline_method{.name = "inline",
                         .scheme = make_method("mine", {-1, 0, 1}, {Rational(1, 3), Rational(4, 3), Rational(1, 3)})};
  all.push_back(inline_method);

  Scenario pec{.name = "pec",
               .scheme = make_predictor_corrector("pc(ab4,am4)", builtin_method("ab4"), builtin_method("am4"),
                                                  PcMode::pec)};
  all.push_back(pec);

  for (const auto& s : all) {
    CAPTURE(s.name);
    const auto text = to_text(s);
    CHECK(parse_scenario(text) == s);
    CHECK(to_text(parse_scenario(text)) == text);
  }
}

TEST_CASE("scenario swap flag exchanges the partition") {
  const auto s = parse_scenario(
      "scenario: sw\npartition-q: m3-line1\npartition-p: m3b-corrected\nswap-partition: true\nsteps: 10\n");
  const auto& pair = std::get<PartitionedPair>(s.scheme);
  CHECK(pair.q_method.name == "m3b-corrected");
  CHECK(pair.p_method.name == "m3-line1");
}

TEST_CASE("scenario validation") {
  CHECK_THROWS(parse_scenario("method: leapfrog\n"));
  CHECK_THROWS(parse_scenario("scenario: x\nmethod: leapfrog\nh: 0\n"));
  CHECK_THROWS(parse_scenario("scenario: x\nmethod: leapfrog\nsteps: 1\n"));
  CHECK_THROWS(parse_scenario("scenario: x\nmethod: leapfrog\ncolour: red\n"));
  CHECK_THROWS(parse_scenario("scenario: x\n"));
  CHECK_THROWS(parse_scenario("scenario: x\nmethod: leapfrog\npredictor: ab4\ncorrector: am4\n"));
}

TEST_CASE("explicit Euler energies follow the geometric identity") {
  const auto dir = scratch("fig1");
  const auto summary = run_scenario(find("fig1-explicit-euler"), dir);
  const auto rows = read_csv(dir / "fig1-explicit-euler_energy.csv");
  REQUIRE(rows.size() == 1001);
  CHECK(rows[0] == std::vector<std::string>{"step", "t", "H", "dH"});
  for (std::size_t j = 1; j < rows.size(); ++j) {
    const double h = std::stod(rows[j][2]);
    CHECK(std::abs(h / (std::pow(1.01, static_cast<double>(j - 1)) * 0.5) - 1.0) <= 1e-9);
  }
  CHECK(summary.recorded == 1000);
  CHECK(summary.explode_index == std::optional<std::size_t>(695));
}

TEST_CASE("implicit Euler energies decrease monotonically") {
  const auto dir = scratch("fig1i");
  run_scenario(find("fig1-implicit-euler"), dir);
  const auto rows = read_csv(dir / "fig1-implicit-euler_energy.csv");
  for (std::size_t j = 2; j < rows.size(); ++j) CHECK(std::stod(rows[j][2]) < std::stod(rows[j - 1][2]));
}

TEST_CASE("steps = k writes only starter rows") {
  const auto dir = scratch("boundary");
  auto s = find("fig3-pc");
  s.steps = 4;
  s.stride = 1;
  const auto summary = run_scenario(s, dir);
  CHECK(summary.recorded == 4);
  CHECK(read_csv(dir / "fig3-pc_phase.csv").size() == 5);
  CHECK(read_csv(dir / "fig3-pc_error.csv").size() == 5);
}

TEST_CASE("starter rows carry only starter error") {
  auto s = find("fig2-m1-corrected");
  s.steps = 50;
  const auto summary = run_scenario(s, {});
  const auto field = sho(1.0).field();
  const auto start = rk4_start(field, s.initial_state(), s.h, 2);
  double expected = 0.0;
  for (std::size_t j = 0; j < start.size(); ++j) {
    expected = std::max(expected, (start[j] - sho_exact(1.0, s.initial_state(), s.h * j)).norm());
  }
  REQUIRE(summary.max_starter_error.has_value());
  CHECK(*summary.max_starter_error == expected);

  s.starter = Starter::exact;
  CHECK(*run_scenario(s, {}).max_starter_error <= 1e-15);
}

TEST_CASE("stride decimates rows but not statistics") {
  const auto dir = scratch("stride");
  auto s = find("fig1-explicit-euler");
  s.stride = 10;
  const auto decimated = run_scenario(s, dir);
  CHECK(read_csv(dir / "fig1-explicit-euler_phase.csv").size() == 101);
  const auto full = run_scenario(find("fig1-explicit-euler"), {});
  CHECK(decimated.drift.max_deviation == full.drift.max_deviation);
  CHECK(decimated.drift.slope == full.drift.slope);
}

TEST_CASE("aborted runs keep partial output with a trailer") {
  const auto dir = scratch("abort");
  const auto summary = run_scenario(find("fig4-partitioned"), dir);
  REQUIRE(summary.aborted_at.has_value());
  CHECK(summary.explode_index.has_value());
  std::vector<std::string> comments;
  const auto rows = read_csv(dir / "fig4-partitioned_energy.csv", &comments);
  REQUIRE(comments.size() == 1);
  CHECK(comments[0] == "# aborted at step " + std::to_string(*summary.aborted_at));
  const auto text = slurp(dir / "fig4-partitioned_energy.csv");
  CHECK(text.substr(text.size() - comments[0].size() - 1) == comments[0] + "\n");
  CHECK(classify(summary) == Behavior::exploding);
}

TEST_CASE("CSV rows match the header arity") {
  const auto dir = scratch("arity");
  auto s = find("fig3-pc");
  s.steps = 2000;
  run_scenario(s, dir);
  for (const char* file : {"fig3-pc_phase.csv", "fig3-pc_energy.csv", "fig3-pc_error.csv"}) {
    const auto rows = read_csv(dir / file);
    for (const auto& r : rows) CHECK(r.size() == rows[0].size());
  }
}

TEST_CASE("re-running a scenario is byte-identical") {
  const auto a = scratch("det-a");
  const auto b = scratch("det-b");
  auto s = find("fig3-pc");
  s.steps = 5000;
  run_scenarios({s, find("fig1-implicit-euler")}, a);
  run_scenarios({s, find("fig1-implicit-euler")}, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
}

TEST_CASE("long-run classification") {
  auto euler = find("fig1-explicit-euler");
  euler.steps = 10000;
  const auto r = long_run_report(euler);
  CHECK(r.behavior == Behavior::exploding);
  // smallest j with 1.01^j > 10^3
  const auto crossing = static_cast<std::size_t>(std::ceil(std::log(1000.0) / std::log(1.01)));
  CHECK(r.summary.explode_index == std::optional<std::size_t>(crossing));

  euler.steps = 9999;
  CHECK_THROWS_AS(long_run_report(euler), std::invalid_argument);

  auto midpoint = Scenario{.name = "mid", .scheme = builtin_scheme("midpoint")};
  midpoint.steps = 20000;
  CHECK(long_run_report(midpoint).behavior == Behavior::bounded);
}

TEST_CASE("classify uses the configured thresholds") {
  RunSummary s;
  s.initial_energy = 0.5;
  s.t_final = 100.0;
  s.drift = {0.004, 0.0};
  CHECK(classify(s) == Behavior::bounded);
  s.drift = {0.006, 0.0};
  CHECK(classify(s) == Behavior::drifting);
  CHECK(classify(s, {.bounded_fraction = 0.02}) == Behavior::bounded);
  s.drift = {0.001, 1e-4};
  CHECK(classify(s) == Behavior::drifting);
  s.explode_index = 10;
  CHECK(classify(s) == Behavior::exploding);
}

TEST_CASE("summary text") {
  auto s = find("fig2-m1");
  s.steps = 100;
  const auto text = format_summary(run_scenario(s, {}));
  CHECK(text.find("scenario: fig2-m1\n") != std::string::npos);
  CHECK(text.find("note: ") != std::string::npos);
  CHECK(text.find("behavior:") == std::string::npos);
}

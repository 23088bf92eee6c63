#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "zklab/config.hpp"
#include "zklab/csv.hpp"
#include "zklab/error.hpp"
#include "zklab/experiments.hpp"
#include "zklab/spectral.hpp"

using namespace zkl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zklab_test_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised for " << text);
  return ErrorKind::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig small(Experiment e, const fs::path& dir) {
  ExperimentConfig c;
  c.experiment = e;
  c.grid = GridSpec{2, {32, 32}, {40.0, 40.0}};
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const ExperimentConfig d = parse_config_string("{}");
  CHECK(d == ExperimentConfig{});
  CHECK(d.experiment == Experiment::Converge);
  CHECK(d.grid.points == std::vector<int>{128, 128});
  CHECK(d.eps_sweep == std::vector<double>{0.2, 0.1, 0.05});

  const ExperimentConfig c =
      parse_config_string(R"({"experiment": "alpha-limit", "plasma": {"eps": 0.05, "alpha": 0.5, "isothermal": true},
                              "grid": {"dim": 1, "points": [512], "lengths": [60]}, "seed": 7})");
  CHECK(c.experiment == Experiment::AlphaLimit);
  CHECK(c.plasma.eps == 0.05);
  CHECK(c.plasma.alpha == 0.5);
  CHECK(c.plasma.isothermal);
  CHECK(c.plasma.a == 1.0);
  CHECK(c.grid.dim == 1);
  CHECK(c.seed == 7);
}

TEST_CASE("config rejects bad input") {
  CHECK(kind_of(R"({"plasma": {"foo": 1}})") == ErrorKind::ParseError);
  CHECK(message_of(R"({"plasma": {"foo": 1}})").find("plasma.foo") != std::string::npos);
  CHECK(kind_of(R"({"bogus": 1})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"experiment": "nope"})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"dt": "small"})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"samples": 2.5})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"seed": -1})") == ErrorKind::ParseError);
  CHECK(kind_of("{not json") == ErrorKind::ParseError);

  CHECK(kind_of(R"({"eps_sweep": [0.1, 0.2]})") == ErrorKind::ValidationError);
  CHECK(message_of(R"({"eps_sweep": [0.1, 0.2]})").find("eps_sweep: ") != std::string::npos);
  CHECK(kind_of(R"({"grid": {"points": [48, 48]}})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"grid": {"dim": 3}})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"plasma": {"eps": 0}})") == ErrorKind::ValidationError);

  CHECK_THROWS_AS(parse_config("/nonexistent/zklab.json"), Error);
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.experiment = Experiment::Zk;
  c.grid = GridSpec{3, {16, 32, 8}, {10.0, 20.0, 5.5}};
  c.plasma = {0.03, 2.0, 0.25, 0.4, true};
  c.eps_sweep = {0.3, 0.15};
  c.norms = {0.0, 1.0, 2.5};
  c.initial.kind = "soliton";
  c.initial.speed = 0.7;
  c.seed = 123456789012345ULL;
  c.output_dir = "elsewhere";
  const std::string text = to_json(c).dump();
  CHECK(parse_config_string(text) == c);
  CHECK(to_json(parse_config_string(text)).dump() == text);
}

TEST_CASE("csv format") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");

  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  {
    CsvWriter w((dir / "a.csv").string(), "hello", {"x", "y"});
    w.row({1.0, 0.5});
    w.row_text({"a", "b"});
    CHECK_THROWS_AS(w.row({1.0}), Error);
  }
  CHECK(slurp(dir / "a.csv") == "# hello\nx,y\n1,0.5\na,b\n");
  fs::remove_all(dir);
}

TEST_CASE("power-law fit and band limiting") {
  const PowerFit f = fit_power_law({0.2, 0.1, 0.05}, {3 * std::pow(0.2, 1.5), 3 * std::pow(0.1, 1.5), 3 * std::pow(0.05, 1.5)});
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.points == 3);
  CHECK(std::isnan(fit_power_law({0.1}, {1.0}).slope));
  CHECK(fit_power_law({0.2, 0.1, -1.0}, {1.0, 0.5, 2.0}).points == 2);

  const GridPtr g = GridSpec{2, {32, 32}, {2 * M_PI, 2 * M_PI}}.make();
  const ScalarField low = ScalarField::sample(g, [](double x, double y, double) { return std::cos(3 * x) * std::sin(2 * y); });
  const ScalarField high = ScalarField::sample(g, [](double x, double, double) { return std::cos(12 * x); });
  CHECK(max_abs(band_limit(low + high, 0.25) - low) < 1e-14);
  CHECK(max_abs(band_limit(low, 1.0) - low) < 1e-14);
}

TEST_CASE("zero profile skips fitted studies") {
  const fs::path dir = scratch("zero");
  ExperimentConfig c = small(Experiment::Consistency, dir);
  c.initial.kind = "zero";
  const ConsistencyReport r = run_consistency(c);
  CHECK(r.skipped);
  CHECK(r.fits.empty());
  REQUIRE(r.gates.size() == 1);
  CHECK(r.gates[0].pass);

  c.experiment = Experiment::Converge;
  const ConvergenceReport v = run_convergence(c);
  CHECK(v.skipped);
  CHECK(v.gates.size() == 1);
  CHECK(v.gates[0].pass);
  fs::remove_all(dir);
}

TEST_CASE("experiments write outputs and summary") {
  const fs::path dir = scratch("run");
  ExperimentConfig c = small(Experiment::Dispersion, dir);
  c.lattice = 6;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.passed());
  CHECK(fs::exists(dir / "dispersion.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["experiment"] == "dispersion");
  CHECK(summary["passed"] == true);
  CHECK(parse_config_json(summary["config"]) == c);
  const std::string csv = slurp(dir / "dispersion.csv");
  CHECK(csv.rfind("# zklab ", 0) == 0);
  fs::remove_all(dir);

  ExperimentConfig bad = c;
  bad.dt = -1.0;
  CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path dir = scratch("determinism");
  ExperimentConfig c = small(Experiment::Zk, dir);
  c.T1 = 0.2;
  run_experiment(c);
  const std::string first = slurp(dir / "zk_invariants.csv");
  const std::string field = slurp(dir / "zk_final.zkf");
  const std::string summary = slurp(dir / "summary.json");
  run_experiment(c);
  CHECK(!first.empty());
  CHECK(slurp(dir / "zk_invariants.csv") == first);
  CHECK(slurp(dir / "zk_final.zkf") == field);
  CHECK(slurp(dir / "summary.json") == summary);
  fs::remove_all(dir);
}

TEST_CASE("small simulate and poisson runs pass their gates") {
  const fs::path dir = scratch("small");
  ExperimentConfig c = small(Experiment::Simulate, dir);
  c.horizon = 0.5;
  CHECK(run_experiment(c).passed());
  c.experiment = Experiment::Poisson;
  c.samples = 3;
  CHECK(run_experiment(c).passed());
  fs::remove_all(dir);
}

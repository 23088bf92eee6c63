// Acceptance suite: one PASS/FAIL line per criterion.
//
//   zklab_acceptance [--out DIR] [--threads N] [--expect-fail 3,8]
//
// Exit status is 0 when the failing set is exactly the --expect-fail list
// (empty by default), 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zklab/csv.hpp"
#include "zklab/error.hpp"
#include "zklab/experiments.hpp"
#include "zklab/grid.hpp"
#include "zklab/spectral.hpp"

namespace fs = std::filesystem;
using namespace zkl;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool all_pass(const std::vector<Gate>& gates) {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

const Gate& gate(const std::vector<Gate>& gates, const std::string& name) {
  for (const auto& g : gates)
    if (g.name == name) return g;
  throw Error(ErrorKind::InvalidArgument, "no gate named " + name);
}

void print_gates(const std::vector<Gate>& gates) {
  for (const auto& g : gates)
    std::cout << "    " << (g.pass ? "ok   " : "fail ") << g.name << " value=" << format_double(g.value)
              << " limit=" << format_double(g.limit) << (g.detail.empty() ? "" : " " + g.detail) << "\n";
}

double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_diff(a[i], b[i]));
  return m;
}

double profile_diff(const ProfileSet& a, const ProfileSet& b) {
  double m = 0.0;
  for (auto f : {&ProfileSet::n1, &ProfileSet::n2, &ProfileSet::phi1, &ProfileSet::phi2, &ProfileSet::vx1,
                 &ProfileSet::vx2, &ProfileSet::vy1, &ProfileSet::vy2, &ProfileSet::vz1, &ProfileSet::vz2,
                 &ProfileSet::ndot})
    m = std::max(m, max_diff(a.*f, b.*f));
  return m;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Suite {
 public:
  Suite(fs::path root, int threads) : root_(std::move(root)), threads_(threads) {}

  ExperimentConfig base(Experiment e, const std::string& dir) const {
    ExperimentConfig c;
    c.experiment = e;
    c.threads = threads_;
    c.output_dir = (root_ / dir).string();
    return c;
  }

  void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
      o.pass = false;
      o.summary += "; over time budget";
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.summary << " ["
              << fmt(secs) << " s of " << fmt(budget_s) << " s]" << std::endl;
    if (!o.pass) failed_.insert(id);
  }

  const std::set<int>& failed() const { return failed_; }

 private:
  fs::path root_;
  int threads_;
  std::set<int> failed_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zklab acceptance suite"};
  std::string out = "acceptance-out";
  int threads = 1;
  std::vector<int> expect_fail;
  app.add_option("--out", out, "Scratch directory for experiment outputs");
  app.add_option("--threads", threads, "FFT threads")->check(CLI::PositiveNumber);
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  set_fft_threads(threads);
  Suite suite(out, threads);
  PoissonStudy poisson;

  suite.run(1, "poisson_bounds", 120, [&] {
    ExperimentConfig c = suite.base(Experiment::Poisson, "c1");
    c.samples = 50;
    c.sample_amplitude = 0.6;
    poisson = run_poisson(c);
    double ninf = 0.0;
    for (const auto& s : poisson.samples) ninf = std::max(ninf, s.ninf);
    print_gates(poisson.gates);
    const bool ok = poisson.samples.size() == 50 && ninf <= 0.6 + 1e-12 &&
                    gate(poisson.gates, "poisson.pointwise_bounds").pass &&
                    gate(poisson.gates, "poisson.energy_inequality").pass &&
                    gate(poisson.gates, "poisson.solver_agreement").pass;
    return Outcome{ok, "bound slack " + fmt(poisson.bound_violation) + " (<= 1e-10), energy slack " +
                           fmt(poisson.energy_violation) + " (<= 1e-8), solver gap " +
                           fmt(poisson.max_solver_gap) + " (<= 1e-9), max |n| " + fmt(ninf)};
  });

  suite.run(2, "constant_density", 60, [&] {
    if (poisson.samples.empty()) {
      ExperimentConfig c = suite.base(Experiment::Poisson, "c2");
      c.samples = 0;
      poisson = run_poisson(c);
    }
    const double e = poisson.constant_error;
    return Outcome{e <= 1e-12, "max error " + fmt(e) + " (<= 1e-12) unscaled and eps in {0.2, 0.1, 0.05}"};
  });

  suite.run(3, "inverse_estimate", 60, [&] {
    const GridPtr g = GridSpec{}.make();
    const EstimateStudy st = inverse_estimate_study(g, 1, 20, {1.0, 0.1, 0.01});
    std::cout << "    energy form sqrt(e^{-eps|phi|}|u|^2 + eps|grad u|^2) <= e^{eps|phi|/2}|v|: worst ratio "
              << format_double(st.worst_energy_ratio) << (st.worst_energy_ratio <= 1.0 + 1e-12 ? " (holds)" : " (violated)")
              << "\n";
    return Outcome{st.worst_ratio <= 1.0 + 1e-12,
                   "worst lhs/rhs " + fmt(st.worst_ratio) + " (<= 1) over 20 pairs, eps in {1, 0.1, 0.01}"};
  });

  suite.run(4, "conservation", 300, [&] {
    ExperimentConfig c = suite.base(Experiment::Simulate, "c4_a1");
    c.plasma.eps = 0.1;
    c.plasma.a = 1.0;
    c.horizon = 10.0;
    c.dt = 0.025;
    const SimulateReport h = run_simulate(c);
    c.plasma.a = 0.0;
    c.output_dir = (fs::path(out) / "c4_a0").string();
    const SimulateReport p = run_simulate(c);
    print_gates(h.gates);
    print_gates(p.gates);
    const bool ok = all_pass(h.gates) && all_pass(p.gates);
    return Outcome{ok, "H drift " + fmt(h.H_drift) + " (<= 1e-6, a = 1), impulse drift " + fmt(p.P_drift) +
                           " (<= 1e-8, a = 0), t in [0, 10]"};
  });

  auto zk_config = [&](const std::string& dir) {
    ExperimentConfig c = suite.base(Experiment::Zk, dir);
    c.T1 = 1.0;
    return c;
  };

  suite.run(5, "zk_invariants", 120, [&] {
    const ZKReport r = run_zk(zk_config("c5"));
    print_gates(r.gates);
    return Outcome{all_pass(r.gates), "mean " + fmt(r.mean_drift) + " (<= 1e-13), M " + fmt(r.M_drift) +
                                          " (<= 1e-10), H " + fmt(r.H_drift) + " (<= 1e-8), H oracles " +
                                          fmt(r.gradient_check) + ", " + fmt(r.flux_check)};
  });

  suite.run(6, "dispersion", 60, [&] {
    ExperimentConfig c = suite.base(Experiment::Dispersion, "c6");
    c.lattice = 20;
    const DispersionStudy st = run_dispersion(c);
    print_gates(st.gates);
    return Outcome{all_pass(st.gates), "a = 0 deviation " + fmt(st.a0_deviation) + " (<= 1e-12), equivalent form " +
                                           fmt(st.equivalent_residual) + " (<= 1e-10) over " +
                                           std::to_string(st.roots) + " propagating roots"};
  });

  auto slopes = [](const ConsistencyReport& r) {
    std::ostringstream os;
    for (const auto& f : r.fits) os << f.quantity << "." << format_double(f.s) << "=" << fmt(f.slope) << " ";
    std::string s = os.str();
    if (!s.empty()) s.pop_back();
    return s;
  };

  suite.run(7, "consistency_orders", 600, [&] {
    const ConsistencyReport r = run_consistency(suite.base(Experiment::Consistency, "c7"));
    print_gates(r.gates);
    return Outcome{all_pass(r.gates) && !r.skipped, "slopes " + slopes(r) + " (targets 2, 2, 1.5, 3 +- 0.3; transverse < 1.8)"};
  });

  suite.run(8, "justification_exponent", 1800, [&] {
    const ExperimentConfig c = suite.base(Experiment::Converge, "c8");
    const ConvergenceReport r = run_convergence(c);
    print_gates(r.gates);
    std::string s = "p at t* = 1:";
    for (std::size_t k = 0; k < r.p_fast.size(); ++k) s += " s" + format_double(c.norms[k]) + "=" + fmt(r.p_fast[k].slope);
    s += " (1.5 +- 0.25 / 0.35); growth in t";
    for (const auto& row : r.growth)
      for (const auto& q : row) s += " " + fmt(q.slope);
    s += " (sub-quadratic, within 0.5 of 1)";
    return Outcome{all_pass(r.gates) && !r.skipped, s};
  });

  suite.run(9, "isothermal_reduction", 1200, [&] {
    ExperimentConfig c = suite.base(Experiment::Simulate, "c9");
    const GridPtr g = c.grid.make();
    const ScalarField n1 = initial_profile(c.initial, g, c.plasma, c.seed);
    const double dp = profile_diff(build_cold_profiles(n1, c.plasma.a), build_isothermal_profiles(n1, c.plasma.a, 0.0));

    PlasmaParams cold = c.plasma;
    PlasmaParams iso = cold;
    iso.isothermal = true;
    PlasmaState sc = initial_state(c, cold.eps);
    enforce_poisson(sc, cold);
    PlasmaState si = sc;
    for (int k = 0; k < 100; ++k) {
      sc = step(sc, c.dt, cold);
      si = step(si, c.dt, iso);
    }
    const double dt = std::max({max_diff(sc.n, si.n), max_diff(sc.v, si.v), max_diff(sc.phi, si.phi)});

    ExperimentConfig cc = suite.base(Experiment::Consistency, "c9_consistency");
    cc.plasma.alpha = 0.5;
    cc.plasma.isothermal = true;
    const ConsistencyReport cr = run_consistency(cc);
    print_gates(cr.gates);

    const AlphaLimitReport al = run_alpha_limit(suite.base(Experiment::AlphaLimit, "c9_alpha"));
    print_gates(al.gates);

    std::string dist;
    for (double d : al.distance) dist += " " + fmt(d);
    const bool ok = dp <= 1e-13 && dt <= 1e-12 && all_pass(cr.gates) && !cr.skipped && all_pass(al.gates);
    return Outcome{ok, "profiles " + fmt(dp) + " (<= 1e-13), 100-step trajectories " + fmt(dt) +
                           " (<= 1e-12), alpha = 0.5 slopes " + slopes(cr) + ", alpha-limit distances" + dist};
  });

  suite.run(10, "determinism", 120, [&] {
    const fs::path dir = fs::path(out) / "c5", first = fs::path(out) / "c5_first";
    fs::remove_all(first);
    fs::copy(dir, first);
    run_zk(zk_config("c5"));
    int compared = 0;
    std::string differing;
    for (const auto& e : fs::directory_iterator(first)) {
      const std::string name = e.path().filename().string();
      ++compared;
      if (read_bytes(e.path()) != read_bytes(dir / name)) differing += " " + name;
    }
    return Outcome{compared > 0 && differing.empty(),
                   "zk rerun with identical config, " + std::to_string(compared) + " files compared" +
                       (differing.empty() ? ", all byte-identical" : ", differing:" + differing)};
  });

  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int>& failed = suite.failed();
  std::string list;
  for (int id : failed) list += (list.empty() ? "" : ",") + std::to_string(id);
  std::cout << "acceptance: " << 10 - failed.size() << "/10 passed";
  if (!failed.empty()) std::cout << "; failing " << list;
  if (!expected.empty()) std::cout << (failed == expected ? " (as expected)" : " (expected a different set)");
  std::cout << std::endl;
  return failed == expected ? 0 : 1;
}

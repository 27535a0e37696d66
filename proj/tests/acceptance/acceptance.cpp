// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here and nowhere else. Usage: linopt_acceptance [name-substring ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <fmt/core.h>

#include "compress.hpp"
#include "experiments.hpp"
#include "gaussian.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "sampler.hpp"
#include "walk.hpp"

using namespace linopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

unsigned g_threads = 1;

Subsystem random_subsystem(std::size_t n, Engine& rng) {
  std::vector<std::size_t> modes;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t x = 1; x <= n; ++x) {
    if (coin(rng)) modes.push_back(x);
  }
  if (modes.empty()) modes.push_back(1 + rng() % n);
  if (modes.size() == n) modes.erase(modes.begin() + static_cast<std::ptrdiff_t>(rng() % n));
  return Subsystem::from_one_based(n, modes);
}

// The 500 shared random cases for the route and symmetry checks.
struct RandomCase {
  ComplexMatrix u;
  Subsystem gamma;
  double s;
};

const std::vector<RandomCase>& random_cases() {
  static const std::vector<RandomCase> cases = [] {
    std::vector<RandomCase> out;
    Engine rng = RngStream{2024, 1}.engine();
    std::uniform_int_distribution<std::size_t> half(1, 8), depth(0, 20);
    const double squeezing[] = {0.3, 1.0, 2.0};
    for (std::uint64_t t = 0; t < 500; ++t) {
      const std::size_t n = 2 * half(rng);
      const auto u = sample_circuit(brickwall_geometry(n), depth(rng), RngStream{2024, 100 + t}).u;
      out.push_back({u, random_subsystem(n, rng), squeezing[t % 3]});
    }
    return out;
  }();
  return cases;
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (const auto& c : random_cases()) {
    worst = std::max(worst, std::abs(renyi2_eig(c.u, c.gamma, c.s).value -
                                     renyi2_cov(c.u, c.gamma, c.s).value));
  }
  return {worst <= 1e-8, fmt::format("500 cases, max |eig - cov| = {:.3e} (tol 1e-8)", worst)};
}

Outcome purity_symmetry() {
  double worst = 0.0;
  for (const auto& c : random_cases()) {
    worst = std::max(worst, std::abs(renyi2_eig(c.u, c.gamma, c.s).value -
                                     renyi2_eig(c.u, c.gamma.complement(), c.s).value));
  }
  return {worst <= 1e-8, fmt::format("500 cases, max |S(G) - S(G^c)| = {:.3e} (tol 1e-8)", worst)};
}

Outcome boson_random_walk() {
  std::string detail;
  bool pass = true;
  auto record = [&](const std::string& label, const BosonWalkReport& r) {
    pass = pass && r.max_abs_z <= 5.0;
    detail += fmt::format("{} max|z|={:.2f}; ", label, r.max_abs_z);
  };
  for (std::size_t d : {1, 4, 16}) {
    record(fmt::format("n=8 d={}", d),
           verify_boson_rw(brickwall_geometry(8), d, 100000, RngStream{31, d}, g_threads));
  }
  record("octahedral d=3", verify_boson_rw(octahedral_geometry(), 3, 100000, RngStream{32, 3}, g_threads));
  return {pass, detail + "(tol 5)"};
}

Outcome reflection_equivalence() {
  std::string detail;
  bool pass = true;
  for (std::size_t n : {4, 8}) {
    for (std::size_t d : {6, 20}) {
      const auto r = verify_reflection(n, d, 1000000, 1, RngStream{41, n * 100 + d});
      pass = pass && r.pass;
      detail += fmt::format("n={} d={} tv={:.2e}/bound={:.2e}; ", n, d, r.tv_gap, r.stat_bound);
    }
  }
  return {pass, detail + "(tv <= 5 bound)"};
}

Outcome bound_audit() {
  Engine rng = RngStream{51, 0}.engine();
  std::uniform_int_distribution<std::size_t> half(1, 32), depth(0, 32);
  std::uniform_real_distribution<double> squeeze(0.0, 2.0);
  std::size_t violations = 0, worst_checked = 0, samples = 0;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const std::size_t n = 2 * half(rng);
    const auto sample = sample_circuit(brickwall_geometry(n), depth(rng), RngStream{52, t});
    // alternate contiguous cuts, which carry the light-cone bound, with random subsets
    Subsystem gamma = Subsystem::first_k(n, 1 + rng() % (n - 1));
    if (t % 3 == 1) gamma = gamma.complement();
    if (t % 3 == 2) gamma = random_subsystem(n, rng);
    const auto r = check_bounds(sample, gamma, squeeze(rng));
    violations += r.all_ok() ? 0 : 1;
    worst_checked += r.worst_bound ? 1 : 0;
    ++samples;
  }
  const auto bw = brickwork_d_geometry(4, 2);
  std::size_t bw_violations = 0, boxes = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto sample = sample_circuit(bw, depth(rng) % 9, RngStream{53, t});
    std::vector<std::size_t> modes;
    const std::size_t k1 = 1 + rng() % 4, k2 = 1 + rng() % 4;
    for (std::size_t x = 0; x < 16; ++x) {
      const auto c = brickwork_coordinates(x, 4, 2);
      if (c[0] < k1 && c[1] < k2) modes.push_back(x + 1);
    }
    Subsystem gamma = modes.size() < 16 && t % 2 == 0 ? Subsystem::from_one_based(16, modes)
                                                      : random_subsystem(16, rng);
    const auto r = check_bounds(sample, gamma, squeeze(rng));
    bw_violations += r.all_ok() ? 0 : 1;
    boxes += r.worst_bound ? 1 : 0;
  }
  return {violations == 0 && bw_violations == 0,
          fmt::format("brickwall: {} violations / {} samples ({} with light-cone bound); "
                      "brickwork m=4 D=2: {} violations / 1000 ({} boxes)",
                      violations, samples, worst_checked, bw_violations, boxes)};
}

// Shared by the growth and variance criteria.
const EntropySweep& growth_sweep() {
  static const EntropySweep sweep = [] {
    const std::vector<std::size_t> depths{4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 56, 60, 64};
    return entropy_sweep(brickwall_geometry(100), Subsystem::first_k(100, 50), 1.0, depths, 200,
                         RngStream{61, 0}, g_threads);
  }();
  return sweep;
}

Outcome diffusive_growth() {
  const auto& sw = growth_sweep();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sw.depths.size(); ++i) {
    x.push_back(static_cast<double>(sw.depths[i]));
    y.push_back(sw.stats[i].mean);
  }
  const double slope = loglog_slope(x, y);
  return {slope >= 0.40 && slope <= 0.65,
          fmt::format("n=100 k=50 s=1, 200 trials, d=4..64: exponent {:.3f} (window [0.40, 0.65]); "
                      "mean S2 {:.3f} -> {:.3f}",
                      slope, y.front(), y.back())};
}

Outcome variance_behavior() {
  const auto& sw = growth_sweep();
  auto at = [&](std::size_t d) {
    const auto it = std::find(sw.depths.begin(), sw.depths.end(), d);
    return sw.stats[static_cast<std::size_t>(it - sw.depths.begin())].variance();
  };
  const double v10 = at(10), v60 = at(60);
  const double ratio = std::max(v10, v60) / std::min(v10, v60);
  return {ratio < 3.0, fmt::format("var(d=10)={:.4f}, var(d=60)={:.4f}, ratio {:.2f} (< 3)", v10, v60, ratio)};
}

Outcome haar_saturation() {
  const std::size_t n = 32;
  const auto gamma = Subsystem::first_k(n, 16);
  const auto sw = entropy_sweep(brickwall_geometry(n), gamma, 1.0, {20 * n * n}, 200, RngStream{71, 0}, g_threads);
  const auto haar = haar_reference(n, gamma, 1.0, 2000, RngStream{72, 0}, g_threads);
  const double se = std::hypot(sw.stats[0].stderr_mean(), haar.stderr_value);
  const double gap = std::abs(sw.stats[0].mean - haar.value);
  return {gap <= 3.0 * se, fmt::format("depth {}: circuit {:.4f} vs Haar {:.4f}, gap {:.4f}, 3 combined stderr {:.4f}",
                                       20 * n * n, sw.stats[0].mean, haar.value, gap, 3.0 * se)};
}

Outcome effective_band() {
  const std::size_t n = 100, d = 15;
  const MomentTables t(brickwall_geometry(n), d, 1000, RngStream{81, 0}, g_threads, MomentOptions{false});
  RealMatrix mean(n, n);
  double beyond = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      mean(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = t.uut_abs_mean(x, y);
      if ((x > y ? x - y : y - x) > 4 * d) beyond = std::max(beyond, t.uut_abs_mean(x, y));
    }
  }
  const auto profile = diagonal_profile(mean);
  const auto near = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  const double near_min = *std::min_element(profile.begin(), profile.begin() + near + 1);
  const double edge = profile[4 * d - 2];
  return {beyond == 0.0 && 10.0 * edge <= near_min,
          fmt::format("edge mean (offset {}) {:.3e}, min over offsets <= {} {:.3e}, ratio {:.1f} (>= 10); "
                      "max beyond 4d = {}",
                      4 * d - 2, edge, near, near_min, near_min / edge, beyond)};
}

Outcome kernel_exactness() {
  // One step from y (1-based) lands uniformly on the four Z sites
  // {y-1..y+2} (y odd) or {y-2..y+1} (y even), folded back into {1..n}.
  std::size_t mismatches = 0, checked = 0;
  for (std::size_t n : {4, 8, 100}) {
    const WalkKernel k = step_kernel(brickwall_geometry(n));
    for (std::size_t y = 1; y <= n; ++y) {
      std::vector<int> quarters(n, 0);
      const auto yy = static_cast<std::int64_t>(y);
      const std::int64_t lo = y % 2 == 1 ? yy - 1 : yy - 2;
      for (std::int64_t z = lo; z < lo + 4; ++z) ++quarters[reflect_map(z, n) - 1];
      for (std::size_t x = 0; x < n; ++x) {
        const double p = k.p(static_cast<Eigen::Index>(y - 1), static_cast<Eigen::Index>(x));
        mismatches += (p * 4.0 == static_cast<double>(quarters[x])) ? 0 : 1;
        ++checked;
      }
    }
  }
  return {mismatches == 0, fmt::format("{} kernel entries compared as quarters, {} mismatches", checked, mismatches)};
}

Outcome mixing_scaling() {
  std::vector<double> ratio;
  std::vector<std::size_t> times;
  std::string detail;
  for (std::size_t n : {8, 16, 32}) {
    const double eps = 1.0 / static_cast<double>(n * n);
    const auto t = mixing_time(brickwall_geometry(n), eps, 1000000);
    if (!t) return {false, fmt::format("n={}: t_mix not reached", n)};
    const double envelope = static_cast<double>(n * n) * std::log(std::sqrt(static_cast<double>(n)) / eps);
    times.push_back(*t);
    ratio.push_back(static_cast<double>(*t) / envelope);
    detail += fmt::format("n={} t_mix={} C_n={:.4f}; ", n, *t, ratio.back());
  }
  const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
  const double growth = static_cast<double>(times[1]) / static_cast<double>(times[0]);
  return {spread <= 2.0 && growth >= 2.5 && growth <= 6.0,
          detail + fmt::format("C spread {:.2f} (<= 2), t16/t8 = {:.2f} (in [2.5, 6])", spread, growth)};
}

Outcome meeting_tail() {
  std::vector<double> ratio;
  std::string detail;
  for (std::size_t n : {8, 16}) {
    const auto g = brickwall_geometry(n);
    const double eps = 1.0 / static_cast<double>(n * n);
    const auto layers = meeting_layers_exact(g, eps, 10000000);
    if (!layers) return {false, fmt::format("n={}: tail never reached 1/n^2", n)};
    const std::size_t steps = (*layers + g.layers.size() - 1) / g.layers.size();
    const double ln = std::log(static_cast<double>(n));
    ratio.push_back(static_cast<double>(steps) / (static_cast<double>(n * n) * ln * ln));
    detail += fmt::format("n={} t_meet={} steps C'_n={:.4f}; ", n, steps, ratio.back());
  }
  // Monte Carlo cross-check of the exact tail at n=8
  const auto g8 = brickwall_geometry(8);
  const auto exact8 = *meeting_layers_exact(g8, 1.0 / 64, 100000);
  const MeetingStudy mc(g8, 20000, 4 * exact8, RngStream{91, 0}, g_threads);
  double worst_z = 0.0;
  for (const auto& p : mc.tails(exact8)) {
    const double e = meeting_tail_exact(g8, p.x - 1, p.y - 1, exact8);
    worst_z = std::max(worst_z, std::abs(p.tail - e) / std::sqrt(e * (1 - e) / 20000.0));
  }
  const double spread = std::max(ratio[0], ratio[1]) / std::min(ratio[0], ratio[1]);
  return {spread <= 2.0 && worst_z <= 5.0,
          detail + fmt::format("C' spread {:.2f} (<= 2); MC vs exact tail at n=8 max|z| {:.2f} (<= 5)", spread, worst_z)};
}

Outcome decoupling() {
  const std::size_t n = 8;
  const auto g = brickwall_geometry(n);
  const double eps = 1.0 / static_cast<double>(n * n);
  const auto dd = decoupling_depth(g, eps, eps / n, 1000000);
  const MomentTables t(g, dd.depth, 100000, RngStream{101, 0}, g_threads);
  const double floor = 0.9 / (3.0 * n * n);
  double min_value = 1.0, worst_margin = 1.0;
  for (MomentSide side : {MomentSide::rows, MomentSide::cols}) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          const auto e = t.fourth(side, a, x, y);
          min_value = std::min(min_value, e.value);
          worst_margin = std::min(worst_margin, e.value - (floor - 3.0 * e.stderr_value));
        }
      }
    }
  }
  return {worst_margin >= 0.0,
          fmt::format("d = t_mix {} + t_meet {} = {}; min fourth moment {:.5f}, floor {:.5f}, worst margin {:.2e}",
                      dd.t_mix, dd.t_meet, dd.depth, min_value, floor, worst_margin)};
}

Outcome moment_identity() {
  const std::size_t n = 8;
  const MomentTables t(brickwall_geometry(n), 6, 20000, RngStream{111, 0}, g_threads);
  double worst_z = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const auto gap = t.uut_identity_gap(x, y);
      if (gap.stderr_value > 0.0) worst_z = std::max(worst_z, std::abs(gap.value) / gap.stderr_value);
      else if (std::abs(gap.value) > 1e-14) worst_z = INFINITY;
    }
  }
  return {worst_z <= 5.0, fmt::format("n=8 d=6, 20000 shared samples: max |gap|/sigma = {:.2f} (<= 5)", worst_z)};
}

Outcome reck_exactness() {
  bool pass = true;
  std::string detail;
  for (std::size_t n : {2, 4, 8, 16}) {
    Engine rng = RngStream{121, n}.engine();
    const ComplexMatrix u = haar_unitary(n, rng);
    const auto r = reck_decompose(u);
    const double err = hs_norm(reconstruct(r.gates, n) - u);
    pass = pass && err <= 1e-7 * static_cast<double>(n) && r.gate_count == n * (n - 1) / 2;
    detail += fmt::format("n={} err={:.1e} gates={}; ", n, err, r.gate_count);
  }
  return {pass, detail};
}

Outcome banded_compression() {
  const std::size_t n = 64, d = 64;
  const double kappa = 2.0;
  const auto g = brickwall_geometry(n);
  const auto naive = gate_count_naive(g, d);
  std::vector<ComplexMatrix> seeds;
  for (std::uint64_t s = 0; s < 100; ++s) seeds.push_back(sample_circuit(g, d, RngStream{131, s}).u);
  std::size_t best_ok = 0;
  double best_c = 0.0;
  bool best_close = false;
  std::string detail;
  for (double c : {1.0, 1.5, 2.0}) {
    const std::size_t w = effective_bandwidth(d, kappa, c, n);
    const std::size_t bound = banded_gate_bound(n, w);
    std::size_t ok = 0, close = 0;
    double worst_hs = 0.0;
    for (const auto& u : seeds) {
      const auto r = banded_compress(u, w);
      worst_hs = std::max(worst_hs, r.hs_error);
      close += r.close_diag_ok ? 1 : 0;
      if (r.hs_error <= 0.1 && r.gate_count <= bound && 2 * bound < naive.two_mode) ++ok;
    }
    detail += fmt::format("c={} w={} ok={}/100 max_hs={:.3f} bound={} close_diag={}/100; ", c, w, ok, worst_hs,
                          bound, close);
    if (ok > best_ok || best_c == 0.0) {
      best_ok = ok;
      best_c = c;
      best_close = close == 100;
    }
  }
  return {best_ok >= 95 && best_close,
          detail + fmt::format("best c={} with {} (>= 95), naive/2 = {}", best_c, best_ok, naive.two_mode / 2)};
}

Outcome lipschitz() {
  const std::size_t n = 16;
  const auto gamma = Subsystem::first_k(n, 8);
  const double s = 1.0;
  const double constant = 2.0 * std::sqrt(8.0) * std::pow(std::sinh(2.0 * s), 2);
  Engine rng = RngStream{141, 0}.engine();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> exponent(-6.0, -1.0);
  std::size_t violations = 0;
  double tightest = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const ComplexMatrix u = haar_unitary(n, rng);
    ComplexMatrix noise(n, n);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = {normal(rng), normal(rng)};
    const ComplexMatrix near = u + std::pow(10.0, exponent(rng)) * noise;
    Eigen::JacobiSVD<ComplexMatrix> svd(near, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix v = svd.matrixU() * svd.matrixV().adjoint();  // nearest unitary
    const double lhs = std::abs(renyi2_eig(u, gamma, s).value - renyi2_eig(v, gamma, s).value);
    const double rhs = constant * hs_norm(u - v);
    if (lhs > rhs + 1e-9) ++violations;
    if (rhs > 0) tightest = std::max(tightest, lhs / rhs);
  }
  return {violations == 0,
          fmt::format("1000 pairs, {} violations; largest |dS|/bound = {:.3f}", violations, tightest)};
}

Outcome determinism() {
  const char* configs[] = {
      R"({"kind": "entropy-sweep", "n": 16, "depths": [1, 4, 9], "trials": 600, "seed": 5, "per_trial": true, "haar_trials": 50})",
      R"({"kind": "uut-heatmap", "n": 16, "depths": [2, 3], "trials": 600, "seed": 6})",
      R"({"kind": "walk-check", "n": 8, "depths": [2, 5], "trials": 600, "seed": 7})",
      R"({"kind": "mixing", "n": 16, "seed": 8})",
      R"({"kind": "meeting", "n": 8, "trials": 600, "seed": 9})",
      R"({"kind": "decouple", "n": 6, "trials": 600, "seed": 10})",
      R"({"kind": "compress-sweep", "n": 16, "depths": [8], "trials": 6, "c_bands": [1.0, 2.0], "seed": 11})",
      R"({"kind": "bounds-audit", "n": 16, "depths": [1, 3], "trials": 600, "seed": 12})",
  };
  std::size_t files = 0, differing = 0;
  for (const char* text : configs) {
    const auto c = ExperimentConfig::from_json(nlohmann::json::parse(text));
    const auto a = compute_experiment(c, 1);
    const auto b = compute_experiment(c, 1);
    const auto p = compute_experiment(c, 2);
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      ++files;
      const bool same = b.files.size() == a.files.size() && p.files.size() == a.files.size() &&
                        a.files[i].content == b.files[i].content && a.files[i].content == p.files[i].content;
      differing += same ? 0 : 1;
    }
  }
  return {differing == 0 && files > 0,
          fmt::format("8 experiment kinds, {} CSV files compared over repeat and 1 vs 2 threads, {} differ", files,
                      differing)};
}

}  // namespace

int main(int argc, char** argv) {
  g_threads = resolve_threads(0);
  const std::vector<Criterion> criteria = {
      {"oracle-equivalence", 60, oracle_equivalence},
      {"purity-symmetry", 0, purity_symmetry},
      {"boson-random-walk", 300, boson_random_walk},
      {"reflection-equivalence", 0, reflection_equivalence},
      {"bound-audit", 0, bound_audit},
      {"diffusive-growth", 1800, diffusive_growth},
      {"haar-saturation", 0, haar_saturation},
      {"variance-behavior", 0, variance_behavior},
      {"effective-band", 0, effective_band},
      {"kernel-exactness", 0, kernel_exactness},
      {"mixing-scaling", 0, mixing_scaling},
      {"meeting-tail", 0, meeting_tail},
      {"decoupling", 600, decoupling},
      {"moment-identity", 0, moment_identity},
      {"reck-exactness", 0, reck_exactness},
      {"banded-compression", 0, banded_compression},
      {"lipschitz", 0, lipschitz},
      {"determinism", 0, determinism},
  };
  std::vector<std::string> filters(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!filters.empty() &&
        std::none_of(filters.begin(), filters.end(), [&](const std::string& f) { return c.name.find(f) != std::string::npos; })) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt::format(" [over runtime budget {:.0f} s]", c.budget_seconds);
    }
    failed += o.pass ? 0 : 1;
    fmt::print("{} {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

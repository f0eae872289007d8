// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "../support/densities.hpp"
#include "geobary/geobary.hpp"

using namespace geobary;
using std::numbers::pi;

namespace {

// Pinned tolerances and sizes.
constexpr std::uint64_t kHilbertSeed = 20240601;
constexpr double kHilbertRelTol = 0.10;
constexpr double kHilbertSlopeLo = -1.15, kHilbertSlopeHi = -0.85;
constexpr double kHilbertSeconds = 30.0;

constexpr int kNpcMeasures = 10, kNpcProbes = 1000, kNpcAtoms = 6;
constexpr double kNpcTol = 1e-9, kNpcMaxK3 = 1.01, kNpcSeconds = 10.0;

constexpr int kPcProbes = 200;
constexpr double kPcIdentityTol = 1e-6, kSevenNinthsTol = 1e-9;

constexpr int kExtensionProbes = 200;

constexpr double kBuresUnitTol = 1e-12, kBuresAgreeTol = 1e-9;
constexpr int kBuresPairs = 100;

constexpr int kSinkhornInstances = 50, kSinkhornAtoms = 8;
constexpr double kSinkhornLimitTol = 1e-2, kSinkhornMonoTol = 1e-9;

constexpr int kFdivTriples = 1000, kFdivGrid = 16, kKlInstances = 100;
constexpr double kFdivAmplitude = 0.6, kDfA3Tol = 1e-3;

constexpr double kHandGridTol = 1e-14, kTheorem1Tol = 1e-9;

constexpr int kGridSide = 101, kSweepCount = 8;
constexpr double kSweepHi = 0.2, kSweepLo = 0.02, kSlopeLo = 1.8, kSlopeHi = 2.2, kCoverSeconds = 20.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const Vector kNorth = vec({0, 0, 1});

DiscreteMeasure<Vector> two_point_cap(double colat) {
  return DiscreteMeasure<Vector>::uniform({Sphere::from_spherical(colat, 0), Sphere::from_spherical(colat, pi)});
}

DiscreteMeasure<Vector> four_point_cap(double colat) {
  std::vector<Vector> atoms;
  for (int i = 0; i < 4; ++i) atoms.push_back(Sphere::from_spherical(colat, i * pi / 2));
  return DiscreteMeasure<Vector>::uniform(atoms);
}

template <MetricSpace S>
DiscreteMeasure<typename S::point_type> random_measure(const S& space, Rng& rng, int atoms) {
  std::vector<typename S::point_type> xs;
  std::vector<double> ws;
  double total = 0;
  for (int i = 0; i < atoms; ++i) {
    xs.push_back(space.sample(rng));
    ws.push_back(0.1 + uniform01(rng));
    total += ws.back();
  }
  for (double& w : ws) w /= total;
  return {xs, ws};
}

// ---------------------------------------------------------------------------

Outcome hilbert_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  auto P = DiscreteMeasure<Vector>::uniform({vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({1, 1})});
  const RateExperiment<Euclidean> exp{
      {Euclidean(2), FunctionalSpec::squared_distance(), P, {}}, {16, 64, 256, 1024}, 400, kHilbertSeed};
  const auto res = run_rate_experiment(exp);
  const double secs = seconds_since(t0);
  bool ok = true;
  std::string scaled;
  for (const auto& s : res.fit.per_n) {
    const double v = s.n * s.mean_d2;
    ok = ok && std::abs(v - 0.5) <= kHilbertRelTol * 0.5;
    scaled += (scaled.empty() ? "" : ",") + fmt("%.4f", v);
  }
  ok = ok && res.fit.slope >= kHilbertSlopeLo && res.fit.slope <= kHilbertSlopeHi && secs < kHilbertSeconds;
  return {ok, "n*mean_d2 = {" + scaled + "} (target 0.5), slope " + fmt("%.4f", res.fit.slope) + ", " +
                  fmt("%.2f", secs) + " s"};
}

template <MetricSpace S>
void npc_instances(const S& space, std::uint64_t seed, int& breaches, double& worst_k3, bool& beta_one,
                   double& worst_gap) {
  Rng rng = make_rng(seed);
  for (int m = 0; m < kNpcMeasures; ++m) {
    const auto P = random_measure(space, rng, kNpcAtoms);
    const auto xs = solve_barycenter(space, P).minimizer;
    const int structured = kNpcAtoms * 5;
    const auto probes = vi_probes(space, P, xs, kNpcProbes - structured, derive_seed(seed, m));
    const auto fit = fit_variance_inequality(space, FunctionalSpec::squared_distance(), P, xs, probes);
    for (const auto& p : fit.probes) {
      worst_gap = std::max(worst_gap, p.d2 - p.excess);
      if (p.d2 > p.excess + kNpcTol) ++breaches;
    }
    worst_k3 = std::max(worst_k3, fit.K3_hat);
    beta_one = beta_one && fit.beta_hat == 1.0 && fit.probes.size() == static_cast<std::size_t>(kNpcProbes);
  }
}

Outcome npc_variance() {
  const auto t0 = std::chrono::steady_clock::now();
  int breaches = 0;
  double worst_k3 = 0, worst_gap = -std::numeric_limits<double>::infinity();
  bool beta_one = true;
  npc_instances(Euclidean(2), 1, breaches, worst_k3, beta_one, worst_gap);
  npc_instances(SpiderTree(5), 2, breaches, worst_k3, beta_one, worst_gap);
  const double secs = seconds_since(t0);
  const bool ok = breaches == 0 && worst_k3 <= kNpcMaxK3 && beta_one && secs < kNpcSeconds;
  return {ok, "euclidean + 5-ray spider, 2x10 measures x 1000 probes: " + std::to_string(breaches) +
                  " breaches, max(d2 - excess) " + fmt("%.2e", worst_gap) + ", max K3_hat " + fmt("%.6f", worst_k3) +
                  ", beta_hat = 1 " + (beta_one ? "everywhere" : "NOT everywhere") + ", " + fmt("%.2f", secs) + " s"};
}

Outcome pc_identity() {
  const Sphere s(3);
  Rng rng = make_rng(3);
  std::vector<Vector> probes;
  for (int i = 0; i < kPcProbes; ++i) probes.push_back(s.sample(rng));
  double worst = 0;
  int out_of_range = 0;
  for (const auto& P : {two_point_cap(pi / 4), four_point_cap(pi / 3)}) {
    const auto rep = pc_identity_check(s, P, kNorth, probes);
    worst = std::max(worst, rep.max_abs_error);
    out_of_range += rep.out_of_range;
  }
  const double k = pc_k_value(s, kNorth, Sphere::from_spherical(pi / 4, 0), Sphere::from_spherical(pi / 4, pi / 2));
  const bool ok = worst < kPcIdentityTol && std::abs(k - 7.0 / 9.0) <= kSevenNinthsTol && out_of_range == 0;
  return {ok, "max identity error " + fmt("%.2e", worst) + " over 2 caps x 200 probes, k = " + fmt("%.12f", k) +
                  " (7/9 = 0.777777777778)"};
}

Outcome extendable_geodesics() {
  const Sphere s(3);
  // Two-point cap at colatitude pi/4; its lambda = 1 extensions lie on colatitude pi/2.
  const auto cap = two_point_cap(pi / 4);
  const auto cap_rep = extension_vi_check(s, cap, kNorth, 1.0, vi_probes(s, cap, kNorth, kExtensionProbes, 41));
  bool on_equator = true;
  for (const auto& y : cap_rep.P_lambda.atoms()) on_equator = on_equator && std::abs(s.distance(y, kNorth) - pi / 2) < 1e-12;
  const bool cap_ok = cap_rep.passed() && cap_rep.K3 == 2.0 && on_equator;

  // Uniform on the equator: both poles are barycenters.
  std::vector<Vector> ring;
  for (int i = 0; i < 8; ++i) ring.push_back(Sphere::from_spherical(pi / 2, 2 * pi * i / 8));
  const auto eq = DiscreteMeasure<Vector>::uniform(ring);
  const auto eq_bary = solve_barycenter(s, eq);
  auto eq_probes = vi_probes(s, eq, kNorth, 64, 43);
  eq_probes.push_back(vec({0, 0, -1}));
  const auto eq_rep = extension_vi_check(s, eq, kNorth, 1.0, eq_probes);
  const bool eq_ok = eq_bary.status == BaryStatus::multi_minimizer && !eq_rep.passed();

  // Literal reading: atoms at colatitude pi/2 extend to the south pole.
  const auto lit = two_point_cap(pi / 2);
  const auto lit_rep = extension_vi_check(s, lit, kNorth, 1.0, vi_probes(s, lit, kNorth, 64, 47));

  return {cap_ok && eq_ok,
          "cap: hypothesis two " + std::string(cap_rep.hypothesis_two ? "holds" : "fails") + ", " +
              std::to_string(cap_rep.violations) + "/" + std::to_string(cap_rep.probes.size()) +
              " violations at K3 = 2; equator: " + status_name(eq_bary.status) + ", hypothesis gap " +
              fmt("%.4f", eq_rep.hypothesis_gap) + ", reported as " + (eq_rep.passed() ? "PASSING VI" : "failure") +
              "; atoms at colatitude pi/2: hypothesis two " + (lit_rep.hypothesis_two ? "holds" : "fails") +
              " (gap " + fmt("%.4f", lit_rep.hypothesis_gap) + ")"};
}

Outcome bures_extension() {
  const GaussianBures g1(1);
  const auto a = GaussianBures::make(Vector::Zero(1), Matrix::Constant(1, 1, 1.0));
  const auto b = GaussianBures::make(Vector::Zero(1), Matrix::Constant(1, 1, 0.25));
  const double unit = extension_limit(g1, a, b);
  const GaussianBures g(2);
  Rng rng = make_rng(53);
  double worst = 0;
  int disagreements = 0, finite = 0;
  for (int i = 0; i < kBuresPairs; ++i) {
    const auto x = g.sample(rng), y = g.sample(rng);
    const double rule = extension_limit(g, x, y), direct = bures_extension_limit_bisection(x, y);
    if (std::isinf(rule) || std::isinf(direct)) {
      disagreements += std::isinf(rule) != std::isinf(direct);
      continue;
    }
    ++finite;
    const double err = std::abs(rule - direct) / std::max(1.0, rule);
    worst = std::max(worst, err);
    disagreements += err > kBuresAgreeTol;
  }
  const bool ok = std::abs(unit - 1.0) <= kBuresUnitTol && disagreements == 0;
  return {ok, "slope-1/2 pair lambda_max " + fmt("%.15f", unit) + "; 100 2-D pairs (" + std::to_string(finite) +
                  " finite): " + std::to_string(disagreements) + " disagreements, max rel diff " + fmt("%.2e", worst)};
}

Outcome sinkhorn_limits() {
  const auto grid = GridWasserstein::unit_interval(kSinkhornAtoms);
  const auto& pot = PotentialRegistry::with_defaults().find("sqdist");
  Rng rng = make_rng(61);
  double worst_lo = 0, worst_hi = 0;
  int mono = 0;
  for (int rep = 0; rep < kSinkhornInstances; ++rep) {
    const Vector mu = grid.sample(rng), nu = grid.sample(rng);
    worst_lo = std::max(worst_lo, std::abs(sinkhorn_value(grid, mu, nu, 1e-3).value - grid_w2(grid, mu, nu).cost));
    worst_hi = std::max(worst_hi,
                        std::abs(sinkhorn_value(grid, mu, nu, 1e3).value - interaction_energy(pot, grid, mu, nu)));
    double prev = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double gamma : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3}) {
      const double v = sinkhorn_value(grid, mu, nu, gamma).value;
      ok = ok && v >= prev - kSinkhornMonoTol;
      prev = v;
    }
    mono += !ok;
  }
  const bool ok = worst_lo < kSinkhornLimitTol && worst_hi < kSinkhornLimitTol && mono == 0;
  return {ok, "max |W_g - W2| " + fmt("%.2e", worst_lo) + " at g=1e-3, max |W_g - I| " + fmt("%.2e", worst_hi) +
                  " at g=1e3, monotonicity broken on " + std::to_string(mono) + "/50"};
}

Outcome fdiv_constants() {
  const auto grid = GridWasserstein::unit_interval(kFdivGrid);
  Rng rng = make_rng(71);
  int a2 = 0;
  for (FKind k : {FKind::kl, FKind::chi_squared})
    for (int rep = 0; rep < kFdivTriples; ++rep) {
      const auto a = support::random_cosine_density(rng, 3, kFdivAmplitude);
      const auto b = support::random_cosine_density(rng, 3, kFdivAmplitude);
      const auto c = support::random_cosine_density(rng, 3, kFdivAmplitude);
      const double amp = std::max({a.amplitude(), b.amplitude(), c.amplitude()});
      const double lam = std::max({a.lipschitz(), b.lipschitz(), c.lipschitz(), 1e-9});
      const double cm = 1.0 - amp, cp = 1.0 + amp;
      const double K2 = fdiv_regularity(k, cm, cp, f_prime_lipschitz(k, cm / cp, cp / cm), lam).K2;
      const Vector mu = a.weights(kFdivGrid), mu2 = b.weights(kFdivGrid), nu = c.weights(kFdivGrid);
      const double lhs = std::abs(f_divergence(k, mu, nu).value - f_divergence(k, mu2, nu).value);
      a2 += lhs > K2 * grid.distance(mu, mu2) + 1e-12;
    }

  const auto c = dfA3_constants(FKind::kl);
  const bool c_ok = c.has_value() && std::abs(*c - 1.0) <= kDfA3Tol;

  const int n = 8;
  const auto g8 = GridWasserstein::unit_interval(n);
  Vector nu(n);
  for (int i = 0; i < n; ++i) {
    const double x = g8.atoms()[static_cast<std::size_t>(i)][0];
    nu[i] = std::exp(-(x - 0.4) * (x - 0.4) / 0.08);
  }
  nu /= nu.sum();
  double m4 = 0;
  for (int i = 0; i < n; ++i) m4 += nu[i] * std::pow(g8.atoms()[static_cast<std::size_t>(i)][0], 4);
  const auto P = DiscreteMeasure<Vector>::dirac(nu);
  int convex = 0;
  for (int rep = 0; rep < kKlInstances; ++rep) {
    const Vector a = g8.sample(rng), b = g8.sample(rng);
    const double hi = std::max((a.array() / nu.array()).maxCoeff(), (b.array() / nu.array()).maxCoeff());
    const double lo = std::min((a.array() / nu.array()).minCoeff(), (b.array() / nu.array()).minCoeff());
    const double k = fdiv_kconvexity_constant(FKind::kl, lo, hi, m4);
    convex += kconvexity_probe(g8, FunctionalSpec::divergence(FKind::kl), P, {{a, b}}, k, 0.5).violations;
  }
  const bool ok = a2 == 0 && c_ok && convex == 0;
  return {ok, "A2 breaches " + std::to_string(a2) + "/" + std::to_string(2 * kFdivTriples) + " (KL, chi2); KL c = " +
                  (c ? fmt("%.6f", *c) : std::string("none")) + "; (k/(4 m4), 1/2) stencil violations " +
                  std::to_string(convex) + " over 100 interpolations"};
}

Outcome rate_regimes() {
  struct Case {
    double D, alpha, beta, n, expected;
  };
  const std::vector<Case> cases = {
      {1.0, 1.0, 1.0, 8.0, 0.25},
      {1.0, 1.0, 0.5, 16.0, std::pow(2.0, -16.0 / 7.0)},
      {0.5, 1.0, 1.0, 100.0, std::pow(10.0, -1.6)},
      {1.0, 0.75, 1.0, 1e6, std::pow(10.0, -12.0 / 3.5)},
      {2.0, 1.0, 1.0, 100.0, std::log(100.0) / 10.0},
      {1.0, 0.5, 1.0, 4.0, std::log(4.0) / 2.0},
      {1.5, 0.75, 0.3, 1e4, std::log(1e4) / 100.0},
      {0.2, 0.1, 1.0, 9.0, std::log(9.0) / 3.0},
      {4.0, 1.0, 1.0, 16.0, 0.5},
      {3.0, 1.0, 1.0, 1000.0, 0.1},
      {8.0, 0.5, 1.0, 256.0, std::sqrt(0.5)},
      {10.0, 1.0, 0.5, 1e10, 0.1},
  };
  int grid_bad = 0;
  for (const auto& c : cases)
    grid_bad += std::abs(bound_theorem2_rate(c.D, c.alpha, c.n, c.beta) - c.expected) >
                kHandGridTol * std::max(1.0, c.expected);
  BoundInputs canon;
  canon.n = 100;
  const double t1 = bound_theorem1(canon);

  int lattice_bad = 0, checks = 0;
  const std::vector<double> vals = {0.5, 1.0, 2.0, 4.0};
  for (double K2 : vals)
    for (double K3 : vals)
      for (double C : vals)
        for (double D : vals)
          for (double t : vals)
            for (double n : {1.0, 10.0, 1000.0}) {
              const BoundInputs in{1.0, K2, K3, 0.7, 0.9, C, D, n, t};
              const double base = bound_theorem1(in);
              for (double BoundInputs::*f : {&BoundInputs::K2, &BoundInputs::K3, &BoundInputs::C, &BoundInputs::D,
                                             &BoundInputs::t, &BoundInputs::n}) {
                BoundInputs up = in;
                up.*f *= 2.0;
                const double v = bound_theorem1(up);
                lattice_bad += f == &BoundInputs::n ? v > base : v < base;
                ++checks;
              }
            }
  const bool ok = grid_bad == 0 && std::abs(t1 - 829.44) <= kTheorem1Tol && lattice_bad == 0;
  return {ok, "hand grid mismatches " + std::to_string(grid_bad) + "/12, canonical bound " + fmt("%.6f", t1) +
                  ", lattice monotonicity failures " + std::to_string(lattice_bad) + "/" + std::to_string(checks)};
}

Outcome doubling_fit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sweep = covering_sweep(unit_square_grid(kGridSide), kSweepHi, kSweepLo, kSweepCount);
  const double secs = seconds_since(t0);
  int sandwich_bad = 0;
  for (const auto& r : sweep.results) sandwich_bad += !r.sandwich_holds();
  const bool ok = sweep.fit.slope >= kSlopeLo && sweep.fit.slope <= kSlopeHi && sandwich_bad == 0 &&
                  secs < kCoverSeconds;
  return {ok, "101x101 grid, 8 radii in [0.02, 0.2]: slope " + fmt("%.4f", sweep.fit.slope) + ", sandwich failures " +
                  std::to_string(sandwich_bad) + ", " + fmt("%.2f", secs) + " s"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "geobary_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = std::string(GEOBARY_CONFIG_DIR) + "/unit_square.ini";
  auto run = [&](const std::string& env, const std::string& name) {
    const std::string cmd = env + " '" + GEOBARY_CLI_PATH + "' --config '" + cfg + "' rates --out '" +
                            (dir / name).string() + "' >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) && WEXITSTATUS(st) == 0;
  };
  const bool ran = run("GEOBARY_THREADS=1", "serial_a.csv") && run("GEOBARY_THREADS=1", "serial_b.csv") &&
                   run("GEOBARY_THREADS=4", "parallel.csv");
  const std::string a = slurp(dir / "serial_a.csv");
  const bool same_seed = ran && !a.empty() && a == slurp(dir / "serial_b.csv");
  const bool serial_parallel = ran && a == slurp(dir / "parallel.csv");
  fs::remove_all(dir);
  return {same_seed && serial_parallel, std::string("rates CLI (") + std::to_string(a.size()) +
                                            " bytes): repeat run " + (same_seed ? "identical" : "DIFFERS") +
                                            ", serial vs 4 threads " + (serial_parallel ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Hilbert identity rate", hilbert_identity},
      {"NPC variance inequality", npc_variance},
      {"PC identity", pc_identity},
      {"Extendable geodesics", extendable_geodesics},
      {"Bures extension criterion", bures_extension},
      {"Sinkhorn limits", sinkhorn_limits},
      {"f-divergence constants", fdiv_constants},
      {"Rate-regime evaluator", rate_regimes},
      {"Doubling fit", doubling_fit},
      {"Determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

#pragma once

// Monte-Carlo rate experiments: empirical barycenters of n-samples from P
// against the population barycenter, replicated over a seeded grid of cells.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "geobary/barycenter.hpp"
#include "geobary/regression.hpp"

namespace geobary {

template <MetricSpace S>
struct RateExperiment {
  BarycenterProblem<S> problem;
  std::vector<int> ns;
  int reps = 1;
  std::uint64_t seed = 0;
};

struct ReplicateRecord {
  int n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double d2 = std::numeric_limits<double>::quiet_NaN();
  /// Excess risk of x_n under the population P.
  double excess = std::numeric_limits<double>::quiet_NaN();
  /// Same quantity under the empirical measure of the sample.
  double sample_excess = std::numeric_limits<double>::quiet_NaN();
  /// ok, iteration-cap, multi-minimizer, or error:<ErrorName>.
  std::string flag = "ok";
};

struct RateSummary {
  int n = 0;
  int count = 0;
  double mean_d2 = 0.0;
  double mean_excess = 0.0;
  double stderr_d2 = 0.0;
};

struct RateFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  std::vector<RateSummary> per_n;
  /// Set when fewer than three sample sizes have a positive mean d2.
  bool degenerate = false;
};

template <MetricSpace S>
struct RateResult {
  typename S::point_type x_star;
  double population_objective = 0.0;
  std::vector<ReplicateRecord> records;  // sorted by (n, replicate)
  RateFit fit;
};

/// Least squares on (log n, log value). Needs three pairs with value > 0.
inline LinearFit fit_loglog(const std::vector<std::pair<double, double>>& pairs) {
  require(pairs.size() >= 3, Errc::degenerate_input, "need at least 3 (n, value) pairs");
  std::vector<double> x, y;
  for (const auto& [n, v] : pairs) {
    require(n > 0.0 && v > 0.0 && std::isfinite(v), Errc::degenerate_input, "values must be positive");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  return least_squares(x, y);
}

/// Worker count: GEOBARY_THREADS when set to a positive integer, otherwise
/// the hardware concurrency; never more than `jobs`.
inline int worker_count(std::size_t jobs) {
  int t = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GEOBARY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) t = static_cast<int>(std::min<long>(v, 1024));
  }
  t = std::max(t, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(jobs, 1)));
}

/// Runs body(i) for i in [0, jobs) on `threads` workers. Each index is
/// handled exactly once; results must be written to slot i by the caller.
template <class F>
void parallel_for(std::size_t jobs, int threads, F body) {
  if (threads <= 1 || jobs <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

namespace detail {

template <MetricSpace S>
typename S::point_type nearest_candidate(const S& space, const BarycenterResult<S>& r,
                                         const typename S::point_type& x_star) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const double d = space.distance(r.candidates[i], x_star);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return r.candidates.empty() ? r.minimizer : r.candidates[best];
}

template <MetricSpace S>
ReplicateRecord run_replicate(const RateExperiment<S>& exp, const typename S::point_type& x_star,
                              double pop_value, int n, int rep) {
  ReplicateRecord rec;
  rec.n = n;
  rec.replicate = rep;
  rec.seed = derive_seed(exp.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
  const auto& space = exp.problem.space;
  const auto& spec = exp.problem.functional;
  try {
    const auto sample = sample_empirical(exp.problem.P, n, rec.seed);
    SolverOptions opt = exp.problem.options;
    opt.seed = rec.seed;
    const auto r = solve_barycenter(BarycenterProblem<S>{space, spec, sample, opt});
    auto xn = r.minimizer;
    if (r.status == BaryStatus::multi_minimizer) {
      xn = nearest_candidate(space, r, x_star);
      rec.flag = status_name(r.status);
    } else if (r.status == BaryStatus::iteration_cap) {
      rec.flag = status_name(r.status);
    }
    const double d = space.distance(xn, x_star);
    rec.d2 = d * d;
    rec.excess = barycenter_objective(space, spec, exp.problem.P, xn).value - pop_value;
    rec.sample_excess = barycenter_objective(space, spec, sample, xn).value -
                        barycenter_objective(space, spec, sample, x_star).value;
  } catch (const Error& e) {
    rec.flag = "error:" + std::string(errc_name(e.code()));
  }
  return rec;
}

}  // namespace detail

/// Solves the population problem, then every (n, replicate) cell with seed
/// derive_seed(master, n, replicate). Cells run on worker_count() threads;
/// the output order is fixed by (n, replicate).
template <MetricSpace S>
RateResult<S> run_rate_experiment(const RateExperiment<S>& exp, int threads = 0) {
  require(!exp.ns.empty() && exp.reps >= 1, Errc::invalid_inputs, "need sample sizes and reps >= 1");
  for (std::size_t i = 0; i < exp.ns.size(); ++i) {
    require(exp.ns[i] >= 2, Errc::invalid_inputs, "sample sizes must be at least 2");
    require(i == 0 || exp.ns[i] > exp.ns[i - 1], Errc::invalid_inputs, "sample sizes must increase");
  }

  RateResult<S> res;
  try {
    const auto pop = solve_barycenter(exp.problem);
    if (pop.status != BaryStatus::converged)
      fail(Errc::population_solve_failed,
           std::string("population barycenter not certified: ") + status_name(pop.status));
    res.x_star = pop.minimizer;
    res.population_objective = pop.objective;
  } catch (const Error& e) {
    if (e.code() == Errc::population_solve_failed) throw;
    fail(Errc::population_solve_failed, std::string("population solve failed: ") + e.what());
  }

  const std::size_t cells = exp.ns.size() * static_cast<std::size_t>(exp.reps);
  res.records.resize(cells);
  const int workers = threads > 0 ? std::min(threads, static_cast<int>(cells)) : worker_count(cells);
  parallel_for(cells, workers, [&](std::size_t i) {
    const int n = exp.ns[i / static_cast<std::size_t>(exp.reps)];
    const int rep = static_cast<int>(i % static_cast<std::size_t>(exp.reps));
    res.records[i] = detail::run_replicate(exp, res.x_star, res.population_objective, n, rep);
  });

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 0; k < exp.ns.size(); ++k) {
    RateSummary s;
    s.n = exp.ns[k];
    double sum = 0, sum_e = 0, sq = 0;
    for (int r = 0; r < exp.reps; ++r) {
      const auto& rec = res.records[k * static_cast<std::size_t>(exp.reps) + static_cast<std::size_t>(r)];
      if (!std::isfinite(rec.d2)) continue;
      ++s.count;
      sum += rec.d2;
      sum_e += rec.excess;
      sq += rec.d2 * rec.d2;
    }
    if (s.count > 0) {
      s.mean_d2 = sum / s.count;
      s.mean_excess = sum_e / s.count;
      if (s.count > 1) {
        const double var = std::max(0.0, (sq - s.count * s.mean_d2 * s.mean_d2) / (s.count - 1));
        s.stderr_d2 = std::sqrt(var / s.count);
      }
      if (s.mean_d2 > 0.0) pairs.emplace_back(s.n, s.mean_d2);
    }
    res.fit.per_n.push_back(s);
  }
  if (pairs.size() >= 3) {
    const LinearFit f = fit_loglog(pairs);
    res.fit.slope = f.slope;
    res.fit.intercept = f.intercept;
    res.fit.r_squared = f.r_squared;
  } else {
    res.fit.degenerate = true;
  }
  return res;
}

}  // namespace geobary

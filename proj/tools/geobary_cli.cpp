// geobary: barycenters, variance inequalities and rate experiments from the
// command line. Exit codes: 0 success, 1 domain error or reported violations,
// 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cli_io.hpp"

using namespace geobary;
using namespace geobary::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

/// Output file, or stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw UsageError("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool is_stdout() const { return !file_; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_svg(const std::string& path, const LogLogPlot& plot) {
  if (path.empty()) return;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path);
  write_loglog_svg(os, plot);
}

void add_space_options(CLI::App* sub, SpaceArgs& a, bool with_functional) {
  sub->add_option("--space", a.space, "euclidean, sphere, spider, gaussian, w1d or grid")
      ->check(CLI::IsMember({"euclidean", "sphere", "spider", "gaussian", "w1d", "grid"}));
  sub->add_option("--measure", a.measure, "measure CSV (weight,<coords>)");
  sub->add_option("--rays", a.rays, "spider: number of rays")->check(CLI::PositiveNumber);
  sub->add_option("--ray-length", a.ray_length, "spider: ray length")->check(CLI::PositiveNumber);
  sub->add_option("--sample-radius", a.sample_radius, "spider: radius of random points")->check(CLI::PositiveNumber);
  sub->add_option("--cut-locus", a.cut_locus, "sphere: canonical or strict")
      ->check(CLI::IsMember({"canonical", "strict"}));
  sub->add_option("--grid-atoms", a.grid_atoms, "grid: comma-separated atom positions on the line");
  if (with_functional)
    sub->add_option("--functional", a.functional, "sqdist, kl, chi2, tv, interaction:<id> or sinkhorn:<gamma>");
}

template <class S>
void require_functional_fits(const S&, const FunctionalSpec& spec) {
  if constexpr (!std::is_same_v<S, GridWasserstein>)
    if (spec.kind != FunctionalKind::squared_distance)
      throw UsageError("--functional: only sqdist is available outside the grid space");
}

SolverOptions solver_options(double tol, int max_iter, std::uint64_t seed) {
  SolverOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.seed = seed;
  return o;
}

std::string coord_header(std::size_t n) {
  std::string s;
  for (std::size_t i = 1; i <= n; ++i) s += ",x" + std::to_string(i);
  return s;
}

// ---------------------------------------------------------------------------
// bary

struct BaryArgs {
  SpaceArgs space;
  double tol = 1e-10;
  int max_iter = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bary(const BaryArgs& a) {
  const FunctionalSpec spec = parse_functional(a.space.functional);
  return with_measure(a.space, [&](const auto& space, const auto& P) {
    require_functional_fits(space, spec);
    const auto r = solve_barycenter(space, P, solver_options(a.tol, a.max_iter, a.seed), spec);
    std::cout << "status " << status_name(r.status) << '\n'
              << "objective " << format_number(r.objective) << '\n'
              << "iterations " << r.iterations << '\n'
              << "residual " << format_number(r.residual) << '\n'
              << "minimizer " << format_point(r.minimizer) << '\n';
    for (std::size_t i = 0; i < r.candidates.size() && r.status == BaryStatus::multi_minimizer; ++i)
      std::cout << "candidate " << i << ' ' << format_point(r.candidates[i]) << '\n';
    if (!a.out.empty()) {
      Output out(a.out);
      auto& os = out.stream();
      os << "candidate,objective" << coord_header(point_fields(r.minimizer).size()) << '\n';
      if (r.candidates.empty()) {
        os << "0," << format_number(r.objective) << ',' << format_point(r.minimizer) << '\n';
      } else {
        for (std::size_t i = 0; i < r.candidates.size(); ++i)
          os << i << ',' << format_number(r.candidate_objectives[i]) << ',' << format_point(r.candidates[i]) << '\n';
      }
    }
    return r.status == BaryStatus::iteration_cap ? kExitDomain : kExitOk;
  });
}

// ---------------------------------------------------------------------------
// rates

struct RatesArgs {
  SpaceArgs space;
  std::vector<int> ns = {16, 64, 256, 1024};
  int reps = 100;
  std::uint64_t seed = 0;
  int threads = 0;
  bool sample_excess = false;
  std::string out, svg;
};

int run_rates(const RatesArgs& a) {
  const FunctionalSpec spec = parse_functional(a.space.functional);
  const std::vector<int>& ns = a.ns;
  if (ns.empty()) throw UsageError("--ns: no sample sizes");
  for (int v : ns)
    if (v < 2) throw UsageError("--ns: sample sizes must be at least 2");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw UsageError("--ns: sample sizes must increase");
  return with_measure(a.space, [&](const auto& space, const auto& P) {
    using S = std::decay_t<decltype(space)>;
    require_functional_fits(space, spec);
    RateExperiment<S> exp{{space, spec, P, {}}, ns, a.reps, a.seed};
    const auto res = run_rate_experiment(exp, a.threads);
    Output out(a.out);
    write_rates_csv(out.stream(), res, {a.sample_excess});
    if (!out.is_stdout()) {
      std::cout << "x_star " << format_point(res.x_star) << '\n';
      for (const auto& s : res.fit.per_n)
        std::cout << "n " << s.n << " mean_d2 " << format_number(s.mean_d2) << " n*mean_d2 "
                  << format_number(s.n * s.mean_d2) << '\n';
      if (res.fit.degenerate)
        std::cout << "slope degenerate\n";
      else
        std::cout << "slope " << format_number(res.fit.slope) << " r_squared " << format_number(res.fit.r_squared)
                  << '\n';
    }
    if (!a.svg.empty() && !res.fit.degenerate) {
      LogLogPlot plot;
      plot.title = "mean squared distance to the population barycenter";
      plot.y_label = "mean d2";
      for (const auto& s : res.fit.per_n) {
        plot.x.push_back(s.n);
        plot.y.push_back(s.mean_d2);
      }
      plot.fit = LinearFit{res.fit.slope, res.fit.intercept, res.fit.r_squared};
      write_svg(a.svg, plot);
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// vi

struct ViArgs {
  SpaceArgs space;
  int random_probes = 64;
  std::uint64_t seed = 0;
  std::optional<double> K3, beta;
  double pc_tol = 1e-6;
  std::string out, svg;
};

int run_vi(const ViArgs& a) {
  const FunctionalSpec spec = parse_functional(a.space.functional);
  if (a.beta && (*a.beta <= 0.0 || *a.beta > 1.0)) throw UsageError("--beta: must lie in (0, 1]");
  return with_measure(a.space, [&](const auto& space, const auto& P) {
    using S = std::decay_t<decltype(space)>;
    require_functional_fits(space, spec);
    SolverOptions opt;
    opt.seed = a.seed;
    const auto bary = solve_barycenter(space, P, opt, spec);
    if (bary.status != BaryStatus::converged) {
      std::cout << "barycenter " << status_name(bary.status) << "; the variance inequality needs a unique x*\n";
      return kExitDomain;
    }
    const auto probes = vi_probes(space, P, bary.minimizer, a.random_probes, a.seed);
    const auto fit = fit_variance_inequality(space, spec, P, bary.minimizer, probes);
    const double K3 = a.K3.value_or(fit.K3_hat);
    const double beta = a.K3 ? a.beta.value_or(1.0) : a.beta.value_or(fit.beta_hat);
    const int violations = count_vi_violations(fit.probes, K3, beta);

    std::vector<double> kint;
    std::optional<PcIdentityReport> pc;
    if constexpr (LogMapSpace<S>) {
      if (spec.kind == FunctionalKind::squared_distance && is_pc_space(space.kind())) {
        pc = pc_identity_check(space, P, bary.minimizer, probes);
        kint = pc->k_values;
      }
    }
    Output out(a.out);
    write_vi_csv(out.stream(), fit.probes, kint, K3, beta);
    auto& log = out.is_stdout() ? std::cerr : std::cout;
    log << "x_star " << format_point(bary.minimizer) << '\n'
        << "K3_hat " << format_number(fit.K3_hat) << " beta_hat " << format_number(fit.beta_hat) << '\n'
        << "usable " << fit.usable << " of " << fit.probes.size() << '\n'
        << "checked K3 " << format_number(K3) << " beta " << format_number(beta) << " violations " << violations
        << '\n';
    bool ok = violations == 0;
    if (pc) {
      log << "pc_identity max_abs_error " << format_number(pc->max_abs_error) << " out_of_range "
          << pc->out_of_range << '\n';
      ok = ok && pc->max_abs_error <= a.pc_tol && pc->out_of_range == 0;
    }
    if (!a.svg.empty()) {
      LogLogPlot plot;
      plot.title = "variance inequality probes";
      plot.x_label = "excess";
      plot.y_label = "d2";
      for (const auto& p : fit.probes) {
        plot.x.push_back(p.excess);
        plot.y.push_back(p.d2);
      }
      plot.fit = LinearFit{beta, std::log(K3), std::nan("")};
      write_svg(a.svg, plot);
    }
    return ok ? kExitOk : kExitDomain;
  });
}

// ---------------------------------------------------------------------------
// curvature

struct CurvatureArgs {
  SpaceArgs space;
  std::string target;
  int samples = 1000;
  std::uint64_t seed = 0;
};

int run_curvature(const CurvatureArgs& a) {
  auto body = [&](const auto& space) {
    std::string target = a.target;
    if (target.empty()) target = space.kind() == SpaceKind::spider ? "npc" : "pc";
    const auto rep = check_curvature_sign(space, target == "npc" ? CurvatureTarget::npc : CurvatureTarget::pc,
                                          a.samples, a.seed);
    std::cout << "target " << target << '\n'
              << "samples " << rep.samples << '\n'
              << "triangle_checks " << rep.triangle_checks << '\n'
              << "quadruple_checks " << rep.quadruple_checks << '\n'
              << "worst_margin " << format_number(rep.worst_margin) << '\n'
              << "violations " << rep.violations << '\n';
    return rep.violations == 0 ? kExitOk : kExitDomain;
  };
  return a.space.measure.empty() ? with_space(a.space, body)
                                 : with_measure(a.space, [&](const auto& space, const auto&) { return body(space); });
}

// ---------------------------------------------------------------------------
// cover

struct CoverArgs {
  std::string points;
  int unit_square = 0;
  double eps_hi = 0.2, eps_lo = 0.02;
  int count = 8;
  std::string out, svg;
};

int run_cover(const CoverArgs& a) {
  if (a.points.empty() == (a.unit_square == 0)) throw UsageError("give exactly one of --points or --unit-square");
  if (!(a.eps_lo > 0.0 && a.eps_hi > a.eps_lo)) throw UsageError("--eps-lo/--eps-hi: need 0 < eps-lo < eps-hi");
  std::vector<Vector> pts;
  if (a.unit_square > 0) {
    pts = unit_square_grid(a.unit_square);
  } else {
    const CsvTable t = read_csv(a.points);
    for (const auto& r : t.rows) pts.push_back(to_vector(r, 0, r.size()));
  }
  const auto sweep = covering_sweep(pts, a.eps_hi, a.eps_lo, a.count);
  Output out(a.out);
  auto& os = out.stream();
  os << "eps,cover,farthest_first,max_coverage,packing\n";
  bool sandwich = true;
  for (const auto& r : sweep.results) {
    os << format_number(r.eps) << ',' << r.cover << ',' << r.farthest_first << ',' << r.max_coverage << ','
       << r.packing << '\n';
    sandwich = sandwich && r.sandwich_holds();
  }
  os << "#fit,slope,intercept,r_squared\n#fit," << format_number(sweep.fit.slope) << ','
     << format_number(sweep.fit.intercept) << ',' << format_number(sweep.fit.r_squared) << '\n';
  if (!out.is_stdout())
    std::cout << "points " << pts.size() << "\nslope " << format_number(sweep.fit.slope) << "\nsandwich "
              << (sandwich ? "holds" : "fails") << '\n';
  if (!a.svg.empty()) {
    LogLogPlot plot;
    plot.title = "covering numbers (sample lower-bound estimates)";
    plot.x_label = "1/eps";
    plot.y_label = "cover";
    for (const auto& r : sweep.results) {
      plot.x.push_back(1.0 / r.eps);
      plot.y.push_back(r.cover);
    }
    plot.fit = sweep.fit;
    write_svg(a.svg, plot);
  }
  return sandwich ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// bound

struct BoundArgs {
  int theorem = 2;
  BoundInputs in;
};

int run_bound(const BoundArgs& a) {
  if (a.theorem == 2) {
    const double v = bound_theorem2_rate(a.in.D, a.in.alpha, a.in.n, a.in.beta);
    const char* regime = "";
    switch (rate_regime(a.in.D, a.in.alpha)) {
      case RateRegime::low_dimension: regime = "n^(-1/(2 - alpha beta))"; break;
      case RateRegime::critical: regime = "log(n)/sqrt(n)"; break;
      case RateRegime::high_dimension: regime = "n^(-alpha/D)"; break;
    }
    std::cout << "v_n = " << format_number(v) << '\n' << "regime " << regime << '\n';
    return kExitOk;
  }
  const auto c = theorem1_constants(a.in);
  std::cout << "bound = " << format_number(bound_theorem1(a.in)) << '\n'
            << "c1 " << format_number(c.c1) << " c2 " << format_number(c.c2) << " c3 " << format_number(c.c3)
            << " (c3 term omitted)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extend

struct ExtendArgs {
  SpaceArgs space;
  std::optional<double> lambda;
  int random_probes = 64;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string out;
};

int run_extend(const ExtendArgs& a) {
  return with_measure(a.space, [&](const auto& space, const auto& P) {
    using S = std::decay_t<decltype(space)>;
    if constexpr (!GeodesicSpace<S>) {
      throw UsageError("--space: extension needs geodesics; the grid space has none");
      return kExitUsage;
    } else {
      SolverOptions opt;
      opt.seed = a.seed;
      const auto bary = solve_barycenter(space, P, opt);
      if (bary.status != BaryStatus::converged) {
        std::cout << "barycenter " << status_name(bary.status) << "; hypothesis failure: x* is not unique\n";
        return kExitDomain;
      }
      const auto& x = bary.minimizer;
      std::vector<double> limits;
      for (const auto& y : P.atoms()) limits.push_back(extension_limit(space, x, y));
      std::cout << "x_star " << format_point(x) << '\n';
      double lmin = std::numeric_limits<double>::infinity();
      for (double l : limits) lmin = std::min(lmin, l);
      std::cout << "lambda_max " << format_number(lmin) << '\n';
      if (!a.out.empty()) {
        Output out(a.out);
        out.stream() << "atom,weight,lambda_max\n";
        for (std::size_t i = 0; i < P.size(); ++i)
          out.stream() << i << ',' << format_number(P.weight(i)) << ',' << format_number(limits[i]) << '\n';
      }
      if (!a.lambda) return kExitOk;
      const auto probes = vi_probes(space, P, x, a.random_probes, a.seed);
      const auto rep = extension_vi_check(space, P, x, *a.lambda, probes, a.tol, opt);
      std::cout << "lambda " << format_number(rep.lambda) << " K3 " << format_number(rep.K3) << '\n'
                << "hypothesis_gap " << format_number(rep.hypothesis_gap) << " hypothesis_two "
                << (rep.hypothesis_two ? "holds" : "fails") << '\n'
                << "violations " << rep.violations << " of " << rep.probes.size() << " max_ratio "
                << format_number(rep.max_ratio) << '\n';
      return rep.passed() ? kExitOk : kExitDomain;
    }
  });
}

void one_line(const std::string& msg) {
  std::string s = msg;
  for (char& c : s)
    if (c == '\n') c = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  std::cerr << "geobary: " << s << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barycenters on geodesic metric spaces"};
  app.name("geobary");
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "INI file with one section per subcommand; flags override it");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());

  BaryArgs bary;
  auto* s_bary = app.add_subcommand("bary", "solve one barycenter problem");
  add_space_options(s_bary, bary.space, true);
  s_bary->add_option("--tol", bary.tol)->check(CLI::PositiveNumber);
  s_bary->add_option("--max-iter", bary.max_iter)->check(CLI::PositiveNumber);
  s_bary->add_option("--seed", bary.seed);
  s_bary->add_option("--out", bary.out, "CSV of the minimizer or candidates");

  RatesArgs rates;
  auto* s_rates = app.add_subcommand("rates", "Monte-Carlo rate experiment");
  add_space_options(s_rates, rates.space, true);
  s_rates->add_option("--ns", rates.ns, "comma-separated increasing sample sizes")->delimiter(',');
  s_rates->add_option("--reps", rates.reps)->check(CLI::PositiveNumber);
  s_rates->add_option("--seed", rates.seed);
  s_rates->add_option("--threads", rates.threads, "worker count; 0 uses GEOBARY_THREADS or all cores")
      ->check(CLI::NonNegativeNumber);
  s_rates->add_flag("--sample-excess", rates.sample_excess, "append the excess under the sample");
  s_rates->add_option("--out", rates.out, "CSV output (stdout when omitted)");
  s_rates->add_option("--svg", rates.svg, "log-log plot of mean d2 against n");

  ViArgs vi;
  auto* s_vi = app.add_subcommand("vi", "fit and check the variance inequality");
  add_space_options(s_vi, vi.space, true);
  s_vi->add_option("--random-probes", vi.random_probes)->check(CLI::NonNegativeNumber);
  s_vi->add_option("--seed", vi.seed);
  s_vi->add_option("--K3", vi.K3, "check against this constant instead of the fitted one")->check(CLI::PositiveNumber);
  s_vi->add_option("--beta", vi.beta, "exponent in (0, 1]");
  s_vi->add_option("--pc-tol", vi.pc_tol)->check(CLI::PositiveNumber);
  s_vi->add_option("--out", vi.out, "CSV output (stdout when omitted)");
  s_vi->add_option("--svg", vi.svg, "log-log plot of d2 against excess");

  CurvatureArgs curv;
  auto* s_curv = app.add_subcommand("curvature", "sample the curvature comparison inequalities");
  add_space_options(s_curv, curv.space, false);
  s_curv->add_option("--dim", curv.space.dim, "dimension (ambient for the sphere)")->check(CLI::PositiveNumber);
  s_curv->add_option("--grid-size", curv.space.grid_size)->check(CLI::PositiveNumber);
  s_curv->add_option("--target", curv.target, "npc or pc")->check(CLI::IsMember({"npc", "pc"}));
  s_curv->add_option("--samples", curv.samples)->check(CLI::PositiveNumber);
  s_curv->add_option("--seed", curv.seed);

  CoverArgs cover;
  auto* s_cover = app.add_subcommand("cover", "covering-number sweep of a finite sample");
  s_cover->add_option("--points", cover.points, "CSV of Euclidean points with a header row");
  s_cover->add_option("--unit-square", cover.unit_square, "regular n x n grid on the unit square")
      ->check(CLI::Range(2, 4096));
  s_cover->add_option("--eps-hi", cover.eps_hi)->check(CLI::PositiveNumber);
  s_cover->add_option("--eps-lo", cover.eps_lo)->check(CLI::PositiveNumber);
  s_cover->add_option("--count", cover.count)->check(CLI::Range(2, 1000));
  s_cover->add_option("--out", cover.out, "CSV output (stdout when omitted)");
  s_cover->add_option("--svg", cover.svg, "log-log plot of cover against 1/eps");

  BoundArgs bound;
  auto* s_bound = app.add_subcommand("bound", "evaluate the rate bounds");
  s_bound->add_option("--theorem", bound.theorem, "1 (explicit bound) or 2 (rate)")->check(CLI::IsMember({1, 2}));
  s_bound->add_option("--K1", bound.in.K1);
  s_bound->add_option("--K2", bound.in.K2);
  s_bound->add_option("--K3", bound.in.K3);
  s_bound->add_option("--alpha", bound.in.alpha);
  s_bound->add_option("--beta", bound.in.beta);
  s_bound->add_option("--C", bound.in.C);
  s_bound->add_option("--D", bound.in.D);
  s_bound->add_option("--n", bound.in.n);
  s_bound->add_option("--t", bound.in.t);

  ExtendArgs ext;
  auto* s_ext = app.add_subcommand("extend", "extension limits and the extended-geodesic check");
  add_space_options(s_ext, ext.space, false);
  s_ext->add_option("--lambda", ext.lambda, "run the check with this extension factor")->check(CLI::PositiveNumber);
  s_ext->add_option("--random-probes", ext.random_probes)->check(CLI::NonNegativeNumber);
  s_ext->add_option("--seed", ext.seed);
  s_ext->add_option("--tol", ext.tol)->check(CLI::PositiveNumber);
  s_ext->add_option("--out", ext.out, "CSV of per-atom extension limits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    one_line(e.what());
    return kExitUsage;
  }

  std::string config_dir;
  if (const auto* cfg = app.get_config_ptr(); cfg && cfg->count() > 0)
    config_dir = std::filesystem::path(cfg->as<std::string>()).parent_path().string();
  for (auto* a : {&bary.space, &rates.space, &vi.space, &curv.space, &ext.space}) a->config_dir = config_dir;

  try {
    if (s_bary->parsed()) return run_bary(bary);
    if (s_rates->parsed()) return run_rates(rates);
    if (s_vi->parsed()) return run_vi(vi);
    if (s_curv->parsed()) return run_curvature(curv);
    if (s_cover->parsed()) return run_cover(cover);
    if (s_bound->parsed()) return run_bound(bound);
    if (s_ext->parsed()) return run_extend(ext);
  } catch (const UsageError& e) {
    one_line(e.what());
    return kExitUsage;
  } catch (const Error& e) {
    one_line(e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    one_line(std::string("unexpected failure: ") + e.what());
    return kExitDomain;
  }
  return kExitUsage;
}

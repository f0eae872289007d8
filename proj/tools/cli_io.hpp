#pragma once

// File formats and space construction for the geobary command line.
//
// Measure files are CSV with a header row `weight,<coord fields>` and one row
// per atom. Coordinates per space:
//   euclidean  x1..xd
//   sphere     ambient unit vector x1..xn, or `colatitude,longitude` on S^2
//   spider     ray,radius (ray is a 0-based index)
//   gaussian   mean m1..md, then the covariance row-major (d + d*d fields)
//   w1d        quantile levels q1..qK, nondecreasing
//   grid       weights p1..pN over the grid atoms

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geobary/geobary.hpp"

namespace geobary::cli {

/// Bad command-line input; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(where + ": not a number: '" + s + "'");
  return v;
}

/// Header row plus numeric rows; blank lines and lines starting with '#' are
/// skipped.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " fields");
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f, path + ":" + std::to_string(lineno)));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty() || t.rows.empty()) throw UsageError(path + ": no data rows");
  return t;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (const auto& f : split_fields(s)) out.push_back(parse_double(f, flag));
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline Vector to_vector(const std::vector<double>& v, std::size_t from, std::size_t count) {
  Vector out(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) out(static_cast<Eigen::Index>(i)) = v[from + i];
  return out;
}

/// Options shared by every subcommand that works on a space.
struct SpaceArgs {
  std::string space = "euclidean";
  std::string measure;
  std::string config_dir;
  int dim = 0;
  int rays = 0;
  double ray_length = std::numeric_limits<double>::infinity();
  double sample_radius = 2.0;
  std::string cut_locus = "canonical";
  std::string grid_atoms;
  int grid_size = 0;
  std::string functional = "sqdist";
};

inline std::string resolve_path(const std::string& path, const std::string& config_dir) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::path(path).is_absolute() || fs::exists(path) || config_dir.empty()) return path;
  const fs::path alt = fs::path(config_dir) / path;
  return fs::exists(alt) ? alt.string() : path;
}

inline FunctionalSpec parse_functional(const std::string& s) {
  if (s == "sqdist") return FunctionalSpec::squared_distance();
  if (s == "kl") return FunctionalSpec::divergence(FKind::kl);
  if (s == "chi2") return FunctionalSpec::divergence(FKind::chi_squared);
  if (s == "tv") return FunctionalSpec::divergence(FKind::total_variation);
  if (s.rfind("interaction:", 0) == 0) return FunctionalSpec::interaction(s.substr(12));
  if (s.rfind("sinkhorn:", 0) == 0) return FunctionalSpec::sinkhorn(parse_double(s.substr(9), "--functional"));
  throw UsageError("--functional: unknown functional '" + s + "'");
}

// ---------------------------------------------------------------------------
// Point encodings

inline std::vector<double> point_fields(const Vector& x) { return {x.data(), x.data() + x.size()}; }

inline std::vector<double> point_fields(const SpiderPoint& x) { return {static_cast<double>(x.ray), x.radius}; }

inline std::vector<double> point_fields(const GaussianPoint& x) {
  std::vector<double> out(x.mean.data(), x.mean.data() + x.mean.size());
  for (Eigen::Index i = 0; i < x.cov.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cov.cols(); ++j) out.push_back(x.cov(i, j));
  return out;
}

template <class Point>
std::string format_point(const Point& x, char sep = ',') {
  std::string s;
  for (double v : point_fields(x)) {
    if (!s.empty()) s += sep;
    s += format_number(v);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Space construction

inline Sphere make_sphere(const SpaceArgs& a, int ambient) {
  if (a.cut_locus != "canonical" && a.cut_locus != "strict")
    throw UsageError("--cut-locus: expected canonical or strict");
  return Sphere(ambient, a.cut_locus == "strict" ? CutLocusPolicy::strict : CutLocusPolicy::canonical);
}

inline GridWasserstein make_grid(const SpaceArgs& a, int atoms) {
  if (!a.grid_atoms.empty()) {
    const auto xs = parse_list(a.grid_atoms, "--grid-atoms");
    if (static_cast<int>(xs.size()) != atoms)
      throw UsageError("--grid-atoms: " + std::to_string(xs.size()) + " atoms but the measure has " +
                       std::to_string(atoms) + " weights");
    return GridWasserstein::line(xs);
  }
  return GridWasserstein::unit_interval(atoms);
}

inline int gaussian_dim(std::size_t fields) {
  for (int d = 1; d * (d + 1) <= static_cast<int>(fields); ++d)
    if (static_cast<std::size_t>(d * (d + 1)) == fields) return d;
  throw UsageError("gaussian atoms need d + d*d coordinate fields, got " + std::to_string(fields));
}

inline std::vector<double> weights_of(const CsvTable& t) {
  if (t.header.front() != "weight") throw UsageError("measure header must start with 'weight'");
  std::vector<double> w;
  for (const auto& r : t.rows) w.push_back(r.front());
  return w;
}

/// Calls f(space, P) with the space named by a.space and the measure in
/// a.measure. Returns f's result.
template <class F>
int with_measure(const SpaceArgs& a, F&& f) {
  if (a.measure.empty()) throw UsageError("--measure is required");
  const CsvTable t = read_csv(resolve_path(a.measure, a.config_dir));
  const std::size_t k = t.header.size() - 1;
  if (k == 0) throw UsageError(a.measure + ": no coordinate fields");
  const auto w = weights_of(t);
  auto build = [&](auto space, auto atoms) {
    using S = decltype(space);
    DiscreteMeasure<typename S::point_type> P;
    try {
      for (const auto& x : atoms) space.validate(x);
      P = DiscreteMeasure<typename S::point_type>(std::move(atoms), w);
    } catch (const Error& e) {
      throw UsageError(a.measure + ": " + e.what());
    }
    return f(space, P);
  };

  if (a.space == "euclidean") {
    std::vector<Vector> atoms;
    for (const auto& r : t.rows) atoms.push_back(to_vector(r, 1, k));
    return build(Euclidean(static_cast<int>(k)), std::move(atoms));
  }
  if (a.space == "sphere") {
    std::vector<Vector> atoms;
    const bool angles = k == 2 && t.header[1] == "colatitude" && t.header[2] == "longitude";
    for (const auto& r : t.rows) atoms.push_back(angles ? Sphere::from_spherical(r[1], r[2]) : to_vector(r, 1, k));
    return build(make_sphere(a, angles ? 3 : static_cast<int>(k)), std::move(atoms));
  }
  if (a.space == "spider") {
    if (k != 2) throw UsageError("spider atoms are 'ray,radius'");
    std::vector<SpiderPoint> atoms;
    int rays = a.rays;
    for (const auto& r : t.rows) {
      if (r[1] != std::floor(r[1]) || r[1] < 0) throw UsageError("spider ray must be a nonnegative integer");
      atoms.push_back({static_cast<int>(r[1]), r[2]});
      if (a.rays == 0) rays = std::max(rays, static_cast<int>(r[1]) + 1);
    }
    return build(SpiderTree(std::max(rays, 2), a.ray_length, a.sample_radius), std::move(atoms));
  }
  if (a.space == "gaussian") {
    const int d = gaussian_dim(k);
    std::vector<GaussianPoint> atoms;
    for (const auto& r : t.rows) {
      Matrix cov(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) cov(i, j) = r[static_cast<std::size_t>(1 + d + i * d + j)];
      atoms.push_back(GaussianBures::make(to_vector(r, 1, static_cast<std::size_t>(d)), cov));
    }
    return build(GaussianBures(d), std::move(atoms));
  }
  if (a.space == "w1d") {
    std::vector<Vector> atoms;
    for (const auto& r : t.rows) atoms.push_back(to_vector(r, 1, k));
    return build(Wasserstein1D(static_cast<int>(k)), std::move(atoms));
  }
  if (a.space == "grid") {
    std::vector<Vector> atoms;
    for (const auto& r : t.rows) atoms.push_back(to_vector(r, 1, k));
    return build(make_grid(a, static_cast<int>(k)), std::move(atoms));
  }
  throw UsageError("--space: unknown space '" + a.space + "'");
}

/// Calls f(space) for spaces built from --dim (or --rays, --grid-size).
template <class F>
int with_space(const SpaceArgs& a, F&& f) {
  auto dim_or = [&](int fallback) { return a.dim > 0 ? a.dim : fallback; };
  if (a.space == "euclidean") return f(Euclidean(dim_or(2)));
  if (a.space == "sphere") return f(make_sphere(a, dim_or(3)));
  if (a.space == "spider") return f(SpiderTree(a.rays > 0 ? a.rays : 3, a.ray_length, a.sample_radius));
  if (a.space == "gaussian") return f(GaussianBures(dim_or(2)));
  if (a.space == "w1d") return f(Wasserstein1D(dim_or(4)));
  if (a.space == "grid") return f(make_grid(a, a.grid_size > 0 ? a.grid_size : 5));
  throw UsageError("--space: unknown space '" + a.space + "'");
}

}  // namespace geobary::cli

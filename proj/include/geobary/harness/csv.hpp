#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "geobary/analysis/variance.hpp"
#include "geobary/harness/rates.hpp"

namespace geobary {

/// Shortest round-trip representation; nan and inf spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct RatesCsvOptions {
  /// Appends a sample_excess column after flag.
  bool sample_excess = false;
};

template <MetricSpace S>
void write_rates_csv(std::ostream& os, const RateResult<S>& res, RatesCsvOptions opt = {}) {
  os << "n,replicate,d2,excess,flag" << (opt.sample_excess ? ",sample_excess" : "") << '\n';
  for (const auto& r : res.records) {
    os << r.n << ',' << r.replicate << ',' << format_number(r.d2) << ',' << format_number(r.excess) << ','
       << r.flag;
    if (opt.sample_excess) os << ',' << format_number(r.sample_excess);
    os << '\n';
  }
  os << "#summary,n,mean_d2,mean_excess,stderr_d2\n";
  for (const auto& s : res.fit.per_n)
    os << "#summary," << s.n << ',' << format_number(s.mean_d2) << ',' << format_number(s.mean_excess) << ','
       << format_number(s.stderr_d2) << '\n';
  os << "#fit,slope,intercept,r_squared,degenerate\n";
  os << "#fit," << format_number(res.fit.slope) << ',' << format_number(res.fit.intercept) << ','
     << format_number(res.fit.r_squared) << ',' << (res.fit.degenerate ? 1 : 0) << '\n';
}

/// One row per probe. k_integral is nan where no PC identity was evaluated;
/// violation refers to d2 <= K3 excess^beta.
inline void write_vi_csv(std::ostream& os, const std::vector<ViProbe>& probes, const std::vector<double>& k_integral,
                         double K3, double beta) {
  os << "probe_id,d2,excess,k_integral,violation\n";
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    const double k = i < k_integral.size() ? k_integral[i] : std::nan("");
    const bool bad = std::isfinite(p.excess) && detail::violates(p.d2, p.excess, K3, beta);
    os << i << ',' << format_number(p.d2) << ',' << format_number(p.excess) << ',' << format_number(k) << ','
       << (bad ? 1 : 0) << '\n';
  }
}

}  // namespace geobary

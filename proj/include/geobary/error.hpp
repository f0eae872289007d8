#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geobary {

enum class Errc {
  space_mismatch,
  non_unique_geodesic,
  cut_locus_ambiguity,
  base_mismatch,
  perimeter_too_large,
  degenerate_triangle,
  unsupported_target,
  invalid_point,
  non_spd,
  grid_mismatch,
  too_large_for_exact,
  incompatible_space,
  no_convergence,
  invalid_bounds,
  unknown_potential,
  degenerate_probes,
  not_pc_space,
  hypothesis_two_fails,
  empty_set,
  invalid_inputs,
  degenerate_input,
  population_solve_failed,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::space_mismatch: return "SpaceMismatch";
    case Errc::non_unique_geodesic: return "NonUniqueGeodesic";
    case Errc::cut_locus_ambiguity: return "CutLocusAmbiguity";
    case Errc::base_mismatch: return "BaseMismatch";
    case Errc::perimeter_too_large: return "PerimeterTooLarge";
    case Errc::degenerate_triangle: return "DegenerateTriangle";
    case Errc::unsupported_target: return "UnsupportedTarget";
    case Errc::invalid_point: return "InvalidPoint";
    case Errc::non_spd: return "NonSPD";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::too_large_for_exact: return "TooLargeForExact";
    case Errc::incompatible_space: return "IncompatibleSpace";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::invalid_bounds: return "InvalidBounds";
    case Errc::unknown_potential: return "UnknownPotential";
    case Errc::degenerate_probes: return "DegenerateProbes";
    case Errc::not_pc_space: return "NotPCSpace";
    case Errc::hypothesis_two_fails: return "HypothesisTwoFails";
    case Errc::empty_set: return "EmptySet";
    case Errc::invalid_inputs: return "InvalidInputs";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::population_solve_failed: return "PopulationSolveFailed";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace geobary

#pragma once

#include <array>

#include "core/covering.hpp"

namespace fhm {

/// Where a cell's identification point sits: between subcells 1 and 2 (x),
/// 2 and 3 (y), or 1 and 3 (z).
enum class CutAxis { none, x, y, z };

/// Energy-minimizing midpoint values on one triangle given corner values
/// (a, b, c); returns (x, y, z) = (mid ab, mid bc, mid ac).
std::array<Rat, 3> classical_extension(const std::array<Rat, 3>& corners);
std::array<double, 3> classical_extension(const std::array<double, 3>& corners);

/// Extension when one midpoint is split with value jump `shift` across the
/// given axis; the returned value on that axis is the minus-sheet one.
std::array<Rat, 3> jump_extension(const std::array<Rat, 3>& corners, long shift,
                                  CutAxis axis);
std::array<double, 3> jump_extension(const std::array<double, 3>& corners, long shift,
                                     CutAxis axis);

struct HarmonicMapResult {
  std::string fractal;
  int level = 0;
  DegreeVector degree;  // prescribed
  BoundaryData boundary;
  bool exact = false;
  LiftValues lift;  // canonical (minus-sheet) values
  std::unordered_map<VertexId, Rat, VertexIdHash> lift_exact;
  CircleMap circle;
  std::vector<CutPoint> cuts;
  std::vector<Cycle> cycles;  // loops to recover the degree at this level
  int basis_level = -1;       // cycle-basis level on the general route
  double energy = 0;
  double max_residual = 0;
};

/// Gasket solver: top-down cell recursion with jump extensions at the cut
/// cells. Exact rational arithmetic through level 12, doubles beyond. The
/// outer winding is taken from the degree vector's first entry.
HarmonicMapResult solve_sg(const Fractal& f, const DegreeVector& deg,
                           const BoundaryData& bc, int level);

/// General route: minimizes the quadratic energy on a cut graph subject to
/// boundary values and the jump identifications.
HarmonicMapResult solve_pcf(const CutGraph& cg);

struct SolveOptions {
  bool force_pcf = false;
  int basis_level = -1;  // -1: smallest basis covering the degree vector
};

/// Dispatches to solve_sg on the gasket (unless forced) and otherwise runs
/// basis -> cuts -> cut graph -> solve_pcf, embedding the oriented basis
/// cycles up to the solve level for degree recovery.
HarmonicMapResult solve_harmonic_map(const Fractal& f, const HarmonicStructure& s,
                                     const DegreeVector& deg, const BoundaryData& bc,
                                     int level, const SolveOptions& opt = {});

double graph_energy(const ApproxGraph& g, const LiftValues& values);
double graph_energy(const CutGraph& cg, const std::vector<double>& split);

/// Per-vertex split values (plus copies resolved as minus + shift).
std::vector<double> split_values(const CutGraph& cg, const LiftValues& lift);

/// Sum of squared geodesic circle distances, conductance-weighted.
double circle_energy(const ApproxGraph& g, const CircleMap& f);

/// Conductance-weighted residual of the glued Laplacian at the non-boundary
/// vertices; cut vertices get the sum of both one-sided residuals.
std::unordered_map<VertexId, double, VertexIdHash> laplacian_residual(
    const CutGraph& cg, const std::vector<double>& split);

/// Trace of the level-1 network on the boundary: the effective conductance
/// form after eliminating interior vertices.
std::vector<std::vector<double>> renormalize_form(const Fractal& f,
                                                  const HarmonicStructure& s);

/// The uniform resistance weight making the base form self-reproducing, if
/// one exists within the tolerance.
double find_renormalization_factor(const Fractal& f,
                                   const std::vector<std::vector<double>>& base_form,
                                   double tol);

}  // namespace fhm

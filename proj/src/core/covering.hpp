#pragma once

#include <unordered_map>
#include <vector>

#include "core/graph.hpp"
#include "core/rational.hpp"

namespace fhm {

/// Prescribed windings, indexed by canonical loop index on the gasket or by
/// basis-cycle position in general. Trailing zeros are immaterial.
struct DegreeVector {
  std::vector<long> entries;

  long at(size_t i) const { return i < entries.size() ? entries[i] : 0; }
  size_t trimmed_size() const;
  int order() const;  // least N whose loop range covers every nonzero entry
};

bool same_degree(const DegreeVector& a, const DegreeVector& b);

/// Boundary increments delta_1..delta_{k-1} walked along the boundary list,
/// plus the winding prescribed around the outer boundary.
struct BoundaryData {
  std::vector<Rat> deltas;
  long rho0 = 0;

  std::vector<double> deltas_f() const;
};

/// A two-sheet identification point: the minus itinerary is the canonical one,
/// and values satisfy f(plus) = f(minus) + shift.
struct CutPoint {
  VertexId vertex;
  Itinerary minus_it;
  Itinerary plus_it;
  long shift = 0;
  Word cell;       // owning cell for gasket cuts
  long index = 0;  // loop or basis-cycle index
};

/// Cut system for the gasket: one cut per cell of order up to the degree
/// vector's order, shifts chosen so each cell boundary winds by its entry.
std::vector<CutPoint> sg_cut_points(const DegreeVector& deg);

struct PcfCuts {
  std::vector<CutPoint> cuts;
  std::vector<Cycle> cycles;  // embedded basis cycles, oriented plus-to-minus
};

/// Chooses one admissible cut on each refined basis cycle (interior of the
/// generator edge's refinement, absent from every other cycle, exactly two
/// addresses, not a boundary point) and orients the cycles so each winds by
/// the matching degree entry.
PcfCuts pcf_cut_points(const Fractal& f, const ApproxGraph& coarse,
                       const ApproxGraph& fine, const CycleBasis& basis,
                       const DegreeVector& deg);

/// A graph with cut vertices split in two. Minus copies keep their base index;
/// the plus copy of cuts[i] is vertex base->vertices.size() + i.
struct CutGraph {
  const ApproxGraph* base = nullptr;
  std::vector<CutPoint> cuts;
  std::vector<int> cut_minus;  // base index per cut
  std::vector<GraphEdge> edges;
  std::vector<std::vector<std::pair<int, int>>> adj;
  std::vector<std::pair<int, double>> assignments;  // boundary vertex -> value
  std::vector<std::pair<int, Rat>> assignments_exact;
  BoundaryData bc;

  int total_vertices() const {
    return static_cast<int>(base->vertices.size() + cuts.size());
  }
};

CutGraph build_cut_graph(const ApproxGraph& g, const std::vector<CutPoint>& cuts,
                         const BoundaryData& bc);

/// Circle-valued vertex data, values in [0,1).
struct CircleMap {
  int level = 0;
  std::unordered_map<VertexId, double, VertexIdHash> values;
};

using LiftValues = std::unordered_map<VertexId, double, VertexIdHash>;

LiftValues lift_sheet(const LiftValues& values, long k);
CircleMap project_to_circle(const LiftValues& values, int level);

/// Wraps each consecutive increment to the nearest representative and sums;
/// increments must stay strictly below a quarter turn.
long winding_number(const std::vector<double>& closed_walk_values);

DegreeVector degree_vector(const LiftValues& values, const std::vector<Cycle>& loops);
bool homotopic(const LiftValues& a, const LiftValues& b, const std::vector<Cycle>& loops);

}  // namespace fhm

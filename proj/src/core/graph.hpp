#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "core/geometry.hpp"

namespace fhm {

/// Self-similar resistance data: a conductance Laplacian on the boundary set
/// (zero row sums, off-diagonal -c_ij) plus one resistance weight per map.
/// Level-m cells carry the base form scaled by prod_i 1/r_{w_i}.
struct HarmonicStructure {
  std::vector<std::vector<double>> base_form;
  std::vector<double> weights;
};

/// The standard structure for a catalog fractal (unit conductances except the
/// pentagasket, whose diagonal pairs differ; weights from the known or
/// numerically determined renormalization factor).
HarmonicStructure default_structure(const Fractal& f);

struct GraphEdge {
  int u = 0, v = 0;    // vertex indices, u < v
  double c = 0;        // conductance
  int cell = -1;       // generating cell index
  bool shared = false; // true if a second cell contributed the same edge
};

struct ApproxGraph {
  const Fractal* fractal = nullptr;
  int level = 0;
  std::vector<VertexId> vertices;  // ascending canonical order
  std::unordered_map<VertexId, int, VertexIdHash> index;
  std::vector<GraphEdge> edges;    // sorted by (u, v)
  std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (neighbor, edge)
  std::vector<Word> cells;                       // all level words, lex order
  std::vector<std::vector<int>> cell_vertices;   // per cell, per boundary position

  int find_vertex(const VertexId& v) const {
    auto it = index.find(v);
    return it == index.end() ? -1 : it->second;
  }
};

ApproxGraph build_graph(const Fractal& f, const HarmonicStructure& s, int level);

/// Closed walk, stored without repeating the start vertex.
struct Cycle {
  std::vector<VertexId> verts;
  int level = 0;
  Word word;       // defining cell for canonical loops, empty otherwise
  long index = -1; // canonical loop index or basis position
};

/// Loops around every cell boundary of the gasket up to the given order,
/// indexed canonically and traced in the level-`level` graph.
struct LoopList {
  std::vector<Cycle> loops;
  int max_order = 0;
  int level = 0;
};

long loop_index(const Word& w);
LoopList cell_loops(const Fractal& f, int max_order, int level);

struct CycleBasis {
  int level = 0;
  std::vector<std::pair<VertexId, VertexId>> tree_edges;
  std::vector<Cycle> cycles;  // one per non-tree edge, generator traversed first
  std::vector<std::pair<VertexId, VertexId>> generator_edges;
};

int cycle_space_dim(const ApproxGraph& g);
CycleBasis spanning_tree_basis(const ApproxGraph& g);

/// Refines a level-m cycle into the level-(m+1) graph, replacing each edge by
/// the unique shortest path inside the cell that generated it.
Cycle embed_cycle(const ApproxGraph& coarse, const ApproxGraph& fine, const Cycle& c);

/// The unique shortest path (inclusive of both ends) replacing one coarse edge
/// in the next graph, confined to the cell the edge came from.
std::vector<VertexId> refine_edge(const ApproxGraph& coarse, const ApproxGraph& fine,
                                  const VertexId& a, const VertexId& b);

/// True when the vertex lies in the closed cell named by the word.
bool vertex_in_cell(const Fractal& f, const VertexId& v, const Word& cell);

}  // namespace fhm

#include "core/covering.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "core/error.hpp"

namespace fhm {

namespace {

long pow3(int n) {
  long p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return p;
}

// True when the address lies inside the cell named by the word (the prefix,
// padded with the tail letter, starts with the word).
bool in_cell(const Itinerary& it, const Word& cell) {
  for (size_t i = 0; i < cell.size(); ++i) {
    Letter li = i < it.prefix.size() ? it.prefix[i] : it.tail;
    if (li != cell[i]) return false;
  }
  return true;
}

}  // namespace

size_t DegreeVector::trimmed_size() const {
  size_t n = entries.size();
  while (n > 0 && entries[n - 1] == 0) --n;
  return n;
}

int DegreeVector::order() const {
  long last = -1;
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i] != 0) last = static_cast<long>(i);
  int order = 0;
  while ((pow3(order + 1) - 3) / 2 < last) ++order;
  return order;
}

bool same_degree(const DegreeVector& a, const DegreeVector& b) {
  size_t n = std::max(a.entries.size(), b.entries.size());
  for (size_t i = 0; i < n; ++i)
    if (a.at(i) != b.at(i)) return false;
  return true;
}

std::vector<double> BoundaryData::deltas_f() const {
  std::vector<double> out;
  out.reserve(deltas.size());
  for (const Rat& d : deltas) out.push_back(d.get_d());
  return out;
}

std::vector<CutPoint> sg_cut_points(const DegreeVector& deg) {
  const int order = deg.order();
  std::vector<CutPoint> cuts;
  cuts.reserve(static_cast<size_t>((pow3(order + 1) - 1) / 2));

  CutPoint root;
  root.minus_it = Itinerary{{1}, 3};
  root.plus_it = Itinerary{{3}, 1};
  root.vertex = VertexId{root.minus_it};
  root.shift = deg.at(0);
  root.index = 0;
  cuts.push_back(root);

  std::vector<Word> cells;
  std::vector<Word> frontier{Word{}};
  for (int len = 1; len <= order; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (Letter a = 1; a <= 3; ++a) {
        Word u = w;
        u.push_back(a);
        next.push_back(u);
        cells.push_back(u);
      }
    }
    frontier = std::move(next);
  }

  for (const Word& u : cells) {
    CutPoint cp;
    cp.cell = u;
    cp.index = loop_index(u);
    long rho = deg.at(static_cast<size_t>(cp.index));
    Word a = u, b = u;
    switch (u.back()) {
      case 1:  // cut at the cell's far side midpoint, between subcells 2 and 3
        a.push_back(2);
        b.push_back(3);
        cp.minus_it = Itinerary{a, 3};
        cp.plus_it = Itinerary{b, 2};
        cp.shift = -rho;
        break;
      case 2:  // between subcells 1 and 3
        a.push_back(1);
        b.push_back(3);
        cp.minus_it = Itinerary{a, 3};
        cp.plus_it = Itinerary{b, 1};
        cp.shift = rho;
        break;
      default:  // between subcells 1 and 2
        a.push_back(1);
        b.push_back(2);
        cp.minus_it = Itinerary{a, 2};
        cp.plus_it = Itinerary{b, 1};
        cp.shift = -rho;
        break;
    }
    cp.vertex = VertexId{normalize_itinerary(cp.minus_it)};
    cuts.push_back(cp);
  }
  std::sort(cuts.begin(), cuts.end(),
            [](const CutPoint& x, const CutPoint& y) { return x.index < y.index; });
  return cuts;
}

PcfCuts pcf_cut_points(const Fractal& f, const ApproxGraph& coarse,
                       const ApproxGraph& fine, const CycleBasis& basis,
                       const DegreeVector& deg) {
  if (deg.trimmed_size() > basis.cycles.size())
    fail(Errc::bad_argument, "degree vector is longer than the cycle basis");

  PcfCuts out;
  out.cycles.reserve(basis.cycles.size());
  for (const Cycle& c : basis.cycles) out.cycles.push_back(embed_cycle(coarse, fine, c));

  std::vector<std::unordered_set<VertexId, VertexIdHash>> on_cycle(out.cycles.size());
  for (size_t i = 0; i < out.cycles.size(); ++i)
    on_cycle[i].insert(out.cycles[i].verts.begin(), out.cycles[i].verts.end());

  for (size_t i = 0; i < basis.cycles.size(); ++i) {
    auto [a, b] = basis.generator_edges[i];
    std::vector<VertexId> path = refine_edge(coarse, fine, a, b);

    VertexId chosen;
    bool found = false;
    for (size_t k = 1; k + 1 < path.size(); ++k) {
      const VertexId& v = path[k];
      if (f.is_boundary(v)) continue;
      if (f.itineraries_of(v).size() != 2) continue;
      bool clash = false;
      for (size_t j = 0; j < out.cycles.size() && !clash; ++j)
        if (j != i && on_cycle[j].count(v)) clash = true;
      if (clash) continue;
      if (std::count(out.cycles[i].verts.begin(), out.cycles[i].verts.end(), v) != 1)
        continue;
      if (!found || v < chosen) {
        chosen = v;
        found = true;
      }
    }
    if (!found)
      fail(Errc::no_admissible_cut,
           "no admissible cut on basis cycle " + std::to_string(i));

    std::vector<Itinerary> its = f.itineraries_of(chosen);
    std::sort(its.begin(), its.end(), itinerary_less);
    CutPoint cp;
    cp.vertex = chosen;
    cp.minus_it = its[0];
    cp.plus_it = its[1];
    cp.shift = deg.at(i);
    cp.index = static_cast<long>(i);

    // Orient the cycle so it crosses the cut from the plus sheet into the
    // minus sheet; the loop then winds by exactly the prescribed entry.
    Cycle& cyc = out.cycles[i];
    const size_t n = cyc.verts.size();
    size_t pos = 0;
    while (pos < n && !(cyc.verts[pos] == chosen)) ++pos;
    const VertexId& prev = cyc.verts[(pos + n - 1) % n];
    int fp = fine.find_vertex(prev), fv = fine.find_vertex(chosen);
    const GraphEdge* edge = nullptr;
    for (auto [w, ei] : fine.adj[fp])
      if (w == fv) {
        edge = &fine.edges[ei];
        break;
      }
    if (!edge) fail(Errc::internal, "cycle step is not a graph edge");
    if (edge->shared)
      fail(Errc::ambiguous_path, "cut-incident edge belongs to two cells");
    const Word& cell = fine.cells[edge->cell];
    if (in_cell(cp.minus_it, cell)) {
      std::reverse(cyc.verts.begin(), cyc.verts.end());
    } else if (!in_cell(cp.plus_it, cell)) {
      fail(Errc::internal, "cut-incident edge lies on neither sheet");
    }
    out.cuts.push_back(cp);
  }
  return out;
}

CutGraph build_cut_graph(const ApproxGraph& g, const std::vector<CutPoint>& cuts,
                         const BoundaryData& bc) {
  const Fractal& f = *g.fractal;
  if (bc.deltas.size() + 1 != f.boundary().size())
    fail(Errc::bad_argument, "need one boundary increment per boundary step");

  CutGraph cg;
  cg.base = &g;
  cg.cuts = cuts;
  cg.bc = bc;
  const int base_count = static_cast<int>(g.vertices.size());

  std::unordered_map<int, int> cut_at;
  for (size_t i = 0; i < cuts.size(); ++i) {
    int idx = g.find_vertex(cuts[i].vertex);
    if (idx < 0)
      fail(Errc::cut_not_in_graph,
           "cut vertex " + std::to_string(i) + " is not present at this level");
    if (f.is_boundary(cuts[i].vertex))
      fail(Errc::cut_on_boundary, "cut vertex " + std::to_string(i) + " is a boundary point");
    if (!cut_at.emplace(idx, static_cast<int>(i)).second)
      fail(Errc::bad_argument, "cut vertices must be distinct");
    cg.cut_minus.push_back(idx);
  }

  cg.edges = g.edges;
  for (GraphEdge& e : cg.edges) {
    const Word& cell = g.cells[e.cell];
    for (int* end : {&e.u, &e.v}) {
      auto it = cut_at.find(*end);
      if (it == cut_at.end()) continue;
      if (e.shared)
        fail(Errc::bad_argument, "cut vertex sits on an edge shared between cells");
      const CutPoint& cp = cuts[static_cast<size_t>(it->second)];
      if (in_cell(cp.plus_it, cell)) {
        *end = base_count + it->second;
      } else if (!in_cell(cp.minus_it, cell)) {
        fail(Errc::internal, "edge cell touches neither sheet of its cut");
      }
    }
  }

  cg.adj.assign(static_cast<size_t>(cg.total_vertices()), {});
  for (size_t ei = 0; ei < cg.edges.size(); ++ei) {
    const GraphEdge& e = cg.edges[ei];
    cg.adj[e.u].push_back({e.v, static_cast<int>(ei)});
    cg.adj[e.v].push_back({e.u, static_cast<int>(ei)});
  }
  for (auto& lst : cg.adj) std::sort(lst.begin(), lst.end());

  Rat val = 0;
  const auto& walk = f.boundary();
  for (size_t i = 0; i < walk.size(); ++i) {
    if (i > 0) val += bc.deltas[i - 1];
    int idx = g.find_vertex(walk[i]);
    if (idx < 0) fail(Errc::internal, "boundary vertex missing from graph");
    cg.assignments.push_back({idx, val.get_d()});
    cg.assignments_exact.push_back({idx, val});
  }
  return cg;
}

LiftValues lift_sheet(const LiftValues& values, long k) {
  LiftValues out = values;
  for (auto& [v, x] : out) x += static_cast<double>(k);
  return out;
}

CircleMap project_to_circle(const LiftValues& values, int level) {
  CircleMap out;
  out.level = level;
  out.values.reserve(values.size());
  for (const auto& [v, x] : values) {
    double y = x - std::floor(x);
    if (y >= 1.0) y -= 1.0;
    if (y < 0.0) y = 0.0;
    out.values[v] = y;
  }
  return out;
}

long winding_number(const std::vector<double>& closed_walk_values) {
  const size_t n = closed_walk_values.size();
  if (n < 2) return 0;
  double sum = 0;
  for (size_t i = 0; i < n; ++i) {
    double d = closed_walk_values[(i + 1) % n] - closed_walk_values[i];
    double r = d - std::ceil(d - 0.5);
    if (std::abs(r) >= 0.25)
      fail(Errc::increment_too_large,
           "winding increment reached a quarter turn; refine the level");
    sum += r;
  }
  long w = std::lround(sum);
  if (std::abs(sum - static_cast<double>(w)) > 1e-6)
    fail(Errc::internal, "loop increments did not close to an integer");
  return w;
}

DegreeVector degree_vector(const LiftValues& values, const std::vector<Cycle>& loops) {
  DegreeVector deg;
  deg.entries.reserve(loops.size());
  std::vector<double> vals;
  for (size_t k = 0; k < loops.size(); ++k) {
    vals.clear();
    for (const VertexId& v : loops[k].verts) {
      auto it = values.find(v);
      if (it == values.end())
        fail(Errc::missing_value, "loop " + std::to_string(k) +
                                      " visits a vertex with no value; refine the level");
      vals.push_back(it->second);
    }
    deg.entries.push_back(winding_number(vals));
  }
  while (!deg.entries.empty() && deg.entries.back() == 0) deg.entries.pop_back();
  return deg;
}

bool homotopic(const LiftValues& a, const LiftValues& b, const std::vector<Cycle>& loops) {
  return same_degree(degree_vector(a, loops), degree_vector(b, loops));
}

}  // namespace fhm

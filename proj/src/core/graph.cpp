#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>

#include "core/error.hpp"

namespace fhm {

namespace {

std::vector<std::vector<double>> unit_form(int n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, -1.0));
  for (int i = 0; i < n; ++i) m[i][i] = n - 1.0;
  return m;
}

// Fixtures determined by solving the renormalization fixed point numerically
// (the roots of 4r^2+9r-5 and 5c^2-c-8); the tests re-check that each
// structure reproduces itself under renormalization.
const double kHexagasketR = 3.0 / 7.0;
const double kPentagasketR = (std::sqrt(161.0) - 9.0) / 8.0;
const double kPentagasketCross = (1.0 + std::sqrt(161.0)) / 10.0;

}  // namespace

HarmonicStructure default_structure(const Fractal& f) {
  HarmonicStructure s;
  const int n = static_cast<int>(f.letter_count());
  if (f.name() == "sg") {
    s.base_form = unit_form(3);
    s.weights.assign(n, 3.0 / 5.0);
    return s;
  }
  if (f.name() == "sg3") {
    s.base_form = unit_form(3);
    s.weights.assign(n, 7.0 / 15.0);
    return s;
  }
  if (f.name() == "hexagasket") {
    s.base_form = unit_form(3);
    s.weights.assign(n, kHexagasketR);
    return s;
  }
  if (f.name() == "pentagasket") {
    // the reflection swapping v2 and v3 forces c12 = c13; c23 differs
    const double a = 1.0, c = kPentagasketCross;
    s.base_form = {{2 * a, -a, -a}, {-a, a + c, -c}, {-a, -c, a + c}};
    s.weights.assign(n, kPentagasketR);
    return s;
  }
  fail(Errc::unsupported_fractal,
       "no default structure for '" + f.name() + "'; supply one explicitly");
}

namespace {

void enumerate_words(int n, int len, Word& w, std::vector<Word>& out) {
  if (static_cast<int>(w.size()) == len) {
    out.push_back(w);
    return;
  }
  for (Letter a = 1; a <= n; ++a) {
    w.push_back(a);
    enumerate_words(n, len, w, out);
    w.pop_back();
  }
}

}  // namespace

ApproxGraph build_graph(const Fractal& f, const HarmonicStructure& s, int level) {
  const int n = static_cast<int>(f.letter_count());
  const int b = static_cast<int>(f.boundary().size());
  if (level < 0) fail(Errc::bad_argument, "graph level must be nonnegative");
  if (static_cast<int>(s.weights.size()) != n)
    fail(Errc::bad_argument, "structure needs one weight per map");
  if (static_cast<int>(s.base_form.size()) != b)
    fail(Errc::bad_argument, "base form size must match the boundary set");
  for (double r : s.weights)
    if (!(r > 0.0 && r < 1.0))
      fail(Errc::bad_argument, "resistance weights must lie in (0,1)");

  double est = static_cast<double>(b);
  for (int i = 0; i < level; ++i) est *= n;
  if (est > static_cast<double>(1 << 24))
    fail(Errc::level_too_large, "refusing to build a graph this large");

  ApproxGraph g;
  g.fractal = &f;
  g.level = level;
  Word scratch;
  enumerate_words(n, level, scratch, g.cells);

  // Canonical vertex ids per cell corner, then a sorted global vertex list.
  std::vector<std::vector<VertexId>> corner_ids(g.cells.size());
  std::vector<VertexId> all;
  for (size_t ci = 0; ci < g.cells.size(); ++ci) {
    corner_ids[ci].reserve(b);
    for (int j = 1; j <= b; ++j) {
      VertexId v = f.vertex(g.cells[ci], j);
      corner_ids[ci].push_back(v);
      all.push_back(v);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  g.vertices = std::move(all);
  g.index.reserve(g.vertices.size() * 2);
  for (size_t i = 0; i < g.vertices.size(); ++i)
    g.index[g.vertices[i]] = static_cast<int>(i);

  g.cell_vertices.resize(g.cells.size());
  std::map<std::pair<int, int>, int> edge_at;
  for (size_t ci = 0; ci < g.cells.size(); ++ci) {
    double scale = 1.0;
    for (Letter a : g.cells[ci]) scale /= s.weights[a - 1];
    auto& cv = g.cell_vertices[ci];
    cv.resize(b);
    for (int j = 0; j < b; ++j) cv[j] = g.index.at(corner_ids[ci][j]);
    for (int p = 0; p < b; ++p) {
      for (int q = p + 1; q < b; ++q) {
        double c = -s.base_form[p][q];
        if (c == 0.0) continue;
        if (c < 0.0) fail(Errc::bad_argument, "base form has negative conductance");
        int u = cv[p], v = cv[q];
        if (u == v) fail(Errc::internal, "cell corners collapsed to one vertex");
        if (u > v) std::swap(u, v);
        auto key = std::make_pair(u, v);
        auto it = edge_at.find(key);
        if (it == edge_at.end()) {
          GraphEdge e;
          e.u = u;
          e.v = v;
          e.c = c * scale;
          e.cell = static_cast<int>(ci);
          g.edges.push_back(e);
          edge_at[key] = static_cast<int>(g.edges.size()) - 1;
        } else {
          GraphEdge& e = g.edges[it->second];
          e.c += c * scale;
          if (e.cell != static_cast<int>(ci)) e.shared = true;
        }
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b2) {
    return std::make_pair(a.u, a.v) < std::make_pair(b2.u, b2.v);
  });

  g.adj.assign(g.vertices.size(), {});
  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    const GraphEdge& e = g.edges[ei];
    g.adj[e.u].push_back({e.v, static_cast<int>(ei)});
    g.adj[e.v].push_back({e.u, static_cast<int>(ei)});
  }
  for (auto& lst : g.adj) std::sort(lst.begin(), lst.end());
  return g;
}

long loop_index(const Word& w) {
  long idx = 0;
  long p = 1;
  for (Letter a : w) {
    idx += static_cast<long>(a) * p;
    p *= 3;
  }
  return idx;
}

namespace {

void refine_side(const Fractal& f, const Word& cell, Letter a, Letter b, int level,
                 std::vector<VertexId>& out) {
  if (static_cast<int>(cell.size()) == level) {
    if (out.empty()) out.push_back(f.vertex(cell, a));
    out.push_back(f.vertex(cell, b));
    return;
  }
  Word wa = cell, wb = cell;
  wa.push_back(a);
  wb.push_back(b);
  refine_side(f, wa, a, b, level, out);
  refine_side(f, wb, a, b, level, out);
}

}  // namespace

LoopList cell_loops(const Fractal& f, int max_order, int level) {
  if (f.name() != "sg")
    fail(Errc::unsupported_fractal, "cell loops are defined for the gasket only");
  if (max_order < 0) fail(Errc::bad_argument, "loop order must be nonnegative");
  if (level < max_order + 1)
    fail(Errc::level_too_small, "loop windings alias below level order+1");

  LoopList out;
  out.max_order = max_order;
  out.level = level;
  long count = 1;
  for (int i = 0; i <= max_order; ++i) count *= 3;
  count = (count - 1) / 2;
  std::vector<Word> words;
  Word scratch;
  for (int len = 0; len <= max_order; ++len) enumerate_words(3, len, scratch, words);
  out.loops.resize(static_cast<size_t>(count));
  for (const Word& w : words) {
    std::vector<VertexId> verts;
    refine_side(f, w, 1, 2, level, verts);
    refine_side(f, w, 2, 3, level, verts);
    std::vector<VertexId> back;
    refine_side(f, w, 3, 1, level, back);
    verts.insert(verts.end(), back.begin() + 1, back.end() - 1);
    Cycle c;
    c.verts = std::move(verts);
    c.level = level;
    c.word = w;
    c.index = loop_index(w);
    out.loops[static_cast<size_t>(c.index)] = std::move(c);
  }
  return out;
}

namespace {

int component_count(const ApproxGraph& g) {
  std::vector<int> parent(g.vertices.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = static_cast<int>(g.vertices.size());
  for (const GraphEdge& e : g.edges) {
    int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

}  // namespace

int cycle_space_dim(const ApproxGraph& g) {
  return static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) +
         component_count(g);
}

CycleBasis spanning_tree_basis(const ApproxGraph& g) {
  const int nv = static_cast<int>(g.vertices.size());
  if (nv == 0) fail(Errc::bad_argument, "empty graph");
  std::vector<int> parent(nv, -1), depth(nv, 0);
  std::vector<char> visited(nv, 0);
  std::vector<char> tree_edge(g.edges.size(), 0);

  // Depth-first from the least vertex, descending along ascending neighbors.
  struct Frame {
    int v;
    size_t next;
  };
  std::vector<Frame> stack;
  visited[0] = 1;
  stack.push_back({0, 0});
  while (!stack.empty()) {
    Frame& fr = stack.back();
    if (fr.next == g.adj[fr.v].size()) {
      stack.pop_back();
      continue;
    }
    auto [w, ei] = g.adj[fr.v][fr.next++];
    if (visited[w]) continue;
    visited[w] = 1;
    parent[w] = fr.v;
    depth[w] = depth[fr.v] + 1;
    tree_edge[ei] = 1;
    stack.push_back({w, 0});
  }

  CycleBasis basis;
  basis.level = g.level;
  for (size_t ei = 0; ei < g.edges.size(); ++ei)
    if (tree_edge[ei])
      basis.tree_edges.push_back({g.vertices[g.edges[ei].u], g.vertices[g.edges[ei].v]});

  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    if (tree_edge[ei]) continue;
    int u = g.edges[ei].u, v = g.edges[ei].v;
    if (!visited[u] || !visited[v])
      fail(Errc::bad_argument, "graph is not connected");
    std::vector<int> pu{u}, pv{v};
    int a = u, b = v;
    while (depth[a] > depth[b]) pu.push_back(a = parent[a]);
    while (depth[b] > depth[a]) pv.push_back(b = parent[b]);
    while (a != b) {
      pu.push_back(a = parent[a]);
      pv.push_back(b = parent[b]);
    }
    // Walk: u, generator edge to v, then v's climb to the meet point, then back
    // down toward u (meet point and u itself excluded).
    std::vector<int> walk{u};
    walk.insert(walk.end(), pv.begin(), pv.end());
    for (size_t k = pu.size() - 1; k >= 2; --k) walk.push_back(pu[k - 1]);
    if (walk.back() == walk.front()) walk.pop_back();
    Cycle c;
    c.level = g.level;
    c.index = static_cast<long>(basis.cycles.size());
    c.verts.reserve(walk.size());
    for (int idx : walk) c.verts.push_back(g.vertices[idx]);
    basis.cycles.push_back(std::move(c));
    basis.generator_edges.push_back({g.vertices[u], g.vertices[v]});
  }
  return basis;
}

bool vertex_in_cell(const Fractal& f, const VertexId& v, const Word& cell) {
  for (const Itinerary& it : f.itineraries_of(v)) {
    bool ok = true;
    for (size_t i = 0; i < cell.size(); ++i) {
      Letter li = i < it.prefix.size() ? it.prefix[i] : it.tail;
      if (li != cell[i]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

namespace {

// Unique shortest path between two fine vertices, restricted to one cell.
std::vector<int> unique_cell_path(const ApproxGraph& fine, const Word& cell, int src,
                                  int dst) {
  const Fractal& f = *fine.fractal;
  std::vector<int> dist(fine.vertices.size(), -1), paths(fine.vertices.size(), 0),
      from(fine.vertices.size(), -1);
  std::deque<int> queue{src};
  dist[src] = 0;
  paths[src] = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    if (x == dst) break;
    for (auto [y, ei] : fine.adj[x]) {
      (void)ei;
      if (!vertex_in_cell(f, fine.vertices[y], cell)) continue;
      if (dist[y] == -1) {
        dist[y] = dist[x] + 1;
        paths[y] = paths[x];
        from[y] = x;
        queue.push_back(y);
      } else if (dist[y] == dist[x] + 1) {
        paths[y] = std::min(paths[y] + paths[x], 2);
      }
    }
  }
  if (dist[dst] == -1)
    fail(Errc::internal, "cell subgraph lost connectivity during refinement");
  if (paths[dst] > 1)
    fail(Errc::ambiguous_path, "shortest refinement path is not unique");
  std::vector<int> path;
  for (int x = dst; x != -1; x = from[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<VertexId> refine_edge(const ApproxGraph& coarse, const ApproxGraph& fine,
                                  const VertexId& a, const VertexId& b) {
  if (fine.level != coarse.level + 1)
    fail(Errc::bad_argument, "refinement target must be one level deeper");
  int ca = coarse.find_vertex(a), cb = coarse.find_vertex(b);
  if (ca < 0 || cb < 0) fail(Errc::bad_argument, "edge endpoint not in graph");
  const GraphEdge* edge = nullptr;
  for (auto [w, ei] : coarse.adj[ca]) {
    if (w == cb) {
      edge = &coarse.edges[ei];
      break;
    }
  }
  if (!edge) fail(Errc::bad_argument, "cycle edge not in graph");
  if (edge->shared)
    fail(Errc::ambiguous_path, "edge belongs to two cells; refinement is ambiguous");
  int fa = fine.find_vertex(a), fb = fine.find_vertex(b);
  if (fa < 0 || fb < 0)
    fail(Errc::internal, "coarse vertex missing from the refined graph");
  std::vector<int> path = unique_cell_path(fine, coarse.cells[edge->cell], fa, fb);
  std::vector<VertexId> out;
  out.reserve(path.size());
  for (int idx : path) out.push_back(fine.vertices[idx]);
  return out;
}

Cycle embed_cycle(const ApproxGraph& coarse, const ApproxGraph& fine, const Cycle& c) {
  Cycle out;
  out.level = fine.level;
  out.word = c.word;
  out.index = c.index;
  const size_t n = c.verts.size();
  for (size_t i = 0; i < n; ++i) {
    std::vector<VertexId> path =
        refine_edge(coarse, fine, c.verts[i], c.verts[(i + 1) % n]);
    out.verts.insert(out.verts.end(), path.begin(), path.end() - 1);
  }
  return out;
}

}  // namespace fhm

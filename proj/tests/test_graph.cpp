#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/graph.hpp"
#include "doctest.h"

using namespace fhm;

namespace {

// Oracle: for a connected graph the cycle space has dimension E - V + 1.
int euler_dim(const ApproxGraph& g) {
  return static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + 1;
}

bool edge_exists(const ApproxGraph& g, int u, int v) {
  for (const auto& [nb, ei] : g.adj[u])
    if (nb == v) return true;
  return false;
}

// A cycle must walk along graph edges and close up.
bool is_closed_walk(const ApproxGraph& g, const Cycle& c) {
  const size_t n = c.verts.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    int u = g.find_vertex(c.verts[i]);
    int v = g.find_vertex(c.verts[(i + 1) % n]);
    if (u < 0 || v < 0 || !edge_exists(g, u, v)) return false;
  }
  return true;
}

long loop_index_oracle(const Word& w) {
  long s = 0, p = 1;
  for (Letter l : w) {
    s += l * p;
    p *= 3;
  }
  return s;
}

}  // namespace

TEST_CASE("gasket graph counts and conductances") {
  Fractal f = Fractal::catalog("sg");
  HarmonicStructure s = default_structure(f);
  REQUIRE(s.weights.size() == 3);
  CHECK(s.weights[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(s.base_form[0][1] == doctest::Approx(-1.0));

  for (int m = 0; m <= 4; ++m) {
    ApproxGraph g = build_graph(f, s, m);
    CHECK(g.vertices.size() == 3 * (std::lround(std::pow(3, m)) + 1) / 2);
    CHECK(g.edges.size() == std::lround(std::pow(3, m + 1)));
    CHECK(g.cells.size() == std::lround(std::pow(3, m)));
    CHECK(cycle_space_dim(g) == euler_dim(g));
    double want = std::pow(5.0 / 3.0, m);
    for (const GraphEdge& e : g.edges) {
      CHECK(e.c == doctest::Approx(want).epsilon(1e-12));
      CHECK(e.u < e.v);
    }
  }
  // dimensions 1, 4, 13 at levels 0, 1, 2
  CHECK(cycle_space_dim(build_graph(f, s, 0)) == 1);
  CHECK(cycle_space_dim(build_graph(f, s, 1)) == 4);
  CHECK(cycle_space_dim(build_graph(f, s, 2)) == 13);
}

TEST_CASE("cell corner bookkeeping") {
  Fractal f = Fractal::catalog("sg");
  ApproxGraph g = build_graph(f, default_structure(f), 2);
  REQUIRE(g.cell_vertices.size() == g.cells.size());
  for (size_t ci = 0; ci < g.cells.size(); ++ci) {
    REQUIRE(g.cell_vertices[ci].size() == 3);
    for (int j = 1; j <= 3; ++j) {
      int vi = g.cell_vertices[ci][j - 1];
      CHECK(g.vertices[vi] == f.vertex(g.cells[ci], j));
    }
  }
  // vertices ascend canonically, edges sorted
  for (size_t i = 1; i < g.vertices.size(); ++i) CHECK(g.vertices[i - 1] < g.vertices[i]);
  for (size_t i = 1; i < g.edges.size(); ++i) {
    bool ordered = g.edges[i - 1].u < g.edges[i].u ||
                   (g.edges[i - 1].u == g.edges[i].u && g.edges[i - 1].v <= g.edges[i].v);
    CHECK(ordered);
  }
}

TEST_CASE("other catalog graphs at level 1") {
  Fractal sg3 = Fractal::catalog("sg3");
  ApproxGraph a = build_graph(sg3, default_structure(sg3), 1);
  CHECK(a.vertices.size() == 10);
  CHECK(a.edges.size() == 18);
  CHECK(cycle_space_dim(a) == 9);
  CHECK(default_structure(sg3).weights[0] == doctest::Approx(7.0 / 15).epsilon(1e-12));

  Fractal hexa = Fractal::catalog("hexagasket");
  ApproxGraph b = build_graph(hexa, default_structure(hexa), 1);
  CHECK(b.vertices.size() == 12);
  CHECK(b.edges.size() == 18);
  CHECK(cycle_space_dim(b) == 7);
  CHECK(default_structure(hexa).weights[0] == doctest::Approx(3.0 / 7).epsilon(1e-12));

  Fractal penta = Fractal::catalog("pentagasket");
  HarmonicStructure ps = default_structure(penta);
  ApproxGraph c = build_graph(penta, ps, 1);
  CHECK(c.vertices.size() == 10);
  CHECK(c.edges.size() == 15);
  CHECK(cycle_space_dim(c) == 6);
  ApproxGraph c2 = build_graph(penta, ps, 2);
  CHECK(c2.vertices.size() == 45);
  CHECK(c2.edges.size() == 75);
  CHECK(cycle_space_dim(c2) == 31);

  // uneven base conductances scale uniformly with the weight
  const double r = ps.weights[0];
  const double cross = -ps.base_form[1][2];
  int plain = 0, crossed = 0;
  for (const GraphEdge& e : c2.edges) {
    if (std::abs(e.c - 1 / (r * r)) < 1e-9)
      ++plain;
    else if (std::abs(e.c - cross / (r * r)) < 1e-9)
      ++crossed;
  }
  CHECK(plain + crossed == 75);
  CHECK(crossed == 25);  // one cross edge per cell
}

TEST_CASE("canonical loop indexing") {
  CHECK(loop_index({}) == 0);
  CHECK(loop_index({1}) == 1);
  CHECK(loop_index({2}) == 2);
  CHECK(loop_index({3}) == 3);
  CHECK(loop_index({1, 1}) == 4);
  CHECK(loop_index({3, 3}) == 12);
  for (const Word& w : {Word{}, Word{2}, Word{1, 3}, Word{2, 2, 1}})
    CHECK(loop_index(w) == loop_index_oracle(w));
}

TEST_CASE("cell loops trace cell boundaries") {
  Fractal f = Fractal::catalog("sg");
  HarmonicStructure s = default_structure(f);
  ApproxGraph g2 = build_graph(f, s, 2);

  LoopList ll = cell_loops(f, 1, 2);
  REQUIRE(ll.loops.size() == 4);  // the outer loop plus one per level-1 cell
  for (size_t i = 0; i < ll.loops.size(); ++i) {
    const Cycle& c = ll.loops[i];
    CHECK(c.index == static_cast<long>(i));
    CHECK(loop_index(c.word) == c.index);
    CHECK(is_closed_walk(g2, c));
    // a cell of order k refines to 3 * 2^(level-k) boundary edges
    size_t want = 3u << (2 - c.word.size());
    CHECK(c.verts.size() == want);
    // starts at corner 1 and passes corner 2 before corner 3
    CHECK(c.verts[0] == f.vertex(c.word, 1));
    size_t i2 = 0, i3 = 0;
    for (size_t k = 0; k < c.verts.size(); ++k) {
      if (c.verts[k] == f.vertex(c.word, 2)) i2 = k;
      if (c.verts[k] == f.vertex(c.word, 3)) i3 = k;
    }
    CHECK(i2 < i3);
  }

  CHECK(cell_loops(f, 2, 3).loops.size() == 13);
  CHECK(cell_loops(f, 0, 3).loops.size() == 1);
  // a 3-vertex loop cannot carry a winding, so the level must exceed the order
  CHECK_THROWS_AS((void)cell_loops(f, 2, 2), Error);
}

TEST_CASE("spanning tree basis spans with independent generators") {
  for (const char* name : {"sg", "sg3", "hexagasket", "pentagasket"}) {
    Fractal f = Fractal::catalog(name);
    HarmonicStructure s = default_structure(f);
    ApproxGraph g = build_graph(f, s, 1);
    CycleBasis basis = spanning_tree_basis(g);
    CHECK(basis.cycles.size() == static_cast<size_t>(cycle_space_dim(g)));
    CHECK(basis.generator_edges.size() == basis.cycles.size());
    CHECK(basis.tree_edges.size() + basis.cycles.size() == g.edges.size());

    std::set<std::pair<VertexId, VertexId>> gens;
    for (size_t i = 0; i < basis.cycles.size(); ++i) {
      const Cycle& c = basis.cycles[i];
      CHECK(is_closed_walk(g, c));
      CHECK(c.index == static_cast<long>(i));
      // the generator edge leads the walk, and appears in no other basis cycle
      auto [a, b] = basis.generator_edges[i];
      bool leads = (c.verts[0] == a && c.verts[1] == b) || (c.verts[0] == b && c.verts[1] == a);
      CHECK(leads);
      auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
      CHECK(gens.insert(key).second);
      for (size_t jj = 0; jj < basis.cycles.size(); ++jj) {
        if (jj == i) continue;
        const Cycle& other = basis.cycles[jj];
        for (size_t k = 0; k < other.verts.size(); ++k) {
          const VertexId& u = other.verts[k];
          const VertexId& v = other.verts[(k + 1) % other.verts.size()];
          auto k2 = u < v ? std::make_pair(u, v) : std::make_pair(v, u);
          CHECK(k2 != key);
        }
      }
    }
  }
}

TEST_CASE("cycle embedding refines edges inside their cells") {
  Fractal f = Fractal::catalog("sg");
  HarmonicStructure s = default_structure(f);
  ApproxGraph g1 = build_graph(f, s, 1);
  ApproxGraph g2 = build_graph(f, s, 2);

  CycleBasis basis = spanning_tree_basis(g1);
  for (const Cycle& c : basis.cycles) {
    Cycle e = embed_cycle(g1, g2, c);
    CHECK(e.level == 2);
    CHECK(is_closed_walk(g2, e));
    CHECK(e.verts.size() == 2 * c.verts.size());  // each edge halves once
    // the coarse vertices appear in order within the refined walk
    size_t at = 0;
    for (const VertexId& v : c.verts) {
      while (at < e.verts.size() && !(e.verts[at] == v)) ++at;
      CHECK(at < e.verts.size());
    }
  }

  // refining a single edge keeps its endpoints and stays in the cell
  const GraphEdge& ed = g1.edges.front();
  auto path = refine_edge(g1, g2, g1.vertices[ed.u], g1.vertices[ed.v]);
  REQUIRE(path.size() >= 2);
  CHECK(path.front() == g1.vertices[ed.u]);
  CHECK(path.back() == g1.vertices[ed.v]);
  Word cell = g1.cells[ed.cell];
  for (const VertexId& v : path) CHECK(vertex_in_cell(f, v, cell));
}

TEST_CASE("vertex-in-cell membership") {
  Fractal f = Fractal::catalog("sg");
  VertexId mid12 = f.canonical_vertex({{1}, 2});
  CHECK(vertex_in_cell(f, mid12, {1}));
  CHECK(vertex_in_cell(f, mid12, {2}));
  CHECK(!vertex_in_cell(f, mid12, {3}));
  CHECK(vertex_in_cell(f, mid12, {}));
  CHECK(vertex_in_cell(f, f.boundary()[0], {1, 1}));
}

TEST_CASE("graph construction rejects bad structures") {
  Fractal f = Fractal::catalog("sg");
  HarmonicStructure s = default_structure(f);

  HarmonicStructure short_w = s;
  short_w.weights.pop_back();
  CHECK_THROWS_AS((void)build_graph(f, short_w, 1), Error);

  HarmonicStructure bad_form = s;
  bad_form.base_form.pop_back();
  CHECK_THROWS_AS((void)build_graph(f, bad_form, 1), Error);

  HarmonicStructure heavy = s;
  heavy.weights[1] = 1.0;
  CHECK_THROWS_AS((void)build_graph(f, heavy, 1), Error);

  CHECK_THROWS_AS((void)build_graph(f, s, -1), Error);

  bool threw = false;
  try {
    (void)build_graph(f, s, 20);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == Errc::level_too_large);
  }
  CHECK(threw);
}

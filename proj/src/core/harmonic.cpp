#include "core/harmonic.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

#include "core/error.hpp"

namespace fhm {

namespace {

template <typename T>
T from_rat(const Rat& r) {
  if constexpr (std::is_same_v<T, Rat>)
    return r;
  else
    return r.get_d();
}

template <typename T>
std::array<T, 3> classical_impl(const std::array<T, 3>& c) {
  const T &a = c[0], &b = c[1], &cc = c[2];
  return {(T(2) * a + T(2) * b + cc) / T(5), (a + T(2) * b + T(2) * cc) / T(5),
          (T(2) * a + b + T(2) * cc) / T(5)};
}

template <typename T>
std::array<T, 3> jump_impl(const std::array<T, 3>& corners, long shift, CutAxis axis) {
  std::array<T, 3> out = classical_impl(corners);
  if (axis == CutAxis::none || shift == 0) return out;
  T r = T(shift);
  std::array<T, 3> v{T(0), T(0), T(0)};
  switch (axis) {
    case CutAxis::x:
      v = {T(-2) * r, r, T(0)};
      break;
    case CutAxis::y:
      v = {T(0), T(-2) * r, r};
      break;
    default:  // z
      v = {T(0), r, T(-2) * r};
      break;
  }
  for (int i = 0; i < 3; ++i)
    out[i] += (T(3) * v[i] + v[(i + 1) % 3] + v[(i + 2) % 3]) / T(10);
  return out;
}

}  // namespace

std::array<Rat, 3> classical_extension(const std::array<Rat, 3>& corners) {
  return classical_impl(corners);
}
std::array<double, 3> classical_extension(const std::array<double, 3>& corners) {
  return classical_impl(corners);
}
std::array<Rat, 3> jump_extension(const std::array<Rat, 3>& corners, long shift,
                                  CutAxis axis) {
  return jump_impl(corners, shift, axis);
}
std::array<double, 3> jump_extension(const std::array<double, 3>& corners, long shift,
                                     CutAxis axis) {
  return jump_impl(corners, shift, axis);
}

namespace {

// Midpoints of a cell that still contains pending cuts are not the plain
// jump-extension values: the deeper shifts feed linear terms back into the
// cell, so its stationary midpoints become an affine function of the corner
// values. The maps below are produced by an exact elimination pass over the
// cut-carrying cells and consumed during the downward extension.
template <typename T>
struct MidAffine {
  std::array<std::array<T, 3>, 3> M{};
  std::array<T, 3> n{};
};

// Minimal energy of a cell as a quadratic in its three corner values,
// constant terms dropped (they never influence a minimizer above).
struct CornerForm {
  std::array<std::array<Rat, 3>, 3> Q{};
  std::array<Rat, 3> L{};
};

std::array<std::array<Rat, 3>, 3> invert3(const std::array<std::array<Rat, 3>, 3>& A) {
  std::array<std::array<Rat, 3>, 3> inv;
  inv[0][0] = A[1][1] * A[2][2] - A[1][2] * A[2][1];
  inv[1][0] = A[1][2] * A[2][0] - A[1][0] * A[2][2];
  inv[2][0] = A[1][0] * A[2][1] - A[1][1] * A[2][0];
  inv[0][1] = A[0][2] * A[2][1] - A[0][1] * A[2][2];
  inv[1][1] = A[0][0] * A[2][2] - A[0][2] * A[2][0];
  inv[2][1] = A[0][1] * A[2][0] - A[0][0] * A[2][1];
  inv[0][2] = A[0][1] * A[1][2] - A[0][2] * A[1][1];
  inv[1][2] = A[0][2] * A[1][0] - A[0][0] * A[1][2];
  inv[2][2] = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  Rat det = A[0][0] * inv[0][0] + A[0][1] * inv[1][0] + A[0][2] * inv[2][0];
  for (auto& row : inv)
    for (Rat& e : row) e /= det;
  return inv;
}

// Bottom-up pass over the cells that carry cuts (every cell of depth <= order).
// Returns the eliminated energy form of cell u given its corners and records
// the stationary midpoints of u as an affine map of those corners.
CornerForm coupled_forms(Word& u, int order, int level,
                         const std::map<Word, std::pair<CutAxis, long>>& cut_at,
                         std::map<Word, MidAffine<Rat>>& mids) {
  const int depth = static_cast<int>(u.size());
  if (depth > order) {
    // classical subtree: each refinement level scales the corner form by 3/5
    Rat w(1);
    for (int i = depth; i < level; ++i) w *= Rat(3, 5);
    CornerForm f;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f.Q[i][j] = (i == j) ? Rat(2 * w) : Rat(-w);
    return f;
  }
  u.push_back(1);
  CornerForm h1 = coupled_forms(u, order, level, cut_at, mids);
  u.back() = 2;
  CornerForm h2 = coupled_forms(u, order, level, cut_at, mids);
  u.back() = 3;
  CornerForm h3 = coupled_forms(u, order, level, cut_at, mids);
  u.pop_back();

  const auto& [axis, shift] = cut_at.at(u);
  Rat s(shift);
  Rat z0(0);

  // total energy as a quadratic in (a, b, c, x, y, z); the cut shift enters
  // as constant offsets on the corners across the cut
  std::array<std::array<Rat, 6>, 6> Q6{};
  std::array<Rat, 6> L6{};
  auto add = [&](const CornerForm& h, const std::array<int, 3>& var,
                 const std::array<Rat, 3>& cst) {
    for (int i = 0; i < 3; ++i) {
      L6[var[i]] += h.L[i];
      for (int j = 0; j < 3; ++j) {
        Q6[var[i]][var[j]] += h.Q[i][j];
        L6[var[i]] += 2 * h.Q[i][j] * cst[j];
      }
    }
  };
  add(h1, {0, 3, 5}, {z0, z0, z0});
  add(h2, {3, 1, 4}, {axis == CutAxis::x ? s : z0, z0, z0});
  add(h3, {5, 4, 2}, {axis == CutAxis::z ? s : z0, axis == CutAxis::y ? s : z0, z0});

  // minimize over the midpoint block: x* = -C^{-1} (B^T a + L_x / 2)
  std::array<std::array<Rat, 3>, 3> C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C[i][j] = Q6[3 + i][3 + j];
  std::array<std::array<Rat, 3>, 3> Cinv = invert3(C);

  MidAffine<Rat> ma;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Rat acc(0);
      for (int k = 0; k < 3; ++k) acc += Cinv[i][k] * Q6[j][3 + k];
      ma.M[i][j] = -acc;
    }
    Rat acc(0);
    for (int k = 0; k < 3; ++k) acc += Cinv[i][k] * L6[3 + k];
    ma.n[i] = -acc / 2;
  }
  mids[u] = ma;

  // Schur complement: g(a) = a^T (A + B M) a + (L_a + 2 B n)^T a
  CornerForm g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Rat acc = Q6[i][j];
      for (int k = 0; k < 3; ++k) acc += Q6[i][3 + k] * ma.M[k][j];
      g.Q[i][j] = acc;
    }
    Rat acc = L6[i];
    for (int k = 0; k < 3; ++k) acc += 2 * Q6[i][3 + k] * ma.n[k];
    g.L[i] = acc;
  }
  return g;
}

template <typename T>
struct SgState {
  const Fractal* f = nullptr;
  int level = 0;
  std::map<Word, std::pair<CutAxis, long>> cut_at;
  std::map<Word, MidAffine<T>> mid_at;
  std::unordered_map<VertexId, T, VertexIdHash> val;
  std::unordered_map<VertexId, T, VertexIdHash> res;
  T energy{};
};

template <typename T>
void sg_extend(SgState<T>& st, Word& u, const T& a, const T& b, const T& c) {
  if (static_cast<int>(u.size()) == st.level) {
    st.energy += (a - b) * (a - b) + (b - c) * (b - c) + (a - c) * (a - c);
    st.res[st.f->vertex(u, 1)] += (b - a) + (c - a);
    st.res[st.f->vertex(u, 2)] += (a - b) + (c - b);
    st.res[st.f->vertex(u, 3)] += (a - c) + (b - c);
    return;
  }
  CutAxis axis = CutAxis::none;
  long shift = 0;
  if (auto it = st.cut_at.find(u); it != st.cut_at.end()) {
    axis = it->second.first;
    shift = it->second.second;
  }
  std::array<T, 3> mid;
  if (auto mit = st.mid_at.find(u); mit != st.mid_at.end()) {
    const MidAffine<T>& mm = mit->second;
    for (int i = 0; i < 3; ++i)
      mid[i] = mm.M[i][0] * a + mm.M[i][1] * b + mm.M[i][2] * c + mm.n[i];
  } else {
    mid = jump_impl<T>({a, b, c}, shift, axis);
  }
  T x = mid[0], y = mid[1], z = mid[2];

  u.push_back(1);
  st.val[st.f->vertex(u, 2)] = x;
  st.val[st.f->vertex(u, 3)] = z;
  u.back() = 2;
  st.val[st.f->vertex(u, 3)] = y;
  u.pop_back();

  T xp = x, yp = y, zp = z;
  if (shift != 0) {
    if (axis == CutAxis::x) xp += T(shift);
    if (axis == CutAxis::y) yp += T(shift);
    if (axis == CutAxis::z) zp += T(shift);
  }
  u.push_back(1);
  sg_extend(st, u, a, x, z);
  u.back() = 2;
  sg_extend(st, u, xp, b, y);
  u.back() = 3;
  sg_extend(st, u, zp, yp, c);
  u.pop_back();
}

CutAxis sg_axis_for(const Word& cell) {
  if (cell.empty()) return CutAxis::z;
  switch (cell.back()) {
    case 1:
      return CutAxis::y;
    case 2:
      return CutAxis::z;
    default:
      return CutAxis::x;
  }
}

template <typename T>
void sg_run(SgState<T>& st, const BoundaryData& bc, HarmonicMapResult& out) {
  T d1 = from_rat<T>(bc.deltas[0]);
  T d2 = from_rat<T>(bc.deltas[1]);
  Word root;
  st.val[st.f->vertex(root, 1)] = T(0);
  st.val[st.f->vertex(root, 2)] = d1;
  st.val[st.f->vertex(root, 3)] = d1 + d2;
  sg_extend(st, root, T(0), d1, T(d1 + d2));

  Rat scale_exact(1);
  for (int i = 0; i < st.level; ++i) scale_exact *= Rat(5, 3);
  const double scale = scale_exact.get_d();

  out.lift.reserve(st.val.size());
  for (const auto& [id, v] : st.val) {
    if constexpr (std::is_same_v<T, Rat>) {
      out.lift[id] = v.get_d();
      out.lift_exact[id] = v;
    } else {
      out.lift[id] = v;
    }
  }
  if constexpr (std::is_same_v<T, Rat>) {
    out.energy = Rat(st.energy * scale_exact).get_d();
    Rat worst(0);
    for (const auto& [id, r] : st.res) {
      if (st.f->is_boundary(id)) continue;
      Rat m = abs(r);
      if (m > worst) worst = m;
    }
    out.max_residual = Rat(worst * scale_exact).get_d();
  } else {
    out.energy = st.energy * scale;
    double worst = 0;
    for (const auto& [id, r] : st.res) {
      if (st.f->is_boundary(id)) continue;
      worst = std::max(worst, std::abs(r));
    }
    out.max_residual = worst * scale;
  }
}

}  // namespace

HarmonicMapResult solve_sg(const Fractal& f, const DegreeVector& deg,
                           const BoundaryData& bc, int level) {
  if (f.name() != "sg")
    fail(Errc::unsupported_fractal, "the cell recursion solver is gasket-specific");
  if (bc.deltas.size() != 2)
    fail(Errc::bad_argument, "gasket boundary data needs exactly two increments");
  const int order = deg.order();
  if (level < std::max(order + 1, 1))
    fail(Errc::level_too_small,
         "level " + std::to_string(level) + " cannot carry an order-" +
             std::to_string(order) + " degree vector; need order+1");
  if (level > 14) fail(Errc::level_too_large, "refusing to solve beyond level 14");

  HarmonicMapResult out;
  out.fractal = f.name();
  out.level = level;
  out.degree = deg;
  out.boundary = bc;
  out.boundary.rho0 = deg.at(0);
  out.cuts = sg_cut_points(deg);
  out.exact = level <= 12;

  std::map<Word, std::pair<CutAxis, long>> cut_at;
  for (const CutPoint& cp : out.cuts)
    cut_at[cp.cell] = {sg_axis_for(cp.cell), cp.shift};
  std::map<Word, MidAffine<Rat>> mids;
  {
    Word root;
    coupled_forms(root, order, level, cut_at, mids);
  }

  if (out.exact) {
    SgState<Rat> st;
    st.f = &f;
    st.level = level;
    st.cut_at = cut_at;
    st.mid_at = std::move(mids);
    sg_run(st, bc, out);
  } else {
    SgState<double> st;
    st.f = &f;
    st.level = level;
    st.cut_at = cut_at;
    for (const auto& [w, m] : mids) {
      MidAffine<double>& d = st.mid_at[w];
      for (int i = 0; i < 3; ++i) {
        d.n[i] = m.n[i].get_d();
        for (int j = 0; j < 3; ++j) d.M[i][j] = m.M[i][j].get_d();
      }
    }
    sg_run(st, bc, out);
  }
  out.circle = project_to_circle(out.lift, level);
  out.cycles = cell_loops(f, order, level).loops;
  return out;
}

namespace {

struct Resolved {
  int var = -1;    // free variable slot, or -1
  double cst = 0;  // fixed value or sheet offset
};

}  // namespace

HarmonicMapResult solve_pcf(const CutGraph& cg) {
  const ApproxGraph& g = *cg.base;
  const int base_count = static_cast<int>(g.vertices.size());
  const int total = cg.total_vertices();

  std::vector<char> fixed(total, 0);
  std::vector<double> fixed_val(total, 0.0);
  for (const auto& [idx, v] : cg.assignments) {
    fixed[idx] = 1;
    fixed_val[idx] = v;
  }

  std::vector<Resolved> node(total);
  int nfree = 0;
  for (int i = 0; i < base_count; ++i) {
    if (fixed[i])
      node[i] = {-1, fixed_val[i]};
    else
      node[i] = {nfree++, 0.0};
  }
  for (size_t k = 0; k < cg.cuts.size(); ++k) {
    int p = base_count + static_cast<int>(k);
    int m = cg.cut_minus[k];
    double s = static_cast<double>(cg.cuts[k].shift);
    node[p] = {node[m].var, node[m].cst + s};
  }

  // Every free variable must be tied through edges to some fixed value.
  {
    std::vector<int> parent(nfree + 1);
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    const int ground = nfree;
    for (const GraphEdge& e : cg.edges) {
      int pu = node[e.u].var, pv = node[e.v].var;
      int a = pu < 0 ? ground : pu;
      int b = pv < 0 ? ground : pv;
      parent[find(a)] = find(b);
    }
    for (int i = 0; i < nfree; ++i)
      if (find(i) != find(ground))
        fail(Errc::singular_system,
             "a free component has no boundary value; the cut graph is not anchored");
  }

  Eigen::VectorXd x(nfree);
  x.setZero();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
  double gnorm = 1.0;
  if (nfree > 0) {
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(nfree);
    if (nfree <= 3000) {
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nfree, nfree);
      for (const GraphEdge& e : cg.edges) {
        const Resolved &p = node[e.u], &q = node[e.v];
        double d = p.cst - q.cst;
        if (p.var >= 0) {
          H(p.var, p.var) += e.c;
          lin(p.var) += e.c * d;
        }
        if (q.var >= 0) {
          H(q.var, q.var) += e.c;
          lin(q.var) -= e.c * d;
        }
        if (p.var >= 0 && q.var >= 0) {
          H(p.var, q.var) -= e.c;
          H(q.var, p.var) -= e.c;
        }
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success)
        fail(Errc::singular_system, "energy Hessian is not positive definite");
      x = ldlt.solve(-lin);
      gnorm = std::max(1.0, lin.lpNorm<Eigen::Infinity>());
      rhs = H * x + lin;
    } else {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(cg.edges.size() * 4);
      Eigen::SparseMatrix<double> H(nfree, nfree);
      for (const GraphEdge& e : cg.edges) {
        const Resolved &p = node[e.u], &q = node[e.v];
        double d = p.cst - q.cst;
        if (p.var >= 0) {
          trip.emplace_back(p.var, p.var, e.c);
          lin(p.var) += e.c * d;
        }
        if (q.var >= 0) {
          trip.emplace_back(q.var, q.var, e.c);
          lin(q.var) -= e.c * d;
        }
        if (p.var >= 0 && q.var >= 0) {
          trip.emplace_back(p.var, q.var, -e.c);
          trip.emplace_back(q.var, p.var, -e.c);
        }
      }
      H.setFromTriplets(trip.begin(), trip.end());
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                               Eigen::Lower | Eigen::Upper>
          cgs;
      cgs.setTolerance(1e-13);
      cgs.setMaxIterations(40L * nfree);
      cgs.compute(H);
      x = cgs.solve(-lin);
      gnorm = std::max(1.0, lin.lpNorm<Eigen::Infinity>());
      rhs = H * x + lin;
    }
    double rel = rhs.lpNorm<Eigen::Infinity>() / gnorm;
    if (!(rel <= 1e-10))
      fail(Errc::residual_too_large,
           "linear solve left relative residual " + std::to_string(rel));
  }

  std::vector<double> val(total, 0.0);
  for (int i = 0; i < total; ++i)
    val[i] = node[i].var >= 0 ? x(node[i].var) + node[i].cst : node[i].cst;

  HarmonicMapResult out;
  out.fractal = g.fractal->name();
  out.level = g.level;
  out.boundary = cg.bc;
  out.cuts = cg.cuts;
  out.exact = false;
  out.lift.reserve(base_count);
  for (int i = 0; i < base_count; ++i) out.lift[g.vertices[i]] = val[i];
  out.circle = project_to_circle(out.lift, g.level);

  double energy = 0;
  std::vector<double> resid(base_count, 0.0);
  for (const GraphEdge& e : cg.edges) {
    double d = val[e.u] - val[e.v];
    energy += e.c * d * d;
    int ub = e.u < base_count ? e.u : cg.cut_minus[e.u - base_count];
    int vb = e.v < base_count ? e.v : cg.cut_minus[e.v - base_count];
    resid[ub] += e.c * (val[e.v] - val[e.u]);
    resid[vb] += e.c * (val[e.u] - val[e.v]);
  }
  out.energy = energy;
  double worst = 0;
  for (int i = 0; i < base_count; ++i) {
    if (fixed[i]) continue;
    worst = std::max(worst, std::abs(resid[i]));
  }
  out.max_residual = worst;
  return out;
}

HarmonicMapResult solve_harmonic_map(const Fractal& f, const HarmonicStructure& s,
                                     const DegreeVector& deg, const BoundaryData& bc,
                                     int level, const SolveOptions& opt) {
  if (f.name() == "sg" && !opt.force_pcf) return solve_sg(f, deg, bc, level);

  if (level < 1) fail(Errc::level_too_small, "need at least one refinement level");
  const size_t need = deg.trimmed_size();
  int b = opt.basis_level;
  if (b < 0) {
    b = 0;
    while (true) {
      if (b + 1 > level)
        fail(Errc::level_too_small,
             "degree vector needs a deeper cycle basis than this level allows");
      ApproxGraph gb = build_graph(f, s, b);
      if (cycle_space_dim(gb) >= static_cast<int>(need)) break;
      ++b;
    }
  } else if (b + 1 > level) {
    fail(Errc::level_too_small, "basis level must stay below the solve level");
  }

  std::vector<ApproxGraph> chain;
  chain.reserve(static_cast<size_t>(level - b + 1));
  for (int k = b; k <= level; ++k) chain.push_back(build_graph(f, s, k));
  CycleBasis basis = spanning_tree_basis(chain[0]);
  if (need > basis.cycles.size())
    fail(Errc::bad_argument, "degree vector is longer than the chosen cycle basis");
  PcfCuts pc = pcf_cut_points(f, chain[0], chain[1], basis, deg);
  CutGraph cg = build_cut_graph(chain.back(), pc.cuts, bc);
  HarmonicMapResult out = solve_pcf(cg);
  out.degree = deg;
  out.basis_level = b;

  std::vector<Cycle> cycles = std::move(pc.cycles);
  for (size_t k = 1; k + 1 < chain.size(); ++k)
    for (Cycle& c : cycles) c = embed_cycle(chain[k], chain[k + 1], c);
  out.cycles = std::move(cycles);
  return out;
}

double graph_energy(const ApproxGraph& g, const LiftValues& values) {
  double e = 0;
  for (const GraphEdge& edge : g.edges) {
    auto iu = values.find(g.vertices[edge.u]);
    auto iv = values.find(g.vertices[edge.v]);
    if (iu == values.end() || iv == values.end())
      fail(Errc::missing_value, "graph energy needs a value at every vertex");
    double d = iu->second - iv->second;
    e += edge.c * d * d;
  }
  return e;
}

double graph_energy(const CutGraph& cg, const std::vector<double>& split) {
  if (static_cast<int>(split.size()) != cg.total_vertices())
    fail(Errc::bad_argument, "split value vector has the wrong size");
  double e = 0;
  for (const GraphEdge& edge : cg.edges) {
    double d = split[edge.u] - split[edge.v];
    e += edge.c * d * d;
  }
  return e;
}

std::vector<double> split_values(const CutGraph& cg, const LiftValues& lift) {
  const ApproxGraph& g = *cg.base;
  const int base_count = static_cast<int>(g.vertices.size());
  std::vector<double> out(static_cast<size_t>(cg.total_vertices()), 0.0);
  for (int i = 0; i < base_count; ++i) {
    auto it = lift.find(g.vertices[i]);
    if (it == lift.end())
      fail(Errc::missing_value, "lift is missing a vertex value");
    out[i] = it->second;
  }
  for (size_t k = 0; k < cg.cuts.size(); ++k)
    out[base_count + k] =
        out[cg.cut_minus[k]] + static_cast<double>(cg.cuts[k].shift);
  return out;
}

double circle_energy(const ApproxGraph& g, const CircleMap& f) {
  double e = 0;
  for (const GraphEdge& edge : g.edges) {
    auto iu = f.values.find(g.vertices[edge.u]);
    auto iv = f.values.find(g.vertices[edge.v]);
    if (iu == f.values.end() || iv == f.values.end())
      fail(Errc::missing_value, "circle energy needs a value at every vertex");
    double d = std::abs(iu->second - iv->second);
    d = std::min(d, 1.0 - d);
    e += edge.c * d * d;
  }
  return e;
}

std::unordered_map<VertexId, double, VertexIdHash> laplacian_residual(
    const CutGraph& cg, const std::vector<double>& split) {
  if (static_cast<int>(split.size()) != cg.total_vertices())
    fail(Errc::bad_argument, "split value vector has the wrong size");
  const ApproxGraph& g = *cg.base;
  const int base_count = static_cast<int>(g.vertices.size());
  std::vector<double> resid(base_count, 0.0);
  for (const GraphEdge& e : cg.edges) {
    int ub = e.u < base_count ? e.u : cg.cut_minus[e.u - base_count];
    int vb = e.v < base_count ? e.v : cg.cut_minus[e.v - base_count];
    resid[ub] += e.c * (split[e.v] - split[e.u]);
    resid[vb] += e.c * (split[e.u] - split[e.v]);
  }
  std::vector<char> fixed(base_count, 0);
  for (const auto& [idx, v] : cg.assignments) {
    (void)v;
    if (idx < base_count) fixed[idx] = 1;
  }
  std::unordered_map<VertexId, double, VertexIdHash> out;
  for (int i = 0; i < base_count; ++i) {
    if (fixed[i]) continue;
    out[g.vertices[i]] = resid[i];
  }
  return out;
}

std::vector<std::vector<double>> renormalize_form(const Fractal& f,
                                                  const HarmonicStructure& s) {
  ApproxGraph g = build_graph(f, s, 1);
  const auto& bd = f.boundary();
  const int vcount = static_cast<int>(g.vertices.size());
  const int bcount = static_cast<int>(bd.size());
  std::vector<int> slot(vcount, -1);  // boundary slot in walk order
  for (int j = 0; j < bcount; ++j) {
    int idx = g.find_vertex(bd[j]);
    if (idx < 0) fail(Errc::internal, "boundary vertex missing from level-1 graph");
    slot[idx] = j;
  }
  const int icount = vcount - bcount;
  if (icount == 0)
    fail(Errc::singular_interior, "level-1 network has no interior vertices");
  std::vector<int> islot(vcount, -1);
  int next = 0;
  for (int i = 0; i < vcount; ++i)
    if (slot[i] < 0) islot[i] = next++;

  Eigen::MatrixXd lbb = Eigen::MatrixXd::Zero(bcount, bcount);
  Eigen::MatrixXd lbi = Eigen::MatrixXd::Zero(bcount, icount);
  Eigen::MatrixXd lii = Eigen::MatrixXd::Zero(icount, icount);
  auto add = [&](int u, int v, double c) {
    bool ub = slot[u] >= 0, vb = slot[v] >= 0;
    int pu = ub ? slot[u] : islot[u];
    int pv = vb ? slot[v] : islot[v];
    if (ub && vb) {
      lbb(pu, pu) += c;
      lbb(pv, pv) += c;
      lbb(pu, pv) -= c;
      lbb(pv, pu) -= c;
    } else if (!ub && !vb) {
      lii(pu, pu) += c;
      lii(pv, pv) += c;
      lii(pu, pv) -= c;
      lii(pv, pu) -= c;
    } else {
      int bslot = ub ? pu : pv;
      int is = ub ? pv : pu;
      lbb(bslot, bslot) += c;
      lii(is, is) += c;
      lbi(bslot, is) -= c;
    }
  };
  for (const GraphEdge& e : g.edges) add(e.u, e.v, e.c);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(lii);
  if (ldlt.info() != Eigen::Success)
    fail(Errc::singular_interior, "interior block could not be eliminated");
  Eigen::MatrixXd schur = lbb - lbi * ldlt.solve(lbi.transpose());
  if (!schur.allFinite())
    fail(Errc::singular_interior, "interior elimination produced non-finite values");

  std::vector<std::vector<double>> out(bcount, std::vector<double>(bcount, 0.0));
  for (int i = 0; i < bcount; ++i)
    for (int j = 0; j < bcount; ++j) out[i][j] = schur(i, j);
  return out;
}

double find_renormalization_factor(const Fractal& f,
                                   const std::vector<std::vector<double>>& base_form,
                                   double tol) {
  if (!(tol > 0)) fail(Errc::bad_argument, "tolerance must be positive");
  HarmonicStructure s;
  s.base_form = base_form;
  s.weights.assign(static_cast<size_t>(f.letter_count()), 0.5);
  std::vector<std::vector<double>> schur_half;
  try {
    schur_half = renormalize_form(f, s);
  } catch (const Error& e) {
    if (e.code() == Errc::singular_interior)
      fail(Errc::no_fixed_point,
           "degenerate level-1 network; no renormalization fixed point");
    throw;
  }
  // Conductances scale linearly in 1/r, so the level-1 trace at weight r is
  // (schur at weight 1) / r; the half-weight run pins that matrix.
  const int n = static_cast<int>(base_form.size());
  int bi = -1, bj = -1;
  double best = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (std::abs(base_form[i][j]) > best) {
        best = std::abs(base_form[i][j]);
        bi = i;
        bj = j;
      }
    }
  }
  if (bi < 0)
    fail(Errc::no_fixed_point, "base form has no off-diagonal conductance");
  double r = 0.5 * schur_half[bi][bj] / base_form[bi][bj];
  if (!(r > 0.0 && r < 1.0))
    fail(Errc::no_fixed_point, "renormalization ratio falls outside (0,1)");
  double err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      err = std::max(err, std::abs(0.5 * schur_half[i][j] / r - base_form[i][j]));
  if (err > tol)
    fail(Errc::no_fixed_point,
         "base form is not self-reproducing; best deviation " + std::to_string(err));
  return r;
}

}  // namespace fhm

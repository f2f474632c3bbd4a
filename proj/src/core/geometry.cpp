#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace fhm {

double AffineMap::operator_norm() const {
  // largest singular value of the 2x2 linear part
  double e = a[0] * a[0] + a[2] * a[2];
  double g = a[1] * a[1] + a[3] * a[3];
  double f = a[0] * a[1] + a[2] * a[3];
  double lam = 0.5 * ((e + g) + std::sqrt((e - g) * (e - g) + 4 * f * f));
  return std::sqrt(std::max(0.0, lam));
}

Vec2 AffineMap::fixed_point() const {
  // solve (I - A) x = b
  double m00 = 1 - a[0], m01 = -a[1], m10 = -a[2], m11 = 1 - a[3];
  double det = m00 * m11 - m01 * m10;
  if (det == 0) fail(Errc::non_contractive, "map has no unique fixed point");
  return {(b[0] * m11 - b[1] * m01) / det, (m00 * b[1] - m10 * b[0]) / det};
}

RVec2 AffineMap::fixed_point_exact() const {
  Rat m00 = 1 - ra[0], m01 = -ra[1], m10 = -ra[2], m11 = 1 - ra[3];
  Rat det = m00 * m11 - m01 * m10;
  if (det == 0) fail(Errc::non_contractive, "map has no unique fixed point");
  return {(rb[0] * m11 - rb[1] * m01) / det, (m00 * rb[1] - m10 * rb[0]) / det};
}

AffineMap AffineMap::homothety(const RVec2& center, const Rat& ratio) {
  AffineMap m;
  m.exact = true;
  m.ra = {ratio, Rat(0), Rat(0), ratio};
  m.rb = {(1 - ratio) * center.x, (1 - ratio) * center.y};
  m.a = {m.ra[0].get_d(), 0, 0, m.ra[3].get_d()};
  m.b = {m.rb[0].get_d(), m.rb[1].get_d()};
  return m;
}

AffineMap AffineMap::similarity(const Vec2& center, double ratio, double rot_deg) {
  AffineMap m;
  m.exact = false;
  double th = rot_deg * std::numbers::pi / 180.0;
  double c = std::cos(th), s = std::sin(th);
  m.a = {ratio * c, -ratio * s, ratio * s, ratio * c};
  m.b = {center.x - (m.a[0] * center.x + m.a[1] * center.y),
         center.y - (m.a[2] * center.x + m.a[3] * center.y)};
  return m;
}

bool itinerary_less(const Itinerary& a, const Itinerary& b) {
  if (a.prefix.size() != b.prefix.size()) return a.prefix.size() < b.prefix.size();
  if (a.prefix != b.prefix) return a.prefix < b.prefix;
  return a.tail < b.tail;
}

Itinerary normalize_itinerary(Itinerary it) {
  while (!it.prefix.empty() && it.prefix.back() == it.tail) it.prefix.pop_back();
  return it;
}

std::string to_string(const Itinerary& it, int letter_count) {
  std::ostringstream os;
  bool compact = letter_count <= 9;
  for (std::size_t i = 0; i < it.prefix.size(); ++i) {
    if (!compact && i) os << ',';
    os << it.prefix[i];
  }
  os << '/' << it.tail;
  return os.str();
}

std::optional<Itinerary> itinerary_from_string(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return std::nullopt;
  std::string head = text.substr(0, slash), tail = text.substr(slash + 1);
  Itinerary it;
  try {
    it.tail = std::stoi(tail);
  } catch (...) {
    return std::nullopt;
  }
  if (head.find(',') != std::string::npos) {
    std::istringstream is(head);
    std::string tok;
    while (std::getline(is, tok, ','))
      try {
        it.prefix.push_back(std::stoi(tok));
      } catch (...) {
        return std::nullopt;
      }
  } else {
    for (char c : head) {
      if (c < '1' || c > '9') return std::nullopt;
      it.prefix.push_back(c - '0');
    }
  }
  return it;
}

std::size_t VertexIdHash::operator()(const VertexId& v) const {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (Letter l : v.canon.prefix) mix(static_cast<std::size_t>(l));
  mix(static_cast<std::size_t>(v.canon.tail) | (1ull << 32));
  return h;
}

namespace {

constexpr int kJunctionSearchDepth = 3;
constexpr std::size_t kBoundaryBound = 64;
constexpr std::size_t kClosureBound = 64;

Letter first_letter(const Itinerary& it) {
  return it.prefix.empty() ? it.tail : it.prefix.front();
}

bool ends_with(const Itinerary& it, const Itinerary& pattern) {
  if (it.tail != pattern.tail) return false;
  if (pattern.prefix.size() > it.prefix.size()) return false;
  return std::equal(pattern.prefix.rbegin(), pattern.prefix.rend(), it.prefix.rbegin());
}

std::vector<Word> words_up_to(int letters, int depth) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int d = 1; d <= depth; ++d) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (Letter l = 1; l <= letters; ++l) {
        Word w = out[i];
        w.push_back(l);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

}  // namespace

void Fractal::check_word(const Word& w) const {
  for (Letter l : w)
    if (l < 1 || l > letter_count())
      fail(Errc::bad_letter, "letter " + std::to_string(l) + " outside 1.." +
                                 std::to_string(letter_count()));
}

Vec2 Fractal::apply_word(const Word& w, const Vec2& p) const {
  check_word(w);
  Vec2 q = p;
  for (auto it = w.rbegin(); it != w.rend(); ++it) q = spec_.maps[*it - 1].apply(q);
  return q;
}

Vec2 Fractal::vertex_coordinates(const Itinerary& it0) const {
  Itinerary it = normalize_itinerary(it0);
  check_word(it.prefix);
  if (it.tail < 1 || it.tail > letter_count()) fail(Errc::bad_letter, "bad tail letter");
  return apply_word(it.prefix, spec_.maps[it.tail - 1].fixed_point());
}

RVec2 Fractal::vertex_coordinates_exact(const Itinerary& it0) const {
  if (!spec_.exact)
    fail(Errc::missing_coordinates, "exact coordinates unavailable for float-mode fractal");
  Itinerary it = normalize_itinerary(it0);
  check_word(it.prefix);
  if (it.tail < 1 || it.tail > letter_count()) fail(Errc::bad_letter, "bad tail letter");
  RVec2 q = spec_.maps[it.tail - 1].fixed_point_exact();
  for (auto l = it.prefix.rbegin(); l != it.prefix.rend(); ++l)
    q = spec_.maps[*l - 1].apply(q);
  return q;
}

std::vector<Itinerary> Fractal::closure(const Itinerary& it0) const {
  std::vector<Itinerary> out{normalize_itinerary(it0)};
  for (std::size_t i = 0; i < out.size(); ++i) {
    Itinerary cur = out[i];
    for (const auto& cls : junctions_) {
      for (const auto& pat : cls.patterns) {
        if (!ends_with(cur, pat)) continue;
        Word stem(cur.prefix.begin(), cur.prefix.end() - pat.prefix.size());
        for (const auto& alt : cls.patterns) {
          if (&alt == &pat) continue;
          Itinerary cand;
          cand.prefix = stem;
          cand.prefix.insert(cand.prefix.end(), alt.prefix.begin(), alt.prefix.end());
          cand.tail = alt.tail;
          cand = normalize_itinerary(cand);
          if (std::find(out.begin(), out.end(), cand) == out.end()) {
            out.push_back(cand);
            if (out.size() > kClosureBound)
              fail(Errc::not_pcf, "itinerary closure does not stabilize");
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), itinerary_less);
  return out;
}

VertexId Fractal::canonical_vertex(const Itinerary& it) const {
  check_word(it.prefix);
  if (it.tail < 1 || it.tail > letter_count()) fail(Errc::bad_letter, "bad tail letter");
  return VertexId{closure(it).front()};
}

std::vector<Itinerary> Fractal::itineraries_of(const VertexId& v) const {
  return closure(v.canon);
}

VertexId Fractal::vertex(const Word& cell, int corner) const {
  if (corner < 1 || corner > static_cast<int>(boundary_.size()))
    fail(Errc::bad_letter, "corner " + std::to_string(corner) + " outside 1.." +
                               std::to_string(boundary_.size()));
  const Itinerary& base = boundary_[corner - 1].canon;
  Itinerary it;
  it.prefix = cell;
  it.prefix.insert(it.prefix.end(), base.prefix.begin(), base.prefix.end());
  it.tail = base.tail;
  return canonical_vertex(it);
}

bool Fractal::is_boundary(const VertexId& v) const {
  return std::find(boundary_.begin(), boundary_.end(), v) != boundary_.end();
}

namespace {

/// Groups candidate addresses by the point they name and returns the classes
/// that identify different level-1 cells (the genuine junction generators).
std::vector<JunctionClass> discover_junctions(const FractalSpec& spec, int depth,
                                              bool* hit_depth_bound) {
  int n = static_cast<int>(spec.maps.size());
  std::vector<Itinerary> cands;
  for (const Word& w : words_up_to(n, depth))
    for (Letter s = 1; s <= n; ++s) {
      Itinerary it = normalize_itinerary({w, s});
      cands.push_back(it);
    }
  std::sort(cands.begin(), cands.end(), itinerary_less);
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  std::vector<std::vector<std::size_t>> groups;
  if (spec.exact) {
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_coord;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      RVec2 p = spec.maps[cands[i].tail - 1].fixed_point_exact();
      for (auto l = cands[i].prefix.rbegin(); l != cands[i].prefix.rend(); ++l)
        p = spec.maps[*l - 1].apply(p);
      by_coord[{rational_to_string(p.x), rational_to_string(p.y)}].push_back(i);
    }
    for (auto& [coord, idx] : by_coord)
      if (idx.size() > 1) groups.push_back(idx);
  } else {
    std::vector<Vec2> pts(cands.size());
    double diam = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      Vec2 p = spec.maps[cands[i].tail - 1].fixed_point();
      for (auto l = cands[i].prefix.rbegin(); l != cands[i].prefix.rend(); ++l)
        p = spec.maps[*l - 1].apply(p);
      pts[i] = p;
      diam = std::max({diam, std::abs(p.x), std::abs(p.y)});
    }
    double tol = 1e-12 * std::max(1.0, 2 * diam);
    std::vector<int> cls(cands.size(), -1);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (cls[i] >= 0) continue;
      std::vector<std::size_t> g{i};
      for (std::size_t j = i + 1; j < cands.size(); ++j) {
        if (cls[j] >= 0) continue;
        if (std::abs(pts[i].x - pts[j].x) <= tol && std::abs(pts[i].y - pts[j].y) <= tol) {
          g.push_back(j);
          cls[j] = static_cast<int>(i);
        }
      }
      cls[i] = static_cast<int>(i);
      if (g.size() > 1) groups.push_back(std::move(g));
    }
  }

  std::vector<JunctionClass> out;
  *hit_depth_bound = false;
  for (const auto& g : groups) {
    std::set<Letter> firsts;
    for (std::size_t i : g) firsts.insert(first_letter(cands[i]));
    if (firsts.size() < 2) continue;  // image of a shallower junction
    JunctionClass cls;
    for (std::size_t i : g) cls.patterns.push_back(cands[i]);
    std::sort(cls.patterns.begin(), cls.patterns.end(), itinerary_less);
    for (const auto& p : cls.patterns)
      if (static_cast<int>(p.prefix.size()) >= depth) *hit_depth_bound = true;
    out.push_back(std::move(cls));
  }
  return out;
}

}  // namespace

Fractal Fractal::make(const FractalSpec& spec) {
  Fractal f;
  f.spec_ = spec;
  if (spec.maps.empty()) fail(Errc::bad_argument, "a fractal needs at least one map");
  if (spec.contraction_bound >= 1.0)
    fail(Errc::non_contractive, "contraction_bound must be < 1");
  int n = f.letter_count();
  for (int i = 0; i < n; ++i) {
    double norm = spec.maps[i].operator_norm();
    if (norm >= 1.0 - 1e-12)
      fail(Errc::non_contractive,
           "map " + std::to_string(i + 1) + " has operator norm " + std::to_string(norm));
    if (norm > spec.contraction_bound + 1e-9)
      fail(Errc::non_contractive,
           "map " + std::to_string(i + 1) + " exceeds the declared contraction_bound");
    if (spec.exact && !spec.maps[i].exact)
      fail(Errc::bad_argument, "exact arithmetic requested but map " +
                                   std::to_string(i + 1) + " has no rational form");
  }
  std::set<Letter> labels(spec.boundary_labels.begin(), spec.boundary_labels.end());
  if (labels.size() != spec.boundary_labels.size())
    fail(Errc::bad_argument, "boundary_labels must be distinct");
  for (Letter l : spec.boundary_labels)
    if (l < 1 || l > n) fail(Errc::bad_letter, "boundary label outside 1..n");

  bool hit_bound = false;
  f.junctions_ = discover_junctions(spec, kJunctionSearchDepth, &hit_bound);
  if (hit_bound)
    fail(Errc::not_pcf, "junction classes still appearing at search depth " +
                            std::to_string(kJunctionSearchDepth));
  if (f.junctions_.empty() && n > 1)
    fail(Errc::disconnected, "level-1 cells share no points");

  if (n > 1) {
    std::vector<int> comp(n, -1);
    std::vector<int> stack{0};
    comp[0] = 0;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (const auto& cls : f.junctions_) {
        std::set<Letter> firsts;
        for (const auto& p : cls.patterns) firsts.insert(first_letter(p));
        if (!firsts.count(c + 1)) continue;
        for (Letter l : firsts)
          if (comp[l - 1] < 0) {
            comp[l - 1] = 0;
            stack.push_back(l - 1);
          }
      }
    }
    if (std::any_of(comp.begin(), comp.end(), [](int c) { return c < 0; }))
      fail(Errc::disconnected, "attractor splits into non-touching cell groups");
  }

  // post-critical set: every proper shift of every junction address
  std::set<VertexId> post;
  for (const auto& cls : f.junctions_)
    for (const auto& pat : cls.patterns) {
      Itinerary shifted = pat;
      while (!shifted.prefix.empty()) {
        shifted.prefix.erase(shifted.prefix.begin());
        shifted = normalize_itinerary(shifted);
        post.insert(f.canonical_vertex(shifted));
        if (post.size() > kBoundaryBound)
          fail(Errc::not_pcf, "post-critical set exceeds the configured bound");
      }
    }

  std::set<VertexId> labeled;
  if (!spec.boundary_points.empty()) {
    if (!spec.boundary_labels.empty())
      fail(Errc::bad_argument, "give boundary_labels or boundary_points, not both");
    for (const Itinerary& bp : spec.boundary_points) {
      VertexId v = f.canonical_vertex(bp);
      if (labeled.count(v)) fail(Errc::bad_argument, "boundary points must be distinct");
      f.boundary_.push_back(v);
      labeled.insert(v);
    }
  } else {
    for (Letter l : spec.boundary_labels) {
      VertexId v = f.canonical_vertex(Itinerary{{}, l});
      if (v.canon.prefix.size() != 0 || v.canon.tail != l)
        fail(Errc::bad_argument,
             "boundary label " + std::to_string(l) + " does not name its own fixed point");
      f.boundary_.push_back(v);
      labeled.insert(v);
    }
  }
  for (const auto& v : post)
    if (!labeled.count(v))
      fail(Errc::bad_argument, "declared boundary must cover the whole computed boundary; "
                               "missing " +
                                   to_string(v.canon, n));
  return f;
}

Fractal Fractal::catalog(const std::string& name) {
  auto rv = [](long nx, long dx, long ny, long dy) {
    return RVec2{Rat(nx, dx), Rat(ny, dy)};
  };

  if (name == "sg" || name == "sg3") {
    // triangle with a rational stand-in for the equilateral height, so that
    // identification arithmetic stays exact
    RVec2 v1 = rv(0, 1, 0, 1), v2 = rv(1, 2, 433, 500), v3 = rv(1, 1, 0, 1);
    FractalSpec spec;
    spec.name = name;
    spec.exact = true;
    if (name == "sg") {
      spec.contraction_bound = 0.5;
      for (const RVec2& c : {v1, v2, v3})
        spec.maps.push_back(AffineMap::homothety(c, Rat(1, 2)));
    } else {
      spec.contraction_bound = 1.0 / 3 + 1e-12;
      auto mid = [](const RVec2& a, const RVec2& b) {
        return RVec2{(a.x + b.x) / 2, (a.y + b.y) / 2};
      };
      for (const RVec2& c : {v1, v2, v3, mid(v1, v2), mid(v1, v3), mid(v2, v3)})
        spec.maps.push_back(AffineMap::homothety(c, Rat(1, 3)));
    }
    spec.boundary_labels = {1, 2, 3};
    return make(spec);
  }

  if (name == "pentagasket") {
    // five just-touching maps toward the pentagon corners u0..u4 (u_k at
    // angle 90+72k degrees), ratio (3-sqrt 5)/2. Map k carries a 72k degree
    // rotation about the centre, which funnels every cell-contact preimage
    // onto {u0, u2, u3}: cell k meets cell k+1 at map_k(u_{k+2}) =
    // (map_k o rot^k)(u2) = (map_{k+1} o rot^{k+1})(u3). The boundary
    // becomes those 3 points; u2 and u3 are not fixed by their rotated maps,
    // so they are named by itineraries through the u0 map instead.
    FractalSpec spec;
    spec.name = name;
    spec.exact = false;
    double r = (3.0 - std::sqrt(5.0)) / 2.0;
    spec.contraction_bound = r + 1e-12;
    for (int k = 0; k < 5; ++k) {
      double th = (90.0 + 72.0 * k) * std::numbers::pi / 180.0;
      Vec2 u{std::cos(th), std::sin(th)};
      double rot = 72.0 * k * std::numbers::pi / 180.0;
      double c = std::cos(rot), s = std::sin(rot);
      AffineMap m;
      m.a = {r * c, -r * s, r * s, r * c};
      m.b = {(1 - r) * u.x, (1 - r) * u.y};
      spec.maps.push_back(m);
    }
    spec.boundary_points = {Itinerary{{}, 1}, Itinerary{{3}, 1}, Itinerary{{4}, 1}};
    return make(spec);
  }

  if (name == "hexagasket") {
    // six ratio-1/3 maps; the odd ones carry a -60 degree rotation about the
    // hexagon centre, which moves every cell-contact preimage onto the
    // alternate vertices u0, u2, u4 and shrinks the boundary to 3 points
    FractalSpec spec;
    spec.name = name;
    spec.exact = false;
    spec.contraction_bound = 1.0 / 3 + 1e-12;
    for (int k = 0; k < 6; ++k) {
      double th = 60.0 * k * std::numbers::pi / 180.0;
      Vec2 u{std::cos(th), std::sin(th)};
      AffineMap m;
      if (k % 2 == 0) {
        m.a = {1.0 / 3, 0, 0, 1.0 / 3};
      } else {
        double c = std::cos(-std::numbers::pi / 3), s = std::sin(-std::numbers::pi / 3);
        m.a = {c / 3, -s / 3, s / 3, c / 3};
      }
      m.b = {2.0 / 3 * u.x, 2.0 / 3 * u.y};
      spec.maps.push_back(m);
    }
    spec.boundary_labels = {1, 3, 5};
    return make(spec);
  }

  fail(Errc::unsupported_fractal, "unknown catalog name '" + name + "'");
}

}  // namespace fhm

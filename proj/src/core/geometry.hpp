#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/rational.hpp"

namespace fhm {

struct Vec2 {
  double x = 0, y = 0;
};

struct RVec2 {
  Rat x, y;
};

/// Affine contraction x -> A x + b. The rational mirror is present when every
/// coefficient is rational, which keeps vertex identification exact.
struct AffineMap {
  std::array<double, 4> a{};  // row major: a[0] a[1] / a[2] a[3]
  std::array<double, 2> b{};
  bool exact = false;
  std::array<Rat, 4> ra{};
  std::array<Rat, 2> rb{};

  Vec2 apply(const Vec2& p) const {
    return {a[0] * p.x + a[1] * p.y + b[0], a[2] * p.x + a[3] * p.y + b[1]};
  }
  RVec2 apply(const RVec2& p) const {
    return {ra[0] * p.x + ra[1] * p.y + rb[0], ra[2] * p.x + ra[3] * p.y + rb[1]};
  }
  double operator_norm() const;
  Vec2 fixed_point() const;
  RVec2 fixed_point_exact() const;

  static AffineMap homothety(const RVec2& center, const Rat& ratio);
  static AffineMap similarity(const Vec2& center, double ratio, double rot_deg);
};

using Letter = int;  // 1-based map index
using Word = std::vector<Letter>;

/// Address of an attractor point: the finite prefix followed by an infinitely
/// repeated tail letter. (prefix w, tail s) names F_w(fixed point of F_s).
struct Itinerary {
  Word prefix;
  Letter tail = 1;

  bool operator==(const Itinerary&) const = default;
};

/// Shorter prefix first, then lexicographic on prefix letters, then tail.
bool itinerary_less(const Itinerary& a, const Itinerary& b);

/// Strips trailing copies of the tail letter from the prefix, so that
/// (w s, tail s) and (w, tail s) name the same address.
Itinerary normalize_itinerary(Itinerary it);

std::string to_string(const Itinerary& it, int letter_count);
std::optional<Itinerary> itinerary_from_string(const std::string& text);

/// Canonical vertex handle: the least itinerary among all addresses of the
/// point. level == canon.prefix.size() is the first level where it appears.
struct VertexId {
  Itinerary canon;

  int level() const { return static_cast<int>(canon.prefix.size()); }
  bool operator==(const VertexId&) const = default;
};

inline bool operator<(const VertexId& a, const VertexId& b) {
  return itinerary_less(a.canon, b.canon);
}

struct VertexIdHash {
  std::size_t operator()(const VertexId& v) const;
};

struct FractalSpec {
  std::string name;
  std::vector<AffineMap> maps;
  std::vector<Letter> boundary_labels;  // boundary walk order
  // Overrides boundary_labels when non-empty. Needed when a boundary vertex
  // is not the fixed point of any single map (rotated polygasket systems),
  // so it can only be named by an eventually-periodic itinerary.
  std::vector<Itinerary> boundary_points;
  double contraction_bound = 1.0;
  bool exact = true;  // identification arithmetic
};

/// One equivalence class of itinerary suffixes: every member pattern, appended
/// to a common cell word, addresses the same junction point.
struct JunctionClass {
  std::vector<Itinerary> patterns;  // sorted, >= 2 entries
};

class Fractal {
public:
  /// Validates the spec: contractivity, connectivity, finite post-critical
  /// set, and boundary_labels matching the computed boundary.
  static Fractal make(const FractalSpec& spec);
  /// Built-in entries: "sg", "sg3", "pentagasket", "hexagasket".
  static Fractal catalog(const std::string& name);

  const FractalSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  int letter_count() const { return static_cast<int>(spec_.maps.size()); }
  bool exact() const { return spec_.exact; }
  const std::vector<JunctionClass>& junctions() const { return junctions_; }

  /// Boundary vertices in boundary-walk order.
  const std::vector<VertexId>& boundary() const { return boundary_; }
  bool is_boundary(const VertexId& v) const;

  Vec2 apply_word(const Word& w, const Vec2& p) const;
  Vec2 vertex_coordinates(const Itinerary& it) const;
  RVec2 vertex_coordinates_exact(const Itinerary& it) const;

  VertexId canonical_vertex(const Itinerary& it) const;
  /// All addresses of the vertex (the rewrite closure of its itinerary).
  std::vector<Itinerary> itineraries_of(const VertexId& v) const;

  /// Corner `j` (1-based position in the boundary walk) of the cell F_w(K):
  /// the image of the j-th boundary vertex under F_w.
  VertexId vertex(const Word& cell, int corner) const;

  void check_word(const Word& w) const;

private:
  Fractal() = default;

  FractalSpec spec_;
  std::vector<JunctionClass> junctions_;
  std::vector<VertexId> boundary_;

  std::vector<Itinerary> closure(const Itinerary& it) const;
};

}  // namespace fhm

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <string>

#include "core/covering.hpp"
#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/harmonic.hpp"
#include "core/io.hpp"
#include "doctest.h"

using namespace fhm;

namespace {

HarmonicMapResult solve_setup(const FractalSetup& su, std::vector<long> degree,
                              std::vector<Rat> deltas, int level, SolveOptions opt = {}) {
  DegreeVector deg;
  deg.entries = std::move(degree);
  BoundaryData bc;
  bc.rho0 = deg.at(0);
  if (deltas.empty()) deltas.assign(su.fractal.boundary().size() - 1, Rat(0));
  bc.deltas = std::move(deltas);
  return solve_harmonic_map(su.fractal, su.structure, deg, bc, level, opt);
}

}  // namespace

TEST_CASE("result documents round-trip byte for byte") {
  FractalSetup su = setup_from_name("sg");
  HarmonicMapResult r = solve_setup(su, {1}, {Rat(1, 3), Rat(1, 3)}, 3);
  std::string j1 = serialize_result(r, su.fractal, su.config_json);
  std::string j2 = serialize_result(r, su.fractal, su.config_json);
  CHECK(j1 == j2);

  ResultDocument doc = parse_result(j1);
  CHECK(doc.fractal == "sg");
  CHECK(doc.level == 3);
  CHECK(doc.exact);
  CHECK(doc.basis_level == -1);
  CHECK(doc.degree == std::vector<long>{1});
  REQUIRE(doc.deltas.size() == 2);
  CHECK(doc.deltas[0] == "1/3");
  CHECK(doc.energy == r.energy);
  CHECK(doc.max_residual == r.max_residual);
  REQUIRE(doc.cuts.size() == 1);
  CHECK(doc.cuts[0].minus_it == Itinerary{{1}, 3});
  CHECK(doc.cuts[0].plus_it == Itinerary{{3}, 1});
  CHECK(doc.cuts[0].shift == 1);

  // one row per value plus the duplicated cut vertex
  CHECK(doc.rows.size() == r.lift.size() + r.cuts.size());

  // stored floats are bit-identical to the solved values
  Fractal f = Fractal::catalog("sg");
  int matched = 0;
  for (const ResultRow& row : doc.rows) {
    auto it = itinerary_from_string(row.id);
    REQUIRE(it.has_value());
    VertexId v = f.canonical_vertex(*it);
    if (to_string(v.canon, 3) != row.id) continue;  // plus-sheet rows
    CHECK(row.lift == r.lift.at(v));
    ++matched;
  }
  CHECK(matched == static_cast<int>(r.lift.size()));

  // exact lifts appear as rational strings
  bool saw_exact = false;
  for (const ResultRow& row : doc.rows)
    if (!row.lift_exact.empty()) saw_exact = true;
  CHECK(saw_exact);
}

TEST_CASE("general-route documents keep their cuts and basis level") {
  FractalSetup su = setup_from_name("pentagasket");
  HarmonicMapResult r = solve_setup(su, {0, 0, 1}, {}, 3);
  std::string text = serialize_result(r, su.fractal, su.config_json);
  ResultDocument doc = parse_result(text);
  CHECK(!doc.exact);
  CHECK(doc.basis_level == 1);
  CHECK(doc.cuts.size() == 6);
  CHECK(doc.rows.size() == r.lift.size() + 6);
  for (size_t i = 0; i < doc.cuts.size(); ++i) {
    CHECK(doc.cuts[i].minus_it == r.cuts[i].minus_it);
    CHECK(doc.cuts[i].plus_it == r.cuts[i].plus_it);
    CHECK(doc.cuts[i].shift == r.cuts[i].shift);
    CHECK(doc.cuts[i].index == r.cuts[i].index);
  }

  VerifyReport rep = verify_result(doc);
  CHECK(rep.ok());
}

TEST_CASE("csv export") {
  FractalSetup su = setup_from_name("sg");
  HarmonicMapResult r = solve_setup(su, {1}, {}, 2);
  ResultDocument doc = parse_result(serialize_result(r, su.fractal, su.config_json));
  std::string csv = result_to_csv(doc);
  CHECK(csv.rfind("id,x,y,lift,circle", 0) == 0);
  size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == doc.rows.size() + 1);
}

TEST_CASE("svg rendering is deterministic and hue-coded") {
  FractalSetup su = setup_from_name("sg");
  HarmonicMapResult r = solve_setup(su, {1}, {}, 3);
  ResultDocument doc = parse_result(serialize_result(r, su.fractal, su.config_json));

  std::string a = render_svg(doc);
  std::string b = render_svg(doc);
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("hsl(") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a.find("circle") != std::string::npos);

  SvgOptions small;
  small.size = 200;
  small.legend = false;
  std::string c = render_svg(doc, small);
  CHECK(c != a);
  CHECK(c.find("<text") == std::string::npos);
  CHECK(a.find("<text") != std::string::npos);

  ResultDocument empty;
  CHECK_THROWS_AS((void)render_svg(empty), Error);
}

TEST_CASE("custom configs build and solve") {
  std::string cfg = R"({
    "name": "mysg",
    "arithmetic": "exact",
    "maps": [
      {"matrix": ["1/2", 0, 0, "1/2"], "offset": [0, 0]},
      {"matrix": ["1/2", 0, 0, "1/2"], "offset": ["1/2", 0]},
      {"matrix": ["1/2", 0, 0, "1/2"], "offset": ["1/4", "1/2"]}
    ],
    "boundary_labels": [1, 2, 3],
    "structure": {
      "base_form": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],
      "weights": ["3/5", "3/5", "3/5"]
    }
  })";
  FractalSetup su = setup_from_config(cfg);
  CHECK(su.fractal.name() == "mysg");
  CHECK(!su.config_json.empty());

  HarmonicMapResult r = solve_setup(su, {1}, {}, 3);
  CHECK(r.energy == doctest::Approx(1.5).epsilon(1e-9));

  // the config travels inside the document, so verification can rebuild it
  std::string text = serialize_result(r, su.fractal, su.config_json);
  ResultDocument doc = parse_result(text);
  CHECK(!doc.config_json.empty());
  CHECK(verify_result(doc).ok());
}

TEST_CASE("catalog shortcut configs with structure override") {
  std::string cfg = R"({
    "catalog": "sg",
    "structure": {
      "base_form": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],
      "weights": [0.6, 0.6, 0.6]
    }
  })";
  FractalSetup su = setup_from_config(cfg);
  CHECK(su.fractal.name() == "sg");
  HarmonicMapResult r = solve_setup(su, {1}, {}, 2);
  CHECK(r.energy == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("similarity maps with rotation need float arithmetic") {
  std::string rotated = R"({
    "arithmetic": "float",
    "maps": [
      {"center": [1, 0], "ratio": 0.3333333333333333, "rotation": 0},
      {"center": [-0.5, 0.866025403784], "ratio": 0.3333333333333333, "rotation": 0},
      {"center": [-0.5, -0.866025403784], "ratio": 0.3333333333333333, "rotation": 0}
    ],
    "boundary_labels": [1, 2, 3],
    "structure": {
      "base_form": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],
      "weights": [0.6, 0.6, 0.6]
    }
  })";
  // ratio-1/3 corner maps leave a disconnected attractor
  CHECK_THROWS_AS((void)setup_from_config(rotated), Error);

  std::string exact_rot = R"({
    "arithmetic": "exact",
    "maps": [{"center": [0, 0], "ratio": "1/2", "rotation": 90}],
    "boundary_labels": [1],
    "structure": {"base_form": [[0]], "weights": [0.5]}
  })";
  CHECK_THROWS_AS((void)setup_from_config(exact_rot), Error);
}

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_THROWS_AS((void)setup_from_config("not json"), Error);
  CHECK_THROWS_AS((void)setup_from_config("[1,2]"), Error);
  CHECK_THROWS_AS((void)setup_from_config("{\"maps\": 3}"), Error);
  CHECK_THROWS_AS((void)setup_from_config("{\"catalog\": \"nope\"}"), Error);
  CHECK_THROWS_AS((void)setup_from_config(R"({"arithmetic": "fuzzy", "maps": []})"), Error);

  // exact arithmetic refuses bare floats
  std::string floaty = R"({
    "arithmetic": "exact",
    "maps": [{"matrix": [0.5, 0, 0, 0.5], "offset": [0, 0]}],
    "boundary_labels": [1],
    "structure": {"base_form": [[0]], "weights": [0.5]}
  })";
  CHECK_THROWS_AS((void)setup_from_config(floaty), Error);

  // a custom spec needs its structure spelled out
  std::string bare = R"({
    "maps": [
      {"matrix": ["1/2", 0, 0, "1/2"], "offset": [0, 0]},
      {"matrix": ["1/2", 0, 0, "1/2"], "offset": ["1/2", 0]}
    ],
    "boundary_labels": [1, 2]
  })";
  CHECK_THROWS_AS((void)setup_from_config(bare), Error);

  CHECK_THROWS_AS((void)parse_result("{}"), Error);
  CHECK_THROWS_AS((void)parse_result("nope"), Error);
}

TEST_CASE("verification catches broken documents but allows sheet shifts") {
  FractalSetup su = setup_from_name("sg");
  HarmonicMapResult r = solve_setup(su, {1}, {}, 3);
  ResultDocument doc = parse_result(serialize_result(r, su.fractal, su.config_json));

  VerifyReport good = verify_result(doc);
  CHECK(good.ok());
  CHECK(good.residual_ok);
  CHECK(good.energy_ok);
  CHECK(good.degree_ok);
  CHECK(good.recovered == std::vector<long>{1});
  REQUIRE(good.lines.size() == 3);
  CHECK(good.lines[0].rfind("pass", 0) == 0);

  // moving every value by a whole turn changes nothing observable
  ResultDocument shifted = doc;
  for (ResultRow& row : shifted.rows) {
    row.lift += 1.0;
    row.lift_exact.clear();
  }
  CHECK(verify_result(shifted).ok());

  // a single perturbed interior value breaks harmonicity
  ResultDocument bad = doc;
  for (ResultRow& row : bad.rows) {
    if (row.id == "11/2") {
      row.lift += 0.01;
      row.lift_exact.clear();
      break;
    }
  }
  VerifyReport rep = verify_result(bad);
  CHECK(!rep.residual_ok);
  CHECK(!rep.ok());
  CHECK(rep.lines[0].rfind("FAIL", 0) == 0);

  // tampering with the stored energy is caught
  ResultDocument cooked = doc;
  cooked.energy += 0.5;
  CHECK(!verify_result(cooked).energy_ok);

  // claiming a different degree is caught
  ResultDocument wound = doc;
  wound.degree = {2};
  CHECK(!verify_result(wound).degree_ok);

  // losing a vertex row is an error, not a silent pass
  ResultDocument missing = doc;
  missing.rows.pop_back();
  missing.rows.pop_back();
  CHECK_THROWS_AS((void)verify_result(missing), Error);
}

TEST_CASE("text files round-trip and report failures") {
  std::string path = "/tmp/fhm_io_test.txt";
  write_text_file(path, "hello\nworld\n");
  CHECK(read_text_file(path) == "hello\nworld\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)read_text_file("/nonexistent/f"), Error);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/f", "x"), Error);
}

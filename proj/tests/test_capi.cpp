#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "fractalhm/fractalhm.h"

// Everything here goes through the shared library's C surface; the C++ core
// is intentionally out of reach.

namespace {

struct Fr {
  fhm_fractal* p = nullptr;
  ~Fr() { fhm_fractal_free(p); }
};

struct Res {
  fhm_result* p = nullptr;
  ~Res() { fhm_result_free(p); }
};

struct Str {
  char* p = nullptr;
  ~Str() { fhm_string_free(p); }
  std::string s() const { return p ? std::string(p) : std::string(); }
};

}  // namespace

TEST_CASE("version and error channel") {
  const char* v = fhm_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) >= 5);

  Fr f;
  CHECK(fhm_fractal_from_name("nosuch", &f.p) == FHM_ERR_UNSUPPORTED_FRACTAL);
  CHECK(f.p == nullptr);
  CHECK(std::strlen(fhm_last_error()) > 0);
}

TEST_CASE("null arguments are rejected, not crashed on") {
  CHECK(fhm_fractal_from_name(nullptr, nullptr) == FHM_ERR_BAD_ARGUMENT);
  CHECK(fhm_fractal_from_config(nullptr, nullptr) == FHM_ERR_BAD_ARGUMENT);
  CHECK(fhm_fractal_map_count(nullptr) == 0);
  CHECK(fhm_fractal_boundary_count(nullptr) == 0);
  CHECK(fhm_solve(nullptr, nullptr, 0, nullptr, 0, 1, nullptr, nullptr) == FHM_ERR_BAD_ARGUMENT);
  CHECK(fhm_result_level(nullptr) == -1);
  CHECK(fhm_result_vertex_count(nullptr) == 0);
  CHECK(fhm_result_to_json(nullptr, nullptr) == FHM_ERR_BAD_ARGUMENT);
  CHECK(fhm_verify_json(nullptr, 1e-9, nullptr, nullptr) == FHM_ERR_BAD_ARGUMENT);
  CHECK(fhm_renormalization_factor(nullptr, 0, nullptr) == FHM_ERR_BAD_ARGUMENT);
  fhm_fractal_free(nullptr);
  fhm_result_free(nullptr);
  fhm_string_free(nullptr);
}

TEST_CASE("catalog shapes expose their map and boundary counts") {
  const struct {
    const char* name;
    int maps, boundary;
  } expect[] = {{"sg", 3, 3}, {"sg3", 6, 3}, {"hexagasket", 6, 3}, {"pentagasket", 5, 3}};
  for (const auto& e : expect) {
    Fr f;
    REQUIRE(fhm_fractal_from_name(e.name, &f.p) == FHM_OK);
    CHECK(fhm_fractal_map_count(f.p) == e.maps);
    CHECK(fhm_fractal_boundary_count(f.p) == e.boundary);
  }
}

TEST_CASE("a full solve through the library boundary") {
  Fr f;
  REQUIRE(fhm_fractal_from_name("sg", &f.p) == FHM_OK);

  long degree[1] = {1};
  Res r;
  REQUIRE(fhm_solve(f.p, degree, 1, nullptr, 0, 4, nullptr, &r.p) == FHM_OK);

  CHECK(fhm_result_energy(r.p) == 1.5);
  CHECK(fhm_result_max_residual(r.p) == 0.0);
  CHECK(fhm_result_level(r.p) == 4);
  CHECK(fhm_result_basis_level(r.p) == -1);
  CHECK(fhm_result_exact(r.p) == 1);
  CHECK(fhm_result_vertex_count(r.p) == 123);  // 3 (3^4 + 1) / 2
  CHECK(fhm_result_cut_count(r.p) == 1);

  long deg_out[4] = {-9, -9, -9, -9};
  CHECK(fhm_result_degree(r.p, deg_out, 4) == 1);
  CHECK(deg_out[0] == 1);
  CHECK(deg_out[1] == -9);
  CHECK(fhm_result_degree(r.p, nullptr, 0) == 1);  // length query

  long rec[4] = {0};
  size_t len = 0;
  REQUIRE(fhm_result_recovered_degree(r.p, rec, 4, &len) == FHM_OK);
  REQUIRE(len == 1);
  CHECK(rec[0] == 1);
}

TEST_CASE("serializations and verification round-trip through strings") {
  Fr f;
  REQUIRE(fhm_fractal_from_name("sg", &f.p) == FHM_OK);
  long degree[1] = {1};
  const char* deltas[2] = {"1/3", "1/3"};
  Res r;
  REQUIRE(fhm_solve(f.p, degree, 1, deltas, 2, 3, nullptr, &r.p) == FHM_OK);

  Str json;
  REQUIRE(fhm_result_to_json(r.p, &json.p) == FHM_OK);
  CHECK(json.s().find("\"fractal\": \"sg\"") != std::string::npos);
  CHECK(json.s().find("\"1/3\"") != std::string::npos);

  int ok = 0;
  Str report;
  REQUIRE(fhm_verify_json(json.p, 1e-9, &ok, &report.p) == FHM_OK);
  CHECK(ok == 1);
  CHECK(report.s().find("pass") != std::string::npos);
  CHECK(report.s().find("FAIL") == std::string::npos);

  Str csv;
  REQUIRE(fhm_result_to_csv(r.p, &csv.p) == FHM_OK);
  CHECK(csv.s().rfind("id,x,y,lift,circle", 0) == 0);

  Str svg1, svg2;
  REQUIRE(fhm_result_to_svg(r.p, 640, 1, &svg1.p) == FHM_OK);
  REQUIRE(fhm_render_json(json.p, 640, 1, &svg2.p) == FHM_OK);
  CHECK(svg1.s() == svg2.s());
  CHECK(svg1.s().rfind("<svg", 0) == 0);

  CHECK(fhm_verify_json("{broken", 1e-9, &ok, &report.p) == FHM_ERR_PARSE);
}

TEST_CASE("the general route can be forced and agrees with the fast one") {
  Fr f;
  REQUIRE(fhm_fractal_from_name("sg", &f.p) == FHM_OK);
  long degree[1] = {1};
  fhm_solve_options opt = {1, -1};
  Res r;
  REQUIRE(fhm_solve(f.p, degree, 1, nullptr, 0, 3, &opt, &r.p) == FHM_OK);
  CHECK(fhm_result_exact(r.p) == 0);
  CHECK(fhm_result_basis_level(r.p) == 0);
  CHECK(fhm_result_energy(r.p) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("failure modes come back as status codes") {
  Fr f;
  REQUIRE(fhm_fractal_from_name("sg", &f.p) == FHM_OK);

  long deep[4] = {1, 1, 1, 1};
  Res r1;
  CHECK(fhm_solve(f.p, deep, 4, nullptr, 0, 1, nullptr, &r1.p) == FHM_ERR_LEVEL_TOO_SMALL);
  CHECK(r1.p == nullptr);

  // a two-turn winding on a coarse grid solves, but the samples are too far
  // apart for the winding to be read back
  long two[1] = {2};
  Res r2;
  REQUIRE(fhm_solve(f.p, two, 1, nullptr, 0, 2, nullptr, &r2.p) == FHM_OK);
  long rec[2];
  size_t len = 0;
  CHECK(fhm_result_recovered_degree(r2.p, rec, 2, &len) == FHM_ERR_INCREMENT_TOO_LARGE);

  const char* bad_delta[2] = {"x", "y"};
  Res r3;
  CHECK(fhm_solve(f.p, deep, 1, bad_delta, 2, 3, nullptr, &r3.p) == FHM_ERR_PARSE);
}

TEST_CASE("config documents work through the boundary") {
  const char* cfg = R"({
    "catalog": "sg",
    "structure": {
      "base_form": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],
      "weights": ["3/5", "3/5", "3/5"]
    }
  })";
  Fr f;
  REQUIRE(fhm_fractal_from_config(cfg, &f.p) == FHM_OK);
  CHECK(fhm_fractal_map_count(f.p) == 3);

  Fr bad;
  CHECK(fhm_fractal_from_config("{\"maps\": 3}", &bad.p) == FHM_ERR_PARSE);
}

TEST_CASE("renormalization factors and basis reports") {
  Fr sg;
  REQUIRE(fhm_fractal_from_name("sg", &sg.p) == FHM_OK);
  double factor = 0;
  REQUIRE(fhm_renormalization_factor(sg.p, 0, &factor) == FHM_OK);
  CHECK(factor == doctest::Approx(0.6).epsilon(1e-10));

  Fr penta;
  REQUIRE(fhm_fractal_from_name("pentagasket", &penta.p) == FHM_OK);
  REQUIRE(fhm_renormalization_factor(penta.p, 0, &factor) == FHM_OK);
  CHECK(factor == doctest::Approx(0.46107219255618997).epsilon(1e-9));

  Str rep;
  REQUIRE(fhm_basis_report(sg.p, 1, &rep.p) == FHM_OK);
  CHECK(rep.s().find("sg level 1: 6 vertices, 9 edges, cycle space dimension 4") !=
        std::string::npos);
  CHECK(rep.s().find("cycle 0") != std::string::npos);
  CHECK(rep.s().find("cut points:") != std::string::npos);
}

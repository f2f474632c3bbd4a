#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/io.hpp"
#include "doctest.h"

// Drives the installed command line binary end to end. The binary's path
// arrives as the first plain argument (the build system passes it in).

namespace {

std::string g_cli;
std::filesystem::path g_dir;

struct RunResult {
  int code = -1;
  std::string out;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  std::filesystem::path log = g_dir / "last_run.txt";
  std::string cmd = "'" + g_cli + "' " + args + " >'" + log.string() + "' 2>&1";
  int st = std::system(cmd.c_str());
  RunResult r;
  if (st != -1 && WIFEXITED(st)) r.code = WEXITSTATUS(st);
  std::ifstream in(log);
  std::ostringstream os;
  os << in.rdbuf();
  r.out = os.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path tmp(const char* name) { return g_dir / name; }

}  // namespace

TEST_CASE("solve writes every artifact and reports the invariants") {
  auto json = tmp("map.json");
  auto csv = tmp("map.csv");
  auto svg = tmp("map.svg");
  RunResult r = run_cli("solve --fractal sg --level 6 --degree 1 --out " + json.string() +
                        " --csv " + csv.string() + " --svg " + svg.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("energy 1.5\n") != std::string::npos);
  CHECK(r.out.find("max residual 0\n") != std::string::npos);
  CHECK(r.out.find("recovered degree 1\n") != std::string::npos);
  CHECK(r.out.find("wrote " + json.string()) != std::string::npos);

  fhm::ResultDocument doc = fhm::parse_result(slurp(json));
  CHECK(doc.fractal == "sg");
  CHECK(doc.level == 6);
  CHECK(doc.degree == std::vector<long>{1});
  CHECK(doc.exact);

  CHECK(slurp(csv).rfind("id,x,y,lift,circle", 0) == 0);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);

  RunResult v = run_cli("verify " + json.string());
  CHECK(v.code == 0);
  CHECK(v.out.find("pass  harmonicity") != std::string::npos);
  CHECK(v.out.find("pass  energy") != std::string::npos);
  CHECK(v.out.find("pass  degree") != std::string::npos);

  auto out_svg = tmp("render.svg");
  RunResult rend = run_cli("render " + json.string() + " --out " + out_svg.string() +
                           " --size 300 --no-legend");
  CHECK(rend.code == 0);
  std::string small = slurp(out_svg);
  CHECK(small.rfind("<svg", 0) == 0);
  CHECK(small != slurp(svg));
}

TEST_CASE("deep winding vectors round-trip") {
  RunResult r = run_cli("solve --fractal sg --level 4 --degree 1,1,1,1");
  CHECK(r.code == 0);
  CHECK(r.out.find("recovered degree 1,1,1,1\n") != std::string::npos);
}

TEST_CASE("boundary increments alone make a nontrivial map") {
  RunResult r = run_cli("solve --fractal sg --level 3 --degree 0 --delta 1/3,1/3");
  CHECK(r.code == 0);
  CHECK(r.out.find("recovered degree 0\n") != std::string::npos);
  double energy = -1;
  REQUIRE(std::sscanf(r.out.c_str(), "energy %lf", &energy) == 1);
  CHECK(energy > 0.1);
}

TEST_CASE("the forced general route matches the recursive one") {
  RunResult r = run_cli("solve --fractal sg --level 3 --degree 1 --general");
  CHECK(r.code == 0);
  double energy = -1;
  REQUIRE(std::sscanf(r.out.c_str(), "energy %lf", &energy) == 1);
  CHECK(energy == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("configuration mistakes exit with 2") {
  CHECK(run_cli("solve --fractal klein --level 3 --degree 1").code == 2);
  CHECK(run_cli("solve --fractal sg --level 3 --degree 1,x").code == 2);
  CHECK(run_cli("solve --fractal sg --degree 1").code == 2);  // missing --level
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("verify /nonexistent.json").code == 2);
  CHECK(run_cli("solve --config /nonexistent.json --level 2 --degree 0").code == 2);

  auto bad = tmp("bad_config.json");
  std::ofstream(bad) << "{\"maps\": 3}";
  CHECK(run_cli("solve --config " + bad.string() + " --level 2 --degree 0").code == 2);
}

TEST_CASE("solver failures exit with 3") {
  RunResult r = run_cli("solve --fractal sg --level 1 --degree 0,0,0,1");
  CHECK(r.code == 3);
  CHECK(r.out.find("solve failed") != std::string::npos);
}

TEST_CASE("unverifiable results exit with 4") {
  // too coarse a grid to read a two-turn winding back off the values
  RunResult coarse = run_cli("solve --fractal sg --level 2 --degree 2");
  CHECK(coarse.code == 4);

  // a tampered energy field fails verification
  auto json = tmp("tamper.json");
  RunResult made = run_cli("solve --fractal sg --level 3 --degree 1 --out " + json.string());
  REQUIRE(made.code == 0);
  std::string text = slurp(json);
  size_t pos = text.find("\"energy\": 1.5");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"energy\": 1.5").size(), "\"energy\": 1.6");
  std::ofstream(json, std::ios::binary) << text;
  RunResult v = run_cli("verify " + json.string());
  CHECK(v.code == 4);
  CHECK(v.out.find("FAIL") != std::string::npos);
}

TEST_CASE("custom config files drive the solver") {
  auto cfg = tmp("custom.json");
  std::ofstream(cfg) << R"({
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
  auto json = tmp("custom_map.json");
  RunResult r = run_cli("solve --config " + cfg.string() + " --level 3 --degree 1 --out " +
                        json.string());
  CHECK(r.code == 0);
  CHECK(run_cli("verify " + json.string()).code == 0);
}

TEST_CASE("basis and renorm report the graph structure") {
  RunResult b = run_cli("basis --fractal sg --level 1");
  CHECK(b.code == 0);
  CHECK(b.out.find("sg level 1: 6 vertices, 9 edges, cycle space dimension 4") !=
        std::string::npos);
  CHECK(b.out.find("cut points:") != std::string::npos);

  RunResult rn = run_cli("renorm --fractal sg");
  CHECK(rn.code == 0);
  double factor = -1;
  REQUIRE(std::sscanf(rn.out.c_str(), "renormalization factor %lf", &factor) == 1);
  CHECK(factor == doctest::Approx(0.6).epsilon(1e-10));

  RunResult rp = run_cli("renorm --fractal pentagasket");
  CHECK(rp.code == 0);
  REQUIRE(std::sscanf(rp.out.c_str(), "renormalization factor %lf", &factor) == 1);
  CHECK(factor == doctest::Approx(0.46107219255618997).epsilon(1e-9));
}

int main(int argc, char** argv) {
  std::vector<char*> pass;
  pass.push_back(argv[0]);
  for (int i = 1; i < argc; ++i) {
    if (g_cli.empty() && argv[i][0] != '-') {
      g_cli = argv[i];
      continue;
    }
    pass.push_back(argv[i]);
  }
  if (g_cli.empty() || !std::filesystem::exists(g_cli)) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary> [doctest options]\n");
    return 1;
  }
  char tmpl[] = "/tmp/fhm_cli_XXXXXX";
  char* dir = mkdtemp(tmpl);
  if (!dir) {
    std::fprintf(stderr, "cannot create scratch directory\n");
    return 1;
  }
  g_dir = dir;

  doctest::Context ctx(static_cast<int>(pass.size()), pass.data());
  int rc = ctx.run();

  std::error_code ec;
  std::filesystem::remove_all(g_dir, ec);
  return rc;
}

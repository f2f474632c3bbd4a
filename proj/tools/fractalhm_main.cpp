// Command line front end. Talks to the solver exclusively through the shared
// library's C interface.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fractalhm/fractalhm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitMismatch = 4;

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { fhm_string_free(s); }
};

struct FractalGuard {
  fhm_fractal* f = nullptr;
  ~FractalGuard() { fhm_fractal_free(f); }
};

struct ResultGuard {
  fhm_result* r = nullptr;
  ~ResultGuard() { fhm_result_free(r); }
};

int fail_with(int exit_code, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), fhm_last_error());
  return exit_code;
}

bool parse_longs(const std::string& text, std::vector<long>& out) {
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stol(tok, &used));
      if (used != tok.size()) return false;
    } catch (...) {
      return false;
    }
  }
  return !out.empty();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream os;
  os << in.rdbuf();
  out = os.str();
  return true;
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

// Builds the fractal handle from --fractal or --config. Returns kExitOk or
// kExitConfig.
int open_fractal(const std::string& name, const std::string& config_path,
                 fhm_fractal** out) {
  if (!config_path.empty()) {
    std::string text;
    if (!read_file(config_path, text)) {
      std::fprintf(stderr, "error: cannot read config '%s'\n", config_path.c_str());
      return kExitConfig;
    }
    if (fhm_fractal_from_config(text.c_str(), out) != FHM_OK)
      return fail_with(kExitConfig, "bad config");
    return kExitOk;
  }
  if (fhm_fractal_from_name(name.c_str(), out) != FHM_OK)
    return fail_with(kExitConfig, "unknown fractal");
  return kExitOk;
}

int run_solve(const std::string& fractal, const std::string& config, int level,
              const std::string& degree_text, const std::string& delta_text,
              const std::string& out_path, const std::string& csv_path,
              const std::string& svg_path, double tol, bool force_general,
              int basis_level) {
  std::vector<long> degree;
  if (!parse_longs(degree_text, degree)) {
    std::fprintf(stderr, "error: bad degree list '%s'\n", degree_text.c_str());
    return kExitConfig;
  }

  FractalGuard f;
  if (int rc = open_fractal(fractal, config, &f.f)) return rc;

  std::vector<std::string> delta_strs = split_commas(delta_text);
  std::vector<const char*> deltas;
  for (const std::string& s : delta_strs) deltas.push_back(s.c_str());

  fhm_solve_options opt{force_general ? 1 : 0, basis_level};
  ResultGuard r;
  if (fhm_solve(f.f, degree.data(), degree.size(), deltas.data(), deltas.size(), level,
                &opt, &r.r) != FHM_OK)
    return fail_with(kExitSolver, "solve failed");

  double energy = fhm_result_energy(r.r);
  double resid = fhm_result_max_residual(r.r);
  std::printf("energy %.17g\n", energy);
  std::printf("max residual %.17g\n", resid);

  if (!out_path.empty() || !csv_path.empty() || !svg_path.empty()) {
    StringGuard json, csv, svg;
    if (!out_path.empty()) {
      if (fhm_result_to_json(r.r, &json.s) != FHM_OK)
        return fail_with(kExitSolver, "serialization failed");
      if (!write_file(out_path, json.s)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
        return kExitConfig;
      }
      std::printf("wrote %s\n", out_path.c_str());
    }
    if (!csv_path.empty()) {
      if (fhm_result_to_csv(r.r, &csv.s) != FHM_OK)
        return fail_with(kExitSolver, "csv failed");
      if (!write_file(csv_path, csv.s)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", csv_path.c_str());
        return kExitConfig;
      }
      std::printf("wrote %s\n", csv_path.c_str());
    }
    if (!svg_path.empty()) {
      if (fhm_result_to_svg(r.r, 640, 1, &svg.s) != FHM_OK)
        return fail_with(kExitSolver, "svg failed");
      if (!write_file(svg_path, svg.s)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", svg_path.c_str());
        return kExitConfig;
      }
      std::printf("wrote %s\n", svg_path.c_str());
    }
  }

  // the run only counts if the prescribed winding numbers can be read back
  // off the solved map and the free vertices are balanced to tolerance
  std::vector<long> rec(degree.size() + 8, 0);
  size_t n = 0;
  if (fhm_result_recovered_degree(r.r, rec.data(), rec.size(), &n) != FHM_OK)
    return fail_with(kExitMismatch, "degree not recoverable");
  if (n > rec.size()) {
    rec.assign(n, 0);
    if (fhm_result_recovered_degree(r.r, rec.data(), rec.size(), &n) != FHM_OK)
      return fail_with(kExitMismatch, "degree not recoverable");
  }
  rec.resize(n);
  std::string rec_text;
  for (size_t i = 0; i < rec.size(); ++i)
    rec_text += (i ? "," : "") + std::to_string(rec[i]);
  std::printf("recovered degree %s\n", rec_text.empty() ? "0" : rec_text.c_str());

  auto trimmed = [](std::vector<long> v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
    return v;
  };
  if (trimmed(degree) != trimmed(rec)) {
    std::fprintf(stderr, "error: recovered degree (%s) differs from prescribed (%s)\n",
                 rec_text.c_str(), degree_text.c_str());
    return kExitMismatch;
  }
  if (!(resid <= tol)) {
    std::fprintf(stderr, "error: max residual %.3g above tolerance %.3g\n", resid, tol);
    return kExitMismatch;
  }
  return kExitOk;
}

int run_verify(const std::string& path, double tol) {
  std::string text;
  if (!read_file(path, text)) {
    std::fprintf(stderr, "error: cannot read '%s'\n", path.c_str());
    return kExitConfig;
  }
  int ok = 0;
  StringGuard report;
  if (fhm_verify_json(text.c_str(), tol, &ok, &report.s) != FHM_OK)
    return fail_with(kExitConfig, "bad result document");
  std::fputs(report.s, stdout);
  return ok ? kExitOk : kExitMismatch;
}

int run_render(const std::string& path, const std::string& out_path, int size,
               bool legend) {
  std::string text;
  if (!read_file(path, text)) {
    std::fprintf(stderr, "error: cannot read '%s'\n", path.c_str());
    return kExitConfig;
  }
  StringGuard svg;
  if (fhm_render_json(text.c_str(), size, legend ? 1 : 0, &svg.s) != FHM_OK)
    return fail_with(kExitConfig, "bad result document");
  if (!write_file(out_path, svg.s)) {
    std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
    return kExitConfig;
  }
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

int run_basis(const std::string& fractal, const std::string& config, int level) {
  FractalGuard f;
  if (int rc = open_fractal(fractal, config, &f.f)) return rc;
  StringGuard report;
  if (fhm_basis_report(f.f, level, &report.s) != FHM_OK)
    return fail_with(kExitSolver, "basis report failed");
  std::fputs(report.s, stdout);
  return kExitOk;
}

int run_renorm(const std::string& fractal, const std::string& config, double tol) {
  FractalGuard f;
  if (int rc = open_fractal(fractal, config, &f.f)) return rc;
  double r = 0;
  if (fhm_renormalization_factor(f.f, tol, &r) != FHM_OK)
    return fail_with(kExitSolver, "renormalization failed");
  std::printf("renormalization factor %.17g\n", r);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circle-valued harmonic maps on finitely ramified fractals"};
  app.require_subcommand(1);

  std::string fractal = "sg", config, degree = "0", delta;
  std::string out_path, csv_path, svg_path, in_path;
  int level = 3, size = 640, basis_level = -1;
  double tol = 1e-9;
  bool force_general = false, no_legend = false;

  auto add_fractal_opts = [&](CLI::App* cmd) {
    cmd->add_option("--fractal", fractal, "catalog name (sg, sg3, hexagasket, pentagasket)");
    cmd->add_option("--config", config, "JSON config file for a custom fractal");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve for a harmonic map and check it");
  add_fractal_opts(solve);
  solve->add_option("--level", level, "graph approximation depth")->required();
  solve->add_option("--degree", degree, "winding numbers, comma separated")->required();
  solve->add_option("--delta", delta, "boundary increments, comma separated rationals");
  solve->add_option("--out", out_path, "write the result document here");
  solve->add_option("--csv", csv_path, "write vertex values as csv");
  solve->add_option("--svg", svg_path, "write a rendering");
  solve->add_option("--tol", tol, "residual tolerance for the final check");
  solve->add_flag("--general", force_general, "always use the cut-graph route");
  solve->add_option("--basis-level", basis_level, "cycle basis level (-1: auto)");

  CLI::App* verify = app.add_subcommand("verify", "re-check a result document");
  verify->add_option("file", in_path, "result JSON")->required();
  verify->add_option("--tol", tol, "residual and energy tolerance");

  CLI::App* render = app.add_subcommand("render", "draw a result document as SVG");
  render->add_option("file", in_path, "result JSON")->required();
  render->add_option("--out", out_path, "output SVG path")->required();
  render->add_option("--size", size, "canvas size in pixels");
  render->add_flag("--no-legend", no_legend, "omit the legend strip");

  CLI::App* basis = app.add_subcommand("basis", "show the cycle basis and cut points");
  add_fractal_opts(basis);
  basis->add_option("--level", level, "graph approximation depth");

  CLI::App* renorm = app.add_subcommand("renorm", "find the resistance scaling factor");
  add_fractal_opts(renorm);
  renorm->add_option("--tol", tol, "fixed point tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (solve->parsed())
    return run_solve(fractal, config, level, degree, delta, out_path, csv_path, svg_path,
                     tol, force_general, basis_level);
  if (verify->parsed()) return run_verify(in_path, tol);
  if (render->parsed()) return run_render(in_path, out_path, size, !no_legend);
  if (basis->parsed()) return run_basis(fractal, config, level);
  if (renorm->parsed()) return run_renorm(fractal, config, tol);
  return kExitConfig;
}

#pragma once

#include <string>
#include <vector>

#include "core/harmonic.hpp"

namespace fhm {

/// A fractal plus the harmonic structure to run it with, built from a catalog
/// name or from a custom-IFS config document.
struct FractalSetup {
  Fractal fractal;
  HarmonicStructure structure;
  std::string config_json;  // canonical embedded form; empty for catalog entries
};

FractalSetup setup_from_name(const std::string& catalog_name);
FractalSetup setup_from_config(const std::string& config_text);

/// One serialized vertex row. Cut vertices appear twice: the canonical
/// (minus-sheet) row, then a plus row keyed by the plus-sheet itinerary.
struct ResultRow {
  std::string id;
  double x = 0, y = 0;
  double lift = 0;
  double circle = 0;
  std::string lift_exact;  // "p/q" when the solve was exact, else empty
};

struct ResultDocument {
  std::string fractal;
  std::string config_json;  // non-empty for custom fractals
  int level = 0;
  std::vector<long> degree;
  std::vector<std::string> deltas;  // rational strings
  bool exact = false;
  int basis_level = -1;  // -1: gasket recursion route
  double energy = 0;
  double max_residual = 0;
  std::vector<CutPoint> cuts;
  std::vector<ResultRow> rows;
};

/// Writes the deterministic result JSON: fixed field order, floats with 17
/// significant digits, rationals as "p/q" strings.
std::string serialize_result(const HarmonicMapResult& r, const Fractal& f,
                             const std::string& config_json = "");

ResultDocument parse_result(const std::string& json_text);

/// id,x,y,lift,circle rows in document order.
std::string result_to_csv(const ResultDocument& doc);

struct SvgOptions {
  double size = 640;  // canvas edge in px
  bool legend = true;
};

/// Hue-coded vertex plot: marker hue angle = circle value * 360 degrees.
/// Byte-deterministic for fixed (document, options).
std::string render_svg(const ResultDocument& doc, const SvgOptions& opt = {});

struct VerifyReport {
  double residual = 0;      // recomputed glued-Laplacian residual (max)
  double energy = 0;        // recomputed graph energy
  double energy_delta = 0;  // |recomputed - stored|
  std::vector<long> recovered;
  bool residual_ok = false;
  bool energy_ok = false;
  bool degree_ok = false;
  std::vector<std::string> lines;  // one pass/fail line per check

  bool ok() const { return residual_ok && energy_ok && degree_ok; }
};

/// Rebuilds the graph, cut system and recovery cycles from the document
/// header, then re-checks harmonicity, the stored energy, and the degree
/// vector from the raw values alone.
VerifyReport verify_result(const ResultDocument& doc, double tol = 1e-9);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fhm

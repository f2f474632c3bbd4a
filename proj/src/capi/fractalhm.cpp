#include "fractalhm/fractalhm.h"

#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "core/covering.hpp"
#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/graph.hpp"
#include "core/harmonic.hpp"
#include "core/io.hpp"

using namespace fhm;

struct fhm_fractal {
  FractalSetup setup;
};

struct fhm_result {
  Fractal fractal;
  HarmonicMapResult res;
  std::string config_json;
  std::string json;         // canonical serialized form
  ResultDocument doc;       // parsed back for csv/svg
};

namespace {

thread_local std::string g_last_error;

fhm_status status_of(Errc c) {
  switch (c) {
    case Errc::bad_argument: return FHM_ERR_BAD_ARGUMENT;
    case Errc::parse_error: return FHM_ERR_PARSE;
    case Errc::io_error: return FHM_ERR_IO;
    case Errc::non_contractive: return FHM_ERR_NON_CONTRACTIVE;
    case Errc::disconnected: return FHM_ERR_DISCONNECTED;
    case Errc::not_pcf: return FHM_ERR_NOT_FINITELY_RAMIFIED;
    case Errc::bad_letter: return FHM_ERR_BAD_LETTER;
    case Errc::level_too_small: return FHM_ERR_LEVEL_TOO_SMALL;
    case Errc::level_too_large: return FHM_ERR_LEVEL_TOO_LARGE;
    case Errc::unsupported_fractal: return FHM_ERR_UNSUPPORTED_FRACTAL;
    case Errc::ambiguous_path: return FHM_ERR_AMBIGUOUS_PATH;
    case Errc::no_admissible_cut: return FHM_ERR_NO_ADMISSIBLE_CUT;
    case Errc::cut_not_in_graph: return FHM_ERR_CUT_NOT_IN_GRAPH;
    case Errc::cut_on_boundary: return FHM_ERR_CUT_ON_BOUNDARY;
    case Errc::increment_too_large: return FHM_ERR_INCREMENT_TOO_LARGE;
    case Errc::singular_system: return FHM_ERR_SINGULAR_SYSTEM;
    case Errc::singular_interior: return FHM_ERR_SINGULAR_INTERIOR;
    case Errc::no_fixed_point: return FHM_ERR_NO_FIXED_POINT;
    case Errc::missing_value: return FHM_ERR_MISSING_VALUE;
    case Errc::missing_coordinates: return FHM_ERR_MISSING_COORDINATES;
    case Errc::degree_mismatch: return FHM_ERR_DEGREE_MISMATCH;
    case Errc::residual_too_large: return FHM_ERR_RESIDUAL_TOO_LARGE;
    case Errc::internal: return FHM_ERR_INTERNAL;
  }
  return FHM_ERR_INTERNAL;
}

fhm_status record(const Error& e) {
  g_last_error = e.what();
  return status_of(e.code());
}

fhm_status record_msg(fhm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Every entry point funnels through here so exceptions never cross the ABI.
template <typename Fn>
fhm_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return record(e);
  } catch (const std::bad_alloc&) {
    return record_msg(FHM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record_msg(FHM_ERR_INTERNAL, e.what());
  } catch (...) {
    return record_msg(FHM_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fhm_version(void) { return "1.0.0"; }

const char* fhm_last_error(void) { return g_last_error.c_str(); }

void fhm_string_free(char* s) { ::operator delete(static_cast<void*>(s)); }

fhm_status fhm_fractal_from_name(const char* name, fhm_fractal** out) {
  if (!name || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    auto* h = new fhm_fractal{setup_from_name(name)};
    *out = h;
    return FHM_OK;
  });
}

fhm_status fhm_fractal_from_config(const char* json_text, fhm_fractal** out) {
  if (!json_text || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    auto* h = new fhm_fractal{setup_from_config(json_text)};
    *out = h;
    return FHM_OK;
  });
}

void fhm_fractal_free(fhm_fractal* f) { delete f; }

int fhm_fractal_map_count(const fhm_fractal* f) {
  return f ? f->setup.fractal.letter_count() : 0;
}

int fhm_fractal_boundary_count(const fhm_fractal* f) {
  return f ? static_cast<int>(f->setup.fractal.boundary().size()) : 0;
}

fhm_status fhm_solve(const fhm_fractal* f, const long* degree, size_t degree_len,
                     const char* const* deltas, size_t delta_len, int level,
                     const fhm_solve_options* opt, fhm_result** out) {
  if (!f || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  if (!degree && degree_len > 0)
    return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL degree with nonzero length");
  if (!deltas && delta_len > 0)
    return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL deltas with nonzero length");
  return guarded([&] {
    DegreeVector deg;
    deg.entries.assign(degree, degree + degree_len);
    if (deg.entries.empty()) deg.entries.push_back(0);

    const size_t steps = f->setup.fractal.boundary().size() - 1;
    BoundaryData bc;
    bc.rho0 = deg.at(0);
    if (delta_len == 0) {
      bc.deltas.assign(steps, Rat(0));
    } else {
      for (size_t i = 0; i < delta_len; ++i) {
        if (!deltas[i]) fail(Errc::bad_argument, "NULL delta string");
        auto q = parse_rational(deltas[i]);
        if (!q) fail(Errc::parse_error, std::string("bad rational '") + deltas[i] + "'");
        bc.deltas.push_back(*q);
      }
    }

    SolveOptions so;
    if (opt) {
      so.force_pcf = opt->force_general != 0;
      so.basis_level = opt->basis_level;
    }

    auto* h = new fhm_result{f->setup.fractal, {}, f->setup.config_json, {}, {}};
    try {
      h->res = solve_harmonic_map(h->fractal, f->setup.structure, deg, bc, level, so);
      h->json = serialize_result(h->res, h->fractal, h->config_json);
      h->doc = parse_result(h->json);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
    return FHM_OK;
  });
}

void fhm_result_free(fhm_result* r) { delete r; }

double fhm_result_energy(const fhm_result* r) {
  return r ? r->res.energy : std::nan("");
}

double fhm_result_max_residual(const fhm_result* r) {
  return r ? r->res.max_residual : std::nan("");
}

int fhm_result_level(const fhm_result* r) { return r ? r->res.level : -1; }

int fhm_result_basis_level(const fhm_result* r) { return r ? r->res.basis_level : -1; }

int fhm_result_exact(const fhm_result* r) { return r && r->res.exact ? 1 : 0; }

size_t fhm_result_vertex_count(const fhm_result* r) { return r ? r->res.lift.size() : 0; }

size_t fhm_result_cut_count(const fhm_result* r) { return r ? r->res.cuts.size() : 0; }

size_t fhm_result_degree(const fhm_result* r, long* out, size_t cap) {
  if (!r) return 0;
  const auto& e = r->res.degree.entries;
  if (out)
    for (size_t i = 0; i < e.size() && i < cap; ++i) out[i] = e[i];
  return e.size();
}

fhm_status fhm_result_recovered_degree(const fhm_result* r, long* out, size_t cap,
                                       size_t* len) {
  if (!r || !len) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    DegreeVector got = degree_vector(r->res.lift, r->res.cycles);
    *len = got.entries.size();
    if (out)
      for (size_t i = 0; i < got.entries.size() && i < cap; ++i) out[i] = got.entries[i];
    return FHM_OK;
  });
}

fhm_status fhm_result_to_json(const fhm_result* r, char** out) {
  if (!r || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = dup_string(r->json);
    return FHM_OK;
  });
}

fhm_status fhm_result_to_csv(const fhm_result* r, char** out) {
  if (!r || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = dup_string(result_to_csv(r->doc));
    return FHM_OK;
  });
}

fhm_status fhm_result_to_svg(const fhm_result* r, int size, int legend, char** out) {
  if (!r || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    SvgOptions so;
    if (size > 0) so.size = size;
    so.legend = legend != 0;
    *out = dup_string(render_svg(r->doc, so));
    return FHM_OK;
  });
}

fhm_status fhm_verify_json(const char* json_text, double tol, int* ok, char** report) {
  if (!json_text || !ok) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    ResultDocument doc = parse_result(json_text);
    VerifyReport rep = verify_result(doc, tol > 0 ? tol : 1e-9);
    *ok = rep.ok() ? 1 : 0;
    if (report) {
      std::string text;
      for (const auto& line : rep.lines) {
        text += line;
        text += '\n';
      }
      *report = dup_string(text);
    }
    return FHM_OK;
  });
}

fhm_status fhm_render_json(const char* json_text, int size, int legend, char** out) {
  if (!json_text || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    ResultDocument doc = parse_result(json_text);
    SvgOptions so;
    if (size > 0) so.size = size;
    so.legend = legend != 0;
    *out = dup_string(render_svg(doc, so));
    return FHM_OK;
  });
}

fhm_status fhm_basis_report(const fhm_fractal* f, int level, char** out) {
  if (!f || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    const Fractal& fr = f->setup.fractal;
    const int lc = fr.letter_count();
    ApproxGraph g = build_graph(fr, f->setup.structure, level);
    int dim = cycle_space_dim(g);

    std::ostringstream os;
    os << fr.name() << " level " << level << ": " << g.vertices.size() << " vertices, "
       << g.edges.size() << " edges, cycle space dimension " << dim << "\n";

    CycleBasis basis = spanning_tree_basis(g);
    for (size_t i = 0; i < basis.cycles.size(); ++i) {
      os << "  cycle " << i << " (length " << basis.cycles[i].verts.size() << "):";
      for (const VertexId& v : basis.cycles[i].verts) os << ' ' << to_string(v.canon, lc);
      os << "\n";
    }

    ApproxGraph fine = build_graph(fr, f->setup.structure, level + 1);
    DegreeVector deg;
    deg.entries.assign(std::max(dim, 1), 0);
    PcfCuts cuts = pcf_cut_points(fr, g, fine, basis, deg);
    os << "  cut points:";
    for (const CutPoint& c : cuts.cuts) os << ' ' << to_string(c.vertex.canon, lc);
    os << "\n";
    *out = dup_string(os.str());
    return FHM_OK;
  });
}

fhm_status fhm_renormalization_factor(const fhm_fractal* f, double tol, double* out) {
  if (!f || !out) return record_msg(FHM_ERR_BAD_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = find_renormalization_factor(f->setup.fractal, f->setup.structure.base_form,
                                       tol > 0 ? tol : 1e-12);
    return FHM_OK;
  });
}

}  // extern "C"

#ifndef FRACTALHM_H
#define FRACTALHM_H

/* C interface to the fractal harmonic-map solver.
 *
 * All functions that can fail return an fhm_status; FHM_OK means success and
 * anything else leaves the outputs untouched. A human-readable message for the
 * most recent failure on the calling thread is available from fhm_last_error().
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with fhm_string_free().
 */

#include <stddef.h>

#if defined(_WIN32)
#define FHM_API __declspec(dllexport)
#elif defined(__GNUC__) || defined(__clang__)
#define FHM_API __attribute__((visibility("default")))
#else
#define FHM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fhm_status {
  FHM_OK = 0,
  FHM_ERR_BAD_ARGUMENT = 1,
  FHM_ERR_PARSE = 2,
  FHM_ERR_IO = 3,
  FHM_ERR_NON_CONTRACTIVE = 4,
  FHM_ERR_DISCONNECTED = 5,
  FHM_ERR_NOT_FINITELY_RAMIFIED = 6,
  FHM_ERR_BAD_LETTER = 7,
  FHM_ERR_LEVEL_TOO_SMALL = 8,
  FHM_ERR_LEVEL_TOO_LARGE = 9,
  FHM_ERR_UNSUPPORTED_FRACTAL = 10,
  FHM_ERR_AMBIGUOUS_PATH = 11,
  FHM_ERR_NO_ADMISSIBLE_CUT = 12,
  FHM_ERR_CUT_NOT_IN_GRAPH = 13,
  FHM_ERR_CUT_ON_BOUNDARY = 14,
  FHM_ERR_INCREMENT_TOO_LARGE = 15,
  FHM_ERR_SINGULAR_SYSTEM = 16,
  FHM_ERR_SINGULAR_INTERIOR = 17,
  FHM_ERR_NO_FIXED_POINT = 18,
  FHM_ERR_MISSING_VALUE = 19,
  FHM_ERR_MISSING_COORDINATES = 20,
  FHM_ERR_DEGREE_MISMATCH = 21,
  FHM_ERR_RESIDUAL_TOO_LARGE = 22,
  FHM_ERR_INTERNAL = 23
} fhm_status;

/* A self-similar fractal together with its harmonic structure. */
typedef struct fhm_fractal fhm_fractal;

/* A solved circle-valued harmonic map. */
typedef struct fhm_result fhm_result;

/* Library version, a static string such as "1.0.0". */
FHM_API const char* fhm_version(void);

/* Message for the last failure on this thread ("" if none). The pointer stays
 * valid until the next failing call on the same thread. */
FHM_API const char* fhm_last_error(void);

/* Releases a string returned through a char** out-parameter. NULL is ok. */
FHM_API void fhm_string_free(char* s);

/* Builds a catalog fractal by name ("sg", "sg3", "hexagasket", "pentagasket")
 * with its standard harmonic structure. */
FHM_API fhm_status fhm_fractal_from_name(const char* name, fhm_fractal** out);

/* Builds a fractal from a JSON config document: either {"catalog": "name"}
 * with an optional "structure" override, or a full custom IFS with "maps",
 * boundary data and a "structure" block. */
FHM_API fhm_status fhm_fractal_from_config(const char* json_text, fhm_fractal** out);

FHM_API void fhm_fractal_free(fhm_fractal* f);

/* Number of contraction maps / boundary vertices; 0 if f is NULL. */
FHM_API int fhm_fractal_map_count(const fhm_fractal* f);
FHM_API int fhm_fractal_boundary_count(const fhm_fractal* f);

typedef struct fhm_solve_options {
  /* Nonzero forces the general cut-graph route even when a specialized
   * solver exists for this fractal. */
  int force_general;
  /* Cycle-basis level for the general route, or -1 to choose the smallest
   * level whose cycle space holds the requested degree vector. */
  int basis_level;
} fhm_solve_options;

/* Solves for the energy-minimizing circle-valued harmonic map.
 *
 *   degree    winding numbers around the fundamental cycles, outermost first;
 *             entry 0 doubles as the boundary winding.
 *   deltas    boundary increments as decimal or "p/q" strings, one per
 *             boundary edge walked (boundary_count - 1 entries); NULL means
 *             all zero.
 *   level     approximation depth of the graph the map lives on.
 */
FHM_API fhm_status fhm_solve(const fhm_fractal* f, const long* degree, size_t degree_len,
                     const char* const* deltas, size_t delta_len, int level,
                     const fhm_solve_options* opt, fhm_result** out);

FHM_API void fhm_result_free(fhm_result* r);

/* Scalar accessors. NaN / -1 / 0 on a NULL handle. */
FHM_API double fhm_result_energy(const fhm_result* r);
FHM_API double fhm_result_max_residual(const fhm_result* r);
FHM_API int fhm_result_level(const fhm_result* r);
FHM_API int fhm_result_basis_level(const fhm_result* r); /* -1 on the specialized route */
FHM_API int fhm_result_exact(const fhm_result* r);       /* 1 if lifts are exact rationals */
FHM_API size_t fhm_result_vertex_count(const fhm_result* r);
FHM_API size_t fhm_result_cut_count(const fhm_result* r);

/* Copies the prescribed degree vector into out (up to cap entries) and
 * returns the full length. */
FHM_API size_t fhm_result_degree(const fhm_result* r, long* out, size_t cap);

/* Recomputes the degree vector from the solved values by winding numbers.
 * Fails with FHM_ERR_INCREMENT_TOO_LARGE when the level is too coarse for
 * the windings to be read off reliably. */
FHM_API fhm_status fhm_result_recovered_degree(const fhm_result* r, long* out, size_t cap,
                                       size_t* len);

/* Serializations. The JSON form is self-contained and deterministic; csv has
 * one row per vertex; svg renders vertices colored by circle value. */
FHM_API fhm_status fhm_result_to_json(const fhm_result* r, char** out);
FHM_API fhm_status fhm_result_to_csv(const fhm_result* r, char** out);
FHM_API fhm_status fhm_result_to_svg(const fhm_result* r, int size, int legend, char** out);

/* Re-checks a serialized result from its raw vertex values: harmonicity at
 * every free vertex, the stored energy, and the degree vector. *ok is set to
 * 1/0, *report to a printable pass/fail summary. */
FHM_API fhm_status fhm_verify_json(const char* json_text, double tol, int* ok, char** report);

/* Renders a serialized result to SVG without constructing a result handle. */
FHM_API fhm_status fhm_render_json(const char* json_text, int size, int legend, char** out);

/* Reports the cycle structure of the level graph: cycle-space dimension, the
 * spanning-tree basis, and the admissible cut points. */
FHM_API fhm_status fhm_basis_report(const fhm_fractal* f, int level, char** out);

/* Finds the resistance scaling factor r for which the harmonic structure
 * reproduces itself under one refinement step, by iterating the
 * renormalization map. */
FHM_API fhm_status fhm_renormalization_factor(const fhm_fractal* f, double tol, double* out);

#ifdef __cplusplus
}
#endif

#endif /* FRACTALHM_H */

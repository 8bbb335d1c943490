#ifndef FLATSURF_CAPI_H
#define FLATSURF_CAPI_H

/* C interface to the flat surface toolkit.  Handles are opaque; every
 * function returns FS_OK or an error code, with a human-readable message
 * available from fs_last_error().  Strings returned through out-parameters
 * are owned by the caller and released with fs_string_free(). */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fs_surface fs_surface;
typedef struct fs_cover fs_cover;

typedef enum fs_status {
    FS_OK = 0,
    FS_ERR_SYNTAX = 1,
    FS_ERR_UNKNOWN_EDGE = 2,
    FS_ERR_DUPLICATE_GLUING = 3,
    FS_ERR_BAD_PARAMS = 4,
    FS_ERR_INVALID_SURFACE = 5,
    FS_ERR_ANGLE = 6,
    FS_ERR_SINGULAR_MATRIX = 7,
    FS_ERR_DEGENERATE_POLYGON = 8,
    FS_ERR_FLIP_LIMIT = 9,
    FS_ERR_SEARCH_BUDGET = 10,
    FS_ERR_NO_CONE_POINTS = 11,
    FS_ERR_RESOLUTION = 12,
    FS_ERR_ITERATION_LIMIT = 13,
    FS_ERR_POINT_OFF_SURFACE = 14,
    FS_ERR_BRANCHED_COVER = 15,
    FS_ERR_NOT_CLOSED = 16,
    FS_ERR_NOT_SIMPLE = 17,
    FS_ERR_START_AT_CONE = 18,
    FS_ERR_CYLINDER_DETECTED = 19,
    FS_ERR_BUDGET = 20,
    FS_ERR_INTERNAL = 21
} fs_status;

const char* fs_status_name(fs_status status);
/* message of the most recent error on this thread */
const char* fs_last_error(void);
void fs_string_free(char* s);
void fs_surface_free(fs_surface* s);
void fs_cover_free(fs_cover* c);

/* ---- surfaces ---------------------------------------------------------- */

fs_status fs_surface_parse(const char* text, fs_surface** out);
/* names: torus (slope), pillowcase (), lshape (A, B), regular-2ngon (N),
 * torus-cover (K) */
fs_status fs_surface_generate(const char* name, const double* params, int n_params,
                              fs_surface** out);
fs_status fs_surface_serialize(const fs_surface* s, char** out_text);
/* report lists one violation per line; n_violations = 0 means valid */
fs_status fs_surface_validate(const fs_surface* s, char** out_report, int* n_violations);
fs_status fs_surface_info(const fs_surface* s, char** out_text);
fs_status fs_surface_apply_matrix(const fs_surface* s, double a, double b, double c, double d,
                                  fs_surface** out);
fs_status fs_surface_flow(const fs_surface* s, double t, int normalize, fs_surface** out,
                          int* out_flips);

/* ---- covers ------------------------------------------------------------ */

fs_status fs_cover_build(const fs_surface* base, fs_cover** out);
fs_status fs_cover_total(const fs_cover* c, fs_surface** out);
fs_status fs_cover_info(const fs_cover* c, char** out_text);

/* ---- geometry and dynamics reports ------------------------------------- */

fs_status fs_systole(const fs_surface* s, int depth, int marked_as_singular, double* out_value,
                     char** out_report);
/* CSV schema: t,kappa,delta_sc,d_t,integrand,integral plus a trailing
 * "# verdict: ..." comment line */
fs_status fs_criterion_csv(const fs_surface* s, double tmax, double dt, int depth,
                           char** out_csv);
/* CSV schema: t,C,sumD,delta,integrand,integral,cond1,cond2 */
fs_status fs_thm3_csv(const fs_surface* s, double eta, double eps0, double res, double tmax,
                      double dt, char** out_csv);
/* CSV schema: N,D_N; the summary line reports the termination cause */
fs_status fs_trace_csv(const fs_surface* s, const char* polygon, double x, double y, double len,
                       int grid, char** out_csv, char** out_summary);
fs_status fs_return_map_text(const fs_surface* s, const char* polygon, double x, double y,
                             double height, char** out_text);
/* CSV schema: start_id,box_id,N,avg plus "# verdict: ..." */
fs_status fs_panel_csv(const fs_surface* s, int starts, uint64_t seed, double len, int grid,
                       char** out_csv);
fs_status fs_cover_check_text(const fs_surface* s, int samples, uint64_t seed, char** out_text);

#ifdef __cplusplus
}
#endif

#endif

#ifndef UMBILIC_H
#define UMBILIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum UmbilicStatus {
  UMBILIC_STATUS_OK = 0,
  UMBILIC_STATUS_NULL_POINTER = 1,
  UMBILIC_STATUS_INVALID_ARGUMENT = 2,
  UMBILIC_STATUS_IO = 3,
  UMBILIC_STATUS_PARSE = 4,
  UMBILIC_STATUS_INVALID_MESH = 5,
  UMBILIC_STATUS_GEOMETRY = 6,
  UMBILIC_STATUS_SPECTRAL = 7,
  UMBILIC_STATUS_PINCHING = 8,
  UMBILIC_STATUS_PANIC = 99,
} UmbilicStatus;

/**
 * Opaque triangle mesh.
 */
typedef struct UmbilicMesh UmbilicMesh;

/**
 * Opaque verification report.
 */
typedef struct UmbilicReport UmbilicReport;

typedef struct UmbilicValidation {
  bool closed;
  bool oriented;
  bool connected;
  bool non_degenerate;
  double min_face_area;
} UmbilicValidation;

typedef struct UmbilicMeasures {
  double area;
  double barycenter[3];
  double enclosed_volume;
} UmbilicMeasures;

typedef struct UmbilicSpectrum {
  double lambda1;
  double residual;
  uint32_t iterations;
  bool near_degenerate;
} UmbilicSpectrum;

/**
 * Analytic constants of a verification run. A non-positive `c_override`
 * selects the convexity threshold.
 */
typedef struct UmbilicConstants {
  double alpha;
  double epsilon;
  uint32_t n;
  double p_roth;
  double l_const;
  double c_n;
  double c_np_aubry;
  double c_override;
} UmbilicConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *umbilic_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *umbilic_version(void);

/**
 * Loads an OFF or OBJ file, chosen by extension.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_load(const char *path, struct UmbilicMesh **out);

/**
 * Builds a mesh from `vertex_count` xyz triples and `face_count` index triples.
 *
 * # Safety
 * `xyz` must hold `3·vertex_count` doubles and `triangles` `3·face_count`
 * indices; `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_from_buffers(const double *xyz,
                                             size_t vertex_count,
                                             const uint32_t *triangles,
                                             size_t face_count,
                                             struct UmbilicMesh **out);

/**
 * Subdivided icosphere of the given radius.
 *
 * # Safety
 * `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_sphere(double radius,
                                       uint32_t subdivision,
                                       struct UmbilicMesh **out);

/**
 * Ellipsoid with semi-axes a, b, c.
 *
 * # Safety
 * `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_ellipsoid(double a,
                                          double b,
                                          double c,
                                          uint32_t subdivision,
                                          struct UmbilicMesh **out);

/**
 * Radial graph radius + delta·Y_{degree,order} over the unit sphere.
 *
 * # Safety
 * `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_perturbed_sphere(double radius,
                                                 double delta,
                                                 uint32_t degree,
                                                 int32_t order,
                                                 uint32_t subdivision,
                                                 struct UmbilicMesh **out);

/**
 * # Safety
 * `mesh` must come from this library and not be used afterwards.
 */
void umbilic_mesh_free(struct UmbilicMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle or null (yields 0).
 */
size_t umbilic_mesh_vertex_count(const struct UmbilicMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle or null (yields 0).
 */
size_t umbilic_mesh_face_count(const struct UmbilicMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle; `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_validate(const struct UmbilicMesh *mesh,
                                         struct UmbilicValidation *out);

/**
 * # Safety
 * `mesh` must be a live handle; `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_measures(const struct UmbilicMesh *mesh,
                                         struct UmbilicMeasures *out);

/**
 * First nonzero Laplace–Beltrami eigenvalue.
 *
 * # Safety
 * `mesh` must be a live handle; `out` must be writable.
 */
enum UmbilicStatus umbilic_mesh_lambda1(const struct UmbilicMesh *mesh,
                                        double tol,
                                        uint32_t max_iter,
                                        struct UmbilicSpectrum *out);

/**
 * Default constants: n = 2, p_roth = 3, L = c_n = C(n,p) = 1, threshold c.
 */
struct UmbilicConstants umbilic_constants_default(double alpha, double epsilon);

/**
 * Full verification with estimated curvature.
 *
 * # Safety
 * `mesh` must be a live handle, `constants` readable, `out` writable.
 */
enum UmbilicStatus umbilic_verify(const struct UmbilicMesh *mesh,
                                  const struct UmbilicConstants *constants,
                                  uint32_t ring_depth,
                                  double tol,
                                  uint32_t max_iter,
                                  struct UmbilicReport **out);

/**
 * 1 holds, 0 fails, −1 not evaluated or null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
int32_t umbilic_report_hypothesis_holds(const struct UmbilicReport *report);

/**
 * 1 contained, 0 not, −1 not evaluated or null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
int32_t umbilic_report_contained(const struct UmbilicReport *report);

/**
 * λ₁ at the input scale, NaN when not evaluated.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double umbilic_report_lambda1(const struct UmbilicReport *report);

/**
 * max − min of the vertex distance to the barycenter, NaN for null.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double umbilic_report_oscillation(const struct UmbilicReport *report);

/**
 * The report as a JSON document; release it with [`umbilic_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum UmbilicStatus umbilic_report_json(const struct UmbilicReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void umbilic_report_free(struct UmbilicReport *report);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void umbilic_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UMBILIC_H */

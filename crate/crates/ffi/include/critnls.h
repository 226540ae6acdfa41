#ifndef CRITNLS_H
#define CRITNLS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible call.
 */
typedef enum CritnlsStatus {
  CRITNLS_STATUS_OK = 0,
  CRITNLS_STATUS_NULL_POINTER = 1,
  CRITNLS_STATUS_INVALID_ARGUMENT = 2,
  CRITNLS_STATUS_NO_CONVERGENCE = 3,
  CRITNLS_STATUS_NUMERICAL = 4,
  CRITNLS_STATUS_BUFFER_TOO_SMALL = 5,
  CRITNLS_STATUS_PANIC = 6,
} CritnlsStatus;

/*
 Sampling grid with its cached profiles.
 */
typedef struct CritnlsGrid CritnlsGrid;

/*
 A constructed solitary wave.
 */
typedef struct CritnlsWave CritnlsWave;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *critnls_version(void);

/*
 Copies the last error of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length without the NUL.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t critnls_last_error(char *buf, size_t len);

/*
 Builds a sinh-stretched grid `r = scale·sinh(s)`; `scale ≤ 0` selects
 the default.

 # Safety
 `out` must be valid for one pointer write.
 */
enum CritnlsStatus critnls_grid_new(size_t n, double r_max, double scale, struct CritnlsGrid **out);

/*
 # Safety
 `grid` must come from [`critnls_grid_new`] and not be used afterwards.
 */
void critnls_grid_free(struct CritnlsGrid *grid);

/*
 Number of nodes, or 0 for a null handle.

 # Safety
 `grid` must be null or a live handle.
 */
size_t critnls_grid_len(const struct CritnlsGrid *grid);

/*
 Copies the node radii into `out[0..len]`.

 # Safety
 `grid` must be a live handle; `out` valid for `len` doubles.
 */
enum CritnlsStatus critnls_grid_nodes(const struct CritnlsGrid *grid, double *out, size_t len);

/*
 Constructs `Q_ε` for `f(u) = sign·|u|^{p−1}u` on `grid`.

 # Safety
 `grid` must be a live handle; `out` valid for one pointer write.
 */
enum CritnlsStatus critnls_wave_construct(const struct CritnlsGrid *grid,
                                          double p,
                                          double sign,
                                          double eps,
                                          struct CritnlsWave **out);

/*
 # Safety
 `wave` must come from [`critnls_wave_construct`] and not be used afterwards.
 */
void critnls_wave_free(struct CritnlsWave *wave);

/*
 Writes `λ`, `ω = λ²` and whether the wave came from the scaling family.

 # Safety
 `wave` must be a live handle; each output may be null.
 */
enum CritnlsStatus critnls_wave_scalars(const struct CritnlsWave *wave,
                                        double *lambda,
                                        double *omega,
                                        bool *scaled);

/*
 Copies `Q` at the grid nodes into `out[0..len]`.

 # Safety
 `wave` must be a live handle; `out` valid for `len` doubles.
 */
enum CritnlsStatus critnls_wave_profile(const struct CritnlsWave *wave, double *out, size_t len);

/*
 Action `𝒮_{ε,ω}(Q)` and the Pohozaev residuals of the wave.

 # Safety
 `wave` must be a live handle; each output may be null.
 */
enum CritnlsStatus critnls_wave_action(const struct CritnlsWave *wave,
                                       double *action,
                                       double *pohozaev_k,
                                       double *pohozaev_k0);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITNLS_H */

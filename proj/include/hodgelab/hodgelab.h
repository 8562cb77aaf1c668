#ifndef HODGELAB_H
#define HODGELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(HODGELAB_BUILDING_LIBRARY)
#define HODGELAB_API __attribute__((visibility("default")))
#else
#define HODGELAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes: 0 is success, positive values follow the library error
   categories (see hodgelab_status_name), HODGELAB_INTERNAL for anything else. */
#define HODGELAB_OK 0
#define HODGELAB_INVALID_ARGUMENT 100
#define HODGELAB_INTERNAL 101

typedef struct hodgelab_scene hodgelab_scene;

typedef struct hodgelab_run_options {
    const char* command;  /* cohomology, spectrum, weyl, modes, splice, scan, gap, all */
    const char* scene;    /* scene file, or a directory of scenes for "all" */
    const char* out_dir;  /* NULL means "out" */
    int has_seed;
    uint64_t seed;
    int has_tol;
    double tol;
    const char* r_grid;   /* "a:b:step" or NULL */
    int has_epsilon;
    double epsilon;
    int has_h;
    double h;
} hodgelab_run_options;

HODGELAB_API const char* hodgelab_version(void);
HODGELAB_API const char* hodgelab_status_name(int status);
/* Message of the last failed call on this thread. */
HODGELAB_API const char* hodgelab_last_error(void);

HODGELAB_API int hodgelab_scene_load(const char* path, hodgelab_scene** out);
HODGELAB_API int hodgelab_scene_parse(const char* json_text, hodgelab_scene** out);
HODGELAB_API void hodgelab_scene_free(hodgelab_scene* scene);

/* Copies the hex hash including the terminating zero; needs len >= 17. */
HODGELAB_API int hodgelab_scene_hash(const hodgelab_scene* scene, char* buf, size_t len);
HODGELAB_API int hodgelab_scene_counts(const hodgelab_scene* scene, size_t* vertices, size_t* edges);

/* Predicted Betti numbers from the exact backend. *count receives the number
   of grades; at most cap values are written. */
HODGELAB_API int hodgelab_predicted_betti(const hodgelab_scene* scene, size_t* betti, size_t cap, size_t* count);

/* Kernel dimension of the Hodge Laplacian of X(r). */
HODGELAB_API int hodgelab_kernel_dimension(const hodgelab_scene* scene, double r, size_t* dim);

/* Cell counts of X(r). */
HODGELAB_API int hodgelab_complex_size(const hodgelab_scene* scene, double r, size_t* n0, size_t* n1, size_t* n2);

/* Runs one command; *exit_code is 0, or 1 when "all" sees a failing criterion. */
HODGELAB_API int hodgelab_run(const hodgelab_run_options* options, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif

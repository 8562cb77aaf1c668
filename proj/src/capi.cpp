#include "hodgelab/hodgelab.h"

#include <cstring>
#include <iostream>
#include <string>

#include "hodgelab/error.hpp"
#include "hodgelab/runner.hpp"
#include "hodgelab/scene.hpp"
#include "hodgelab/spectral.hpp"

struct hodgelab_scene {
    hodgelab::Scene scene;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& msg)
{
    g_last_error = msg;
    return status;
}

template <typename F>
int guarded(F&& f)
{
    try {
        g_last_error.clear();
        f();
        return HODGELAB_OK;
    } catch (const hodgelab::Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(HODGELAB_INTERNAL, e.what());
    } catch (...) {
        return fail(HODGELAB_INTERNAL, "unknown error");
    }
}

} // namespace

extern "C" {

const char* hodgelab_version(void) { return hodgelab::kToolVersion; }

const char* hodgelab_status_name(int status)
{
    if (status == HODGELAB_OK) return "Ok";
    if (status == HODGELAB_INVALID_ARGUMENT) return "InvalidArgument";
    if (status == HODGELAB_INTERNAL) return "Internal";
    if (status >= 1 && status <= static_cast<int>(hodgelab::ErrorCode::Io))
        return hodgelab::error_name(static_cast<hodgelab::ErrorCode>(status));
    return "Unknown";
}

const char* hodgelab_last_error(void) { return g_last_error.c_str(); }

int hodgelab_scene_load(const char* path, hodgelab_scene** out)
{
    if (!path || !out) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new hodgelab_scene{hodgelab::load_scene(path)}; });
}

int hodgelab_scene_parse(const char* json_text, hodgelab_scene** out)
{
    if (!json_text || !out) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new hodgelab_scene{hodgelab::parse_scene(json_text)}; });
}

void hodgelab_scene_free(hodgelab_scene* scene) { delete scene; }

int hodgelab_scene_hash(const hodgelab_scene* scene, char* buf, size_t len)
{
    if (!scene || !buf) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    if (len < scene->scene.hash.size() + 1) return fail(HODGELAB_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, scene->scene.hash.c_str(), scene->scene.hash.size() + 1);
    return HODGELAB_OK;
}

int hodgelab_scene_counts(const hodgelab_scene* scene, size_t* vertices, size_t* edges)
{
    if (!scene || !vertices || !edges) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    *vertices = scene->scene.geo.graph.vertices().size();
    *edges = scene->scene.geo.graph.edges().size();
    return HODGELAB_OK;
}

int hodgelab_predicted_betti(const hodgelab_scene* scene, size_t* betti, size_t cap, size_t* count)
{
    if (!scene || !count || (cap > 0 && !betti)) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto b = hodgelab::predicted_betti_all(hodgelab::cohomology(hodgelab::scene_cochain(scene->scene)));
        *count = b.size();
        for (size_t i = 0; i < b.size() && i < cap; ++i) betti[i] = b[i];
    });
}

int hodgelab_kernel_dimension(const hodgelab_scene* scene, double r, size_t* dim)
{
    if (!scene || !dim) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& p = scene->scene.params;
        hodgelab::EigenOptions eo;
        eo.seed = p.seed;
        eo.tol = p.tol;
        const auto x = hodgelab::assemble(scene->scene.geo, r);
        *dim = hodgelab::kernel_dimension(hodgelab::operators(x).Delta, -1.0, p.gap_ratio, 8, eo).dim;
    });
}

int hodgelab_complex_size(const hodgelab_scene* scene, double r, size_t* n0, size_t* n1, size_t* n2)
{
    if (!scene || !n0 || !n1 || !n2) return fail(HODGELAB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto x = hodgelab::assemble(scene->scene.geo, r);
        *n0 = x.n0;
        *n1 = x.n1;
        *n2 = x.n2;
    });
}

int hodgelab_run(const hodgelab_run_options* options, int* exit_code)
{
    if (!options || !exit_code || !options->command || !options->scene)
        return fail(HODGELAB_INVALID_ARGUMENT, "command and scene are required");
    return guarded([&] {
        hodgelab::RunOptions o;
        o.command = options->command;
        o.scene = options->scene;
        if (options->out_dir) o.out = options->out_dir;
        if (options->has_seed) o.seed = options->seed;
        if (options->has_tol) o.tol = options->tol;
        if (options->r_grid) o.r_grid = hodgelab::parse_r_grid(options->r_grid);
        if (options->has_epsilon) o.epsilon = options->epsilon;
        if (options->has_h) o.h = options->h;
        *exit_code = hodgelab::run(o, std::cout);
    });
}

} // extern "C"

// hodgelab command-line front end, on top of the C interface.
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hodgelab/hodgelab.h"

int main(int argc, char** argv)
{
    CLI::App app{"Discrete Hodge theory on manifolds fibred over graphs"};
    app.set_version_flag("--version", std::string(hodgelab_version()));

    std::string command, scene, out = "out", r_grid;
    std::optional<uint64_t> seed;
    std::optional<double> tol, epsilon, h;
    app.add_option("command", command, "cohomology | spectrum | weyl | modes | splice | scan | gap | all")
        ->required()
        ->check(CLI::IsMember({"cohomology", "spectrum", "weyl", "modes", "splice", "scan", "gap", "all"}));
    app.add_option("--scene", scene, "scene file (for 'all': a scene file or the scenes directory)")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--tol", tol, "eigensolver residual tolerance");
    app.add_option("--r-grid", r_grid, "stretch grid a:b:step");
    app.add_option("--epsilon", epsilon, "exponent slack for the scan");
    app.add_option("--h", h, "mesh size");
    CLI11_PARSE(app, argc, argv);

    hodgelab_run_options o{};
    o.command = command.c_str();
    o.scene = scene.c_str();
    o.out_dir = out.c_str();
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    o.has_tol = tol.has_value();
    o.tol = tol.value_or(0.0);
    o.r_grid = app.count("--r-grid") ? r_grid.c_str() : nullptr;
    o.has_epsilon = epsilon.has_value();
    o.epsilon = epsilon.value_or(0.0);
    o.has_h = h.has_value();
    o.h = h.value_or(0.0);

    int code = 0;
    const int status = hodgelab_run(&o, &code);
    if (status != HODGELAB_OK) {
        std::fprintf(stderr, "error (%s): %s\n", hodgelab_status_name(status), hodgelab_last_error());
        return status < HODGELAB_INVALID_ARGUMENT ? 10 + status : 2;
    }
    return code;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hodgelab/cech_derham.hpp"
#include "hodgelab/complex.hpp"

namespace hodgelab {

struct SceneParams {
    double h = 0.3;
    double r = 3.0;
    std::vector<double> r_grid{2, 3, 4, 5, 6};
    std::vector<double> scan_grid{2, 3, 4, 5, 6, 7, 8};
    double r_ref = 6.0;
    double epsilon = 0.5;
    double gap_s = 1.0;
    std::uint64_t seed = 12345;
    double tol = 1e-10;       ///< eigensolver residual tolerance
    double fit_tol = 1e-6;
    double gap_ratio = 1e3;
    std::size_t weyl_n_theta = 1024;
    std::size_t weyl_modes = 200;
};

struct Scene {
    std::string name;
    Geometry geo;
    std::optional<CochainSystem> cochain; ///< explicit block; otherwise derived from the pieces
    SceneParams params;
    std::string hash; ///< FNV-1a of the canonical JSON, hex
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t x);

/// ParseError on malformed JSON, ValidationError on unresolved ids or bad numbers.
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);

/// Explicit cochain block if present, else the one predicted by the pieces.
CochainSystem scene_cochain(const Scene& s);

/// Re-applies h to the geometry after an override.
void set_h(Scene& s, double h);

} // namespace hodgelab

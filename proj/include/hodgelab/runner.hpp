#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hodgelab/scene.hpp"

namespace hodgelab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
    std::string command;
    std::string scene;       ///< scene file; for `all` a file or a directory of scenes
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::vector<double>> r_grid;
    std::optional<double> epsilon;
    std::optional<double> h;
};

/// "a:b:step" -> a, a + step, ... up to b inclusive; "" -> empty grid.
std::vector<double> parse_r_grid(const std::string& spec);

const std::vector<std::string>& run_commands();

/// Scene with command-line overrides applied.
Scene prepared_scene(const RunOptions& o);

/// Runs one command and writes its artifacts. Returns 0, or 1 when `all`
/// finds a failing criterion; module errors are thrown.
int run(const RunOptions& o, std::ostream& log);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_atomic(const std::string& path, const std::string& content);

} // namespace hodgelab

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hodgelab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs criteria 1 to 10 on sphere.json, torus.json and theta.json found in
/// scene_dir. A criterion that throws is reported as failed with the error.
std::vector<CriterionResult> run_acceptance(const std::string& scene_dir, std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r);

} // namespace hodgelab

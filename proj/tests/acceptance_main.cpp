// Acceptance criteria 1 to 10 on the shipped scenes; exit status 1 if any fails.
#include <iostream>

#include "hodgelab/acceptance.hpp"

int main(int argc, char** argv)
{
    const std::string dir = argc > 1 ? argv[1] : HODGELAB_SCENE_DIR;
    const auto results = hodgelab::run_acceptance(dir, &std::cout);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}

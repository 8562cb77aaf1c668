#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "hodgelab/hodgelab.h"

namespace {

std::string scene_path(const char* name) { return std::string(HODGELAB_SCENE_DIR) + "/" + name + ".json"; }

struct SceneHandle {
    hodgelab_scene* p = nullptr;
    ~SceneHandle() { hodgelab_scene_free(p); }
};

} // namespace

TEST_CASE("version and status names")
{
    CHECK(std::strlen(hodgelab_version()) > 0);
    CHECK(std::string(hodgelab_status_name(HODGELAB_OK)) == "Ok");
    CHECK(std::string(hodgelab_status_name(25)) == "ParseError");
    CHECK(std::string(hodgelab_status_name(HODGELAB_INTERNAL)) == "Internal");
}

TEST_CASE("load a scene and query it")
{
    SceneHandle s;
    REQUIRE(hodgelab_scene_load(scene_path("sphere").c_str(), &s.p) == HODGELAB_OK);
    char hash[17];
    CHECK(hodgelab_scene_hash(s.p, hash, sizeof hash) == HODGELAB_OK);
    CHECK(std::strlen(hash) == 16);
    char small[4];
    CHECK(hodgelab_scene_hash(s.p, small, sizeof small) == HODGELAB_INVALID_ARGUMENT);

    size_t nv = 0, ne = 0;
    CHECK(hodgelab_scene_counts(s.p, &nv, &ne) == HODGELAB_OK);
    CHECK(nv == 2);
    CHECK(ne == 1);

    size_t betti[4] = {9, 9, 9, 9}, count = 0;
    CHECK(hodgelab_predicted_betti(s.p, betti, 4, &count) == HODGELAB_OK);
    CHECK(count == 3);
    CHECK(betti[0] == 1);
    CHECK(betti[1] == 0);
    CHECK(betti[2] == 1);

    size_t n0 = 0, n1 = 0, n2 = 0;
    CHECK(hodgelab_complex_size(s.p, 3.0, &n0, &n1, &n2) == HODGELAB_OK);
    CHECK(static_cast<long>(n0) - static_cast<long>(n1) + static_cast<long>(n2) == 2);
}

TEST_CASE("torus kernel dimension through the C interface")
{
    SceneHandle s;
    REQUIRE(hodgelab_scene_load(scene_path("torus").c_str(), &s.p) == HODGELAB_OK);
    size_t dim = 0;
    CHECK(hodgelab_kernel_dimension(s.p, 3.0, &dim) == HODGELAB_OK);
    CHECK(dim == 4);
    CHECK(hodgelab_kernel_dimension(s.p, 0.5, &dim) == 23); // ROutOfRange
    CHECK(std::strlen(hodgelab_last_error()) > 0);
}

TEST_CASE("errors come back as status codes")
{
    hodgelab_scene* p = nullptr;
    CHECK(hodgelab_scene_load("/nonexistent/scene.json", &p) == 27);
    CHECK(p == nullptr);
    CHECK(std::string(hodgelab_last_error()).find("nonexistent") != std::string::npos);
    CHECK(hodgelab_scene_parse("{oops", &p) == 25);
    CHECK(hodgelab_scene_parse(nullptr, &p) == HODGELAB_INVALID_ARGUMENT);
    CHECK(hodgelab_scene_counts(nullptr, nullptr, nullptr) == HODGELAB_INVALID_ARGUMENT);
    hodgelab_scene_free(nullptr);
}

TEST_CASE("run a command")
{
    const auto out = std::filesystem::temp_directory_path() / "hodgelab_capi_run";
    std::filesystem::remove_all(out);
    const std::string scene = scene_path("sphere");
    hodgelab_run_options o{};
    o.command = "cohomology";
    o.scene = scene.c_str();
    const std::string dir = out.string();
    o.out_dir = dir.c_str();
    int code = -1;
    CHECK(hodgelab_run(&o, &code) == HODGELAB_OK);
    CHECK(code == 0);
    CHECK(std::filesystem::exists(out / "cohomology.json"));

    o.command = "nope";
    CHECK(hodgelab_run(&o, &code) == 26);
    o.command = "scan";
    o.r_grid = "bad";
    CHECK(hodgelab_run(&o, &code) == 25);
}

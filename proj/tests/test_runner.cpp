#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hodgelab/error.hpp"
#include "hodgelab/runner.hpp"

using namespace hodgelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scene_path(const std::string& name) { return std::string(HODGELAB_SCENE_DIR) + "/" + name + ".json"; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("hodgelab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json sphere_json() { return json::parse(slurp(scene_path("sphere"))); }

ErrorCode code_of(const std::string& text)
{
    try {
        parse_scene(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io; // not thrown
}

} // namespace

TEST_CASE("FNV-1a reference values")
{
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
}

TEST_CASE("r grid parsing")
{
    CHECK(parse_r_grid("2:6:1") == std::vector<double>{2, 3, 4, 5, 6});
    CHECK(parse_r_grid("2:3:0.5") == std::vector<double>{2, 2.5, 3});
    CHECK(parse_r_grid("").empty());
    CHECK_THROWS_WITH_AS(parse_r_grid("2-6"), doctest::Contains("ParseError"), Error);
    CHECK_THROWS_WITH_AS(parse_r_grid("6:2:1"), doctest::Contains("ValidationError"), Error);
    CHECK_THROWS_WITH_AS(parse_r_grid("2:6:0"), doctest::Contains("ValidationError"), Error);
}

TEST_CASE("shipped scenes parse")
{
    for (const char* name : {"sphere", "torus", "theta"}) {
        const Scene s = load_scene(scene_path(name));
        CHECK(s.name == name);
        CHECK(s.hash.size() == 16);
        CHECK(s.params.h == 0.3);
        CHECK(s.params.r == 3.0);
        for (const auto& c : s.geo.sections) CHECK(c.n_theta == 16);
    }
}

TEST_CASE("scene hash ignores layout but not content")
{
    const json j = sphere_json();
    CHECK(parse_scene(j.dump()).hash == parse_scene(j.dump(4)).hash);
    json k = j;
    k["params"]["h"] = 0.25;
    CHECK(parse_scene(k.dump()).hash != parse_scene(j.dump()).hash);
}

TEST_CASE("scene validation errors")
{
    CHECK(code_of("{not json") == ErrorCode::ParseError);
    CHECK(code_of("[1, 2]") == ErrorCode::ParseError);
    json j = sphere_json();
    j["graph"]["edges"][0]["cross_section"] = "nowhere";
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    j = sphere_json();
    j["pieces"].erase("b");
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    j = sphere_json();
    j["pieces"]["zz"] = {{"kind", "cap"}};
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    j = sphere_json();
    j["params"]["r_grid"] = {3, 2};
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    j = sphere_json();
    j["params"]["tol"] = -1.0;
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    j = sphere_json();
    j["graph"]["edges"][0]["tail"] = "q";
    CHECK(code_of(j.dump()) == ErrorCode::DanglingEndpoint);
}

TEST_CASE("explicit cochain block matches the pieces")
{
    json j = sphere_json();
    // cap: H^0 = Q, H^2 = 0 rel nothing; circle: H^0 = H^1 = Q
    j["cochain_system"] = {
        {"grades", 3},
        {"vertex_dims", {{"a", {1, 0, 0}}, {"b", {1, 0, 0}}}},
        {"edge_dims", {{"e", {1, 1, 0}}}},
        {"restrictions",
         {{{"edge", "e"}, {"side", "tail"}, {"grade", 0}, {"matrix", {{json::array({2, 2})}}}},
          {{"edge", "e"}, {"side", "head"}, {"vertex", "b"}, {"grade", 0}, {"matrix", {{1}}}}}}};
    const Scene s = parse_scene(j.dump());
    REQUIRE(s.cochain.has_value());
    const auto b = predicted_betti_all(cohomology(scene_cochain(s)));
    CHECK(b == std::vector<std::size_t>{1, 0, 1});
    CHECK(b == predicted_betti_all(cohomology(preset_system(s.geo.graph, s.geo.kinds))));

    j["cochain_system"]["restrictions"].erase(1);
    CHECK(code_of(j.dump()) == ErrorCode::GradeMissing);
}

TEST_CASE("cohomology command on the sphere")
{
    const fs::path out = scratch("cohomology");
    std::ostringstream log;
    RunOptions o{"cohomology", scene_path("sphere"), out.string()};
    CHECK(run(o, log) == 0);
    const json j = json::parse(slurp(out / "cohomology.json"));
    CHECK(j["predicted_betti"] == json({1, 0, 1}));
    CHECK(j["scene_hash"] == load_scene(scene_path("sphere")).hash);
    CHECK(j["version"] == kToolVersion);
    CHECK(j.contains("seed"));
    for (const auto& e : fs::directory_iterator(out)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("spectrum command on the torus")
{
    const fs::path out = scratch("spectrum");
    std::ostringstream log;
    RunOptions o{"spectrum", scene_path("torus"), out.string()};
    CHECK(run(o, log) == 0);
    const json j = json::parse(slurp(out / "spectrum.json"));
    CHECK(j["kernel_dim"] == 4);
    CHECK(j["kernel_dim_D"] == 4);
    CHECK(j["d1d0_nonzeros"] == 0);
    CHECK(j["betti_match"] == true);
}

TEST_CASE("scan with an empty r grid")
{
    const fs::path dir = scratch("empty_grid");
    json j = sphere_json();
    j["params"]["r_grid"] = json::array();
    j["params"].erase("scan_grid");
    const fs::path p = dir / "scene.json";
    write_atomic(p.string(), j.dump());
    std::ostringstream log;
    RunOptions o{"scan", p.string(), (dir / "out").string()};
    CHECK_THROWS_WITH_AS(run(o, log), doctest::Contains("ValidationError"), Error);
}

TEST_CASE("scan reruns are byte-identical")
{
    const fs::path a = scratch("scan_a"), b = scratch("scan_b");
    std::ostringstream log;
    RunOptions o{"scan", scene_path("sphere"), a.string()};
    o.r_grid = parse_r_grid("2:3:1");
    o.seed = 7;
    CHECK(run(o, log) == 0);
    o.out = b.string();
    CHECK(run(o, log) == 0);
    for (const char* f : {"scan.csv", "scan.json"}) CHECK(slurp(a / f) == slurp(b / f));
    const std::string csv = slurp(a / "scan.csv");
    CHECK(csv.find("seed=7") != std::string::npos);
    CHECK(csv.find("r,mu1,mu1_scaled,kernel_dim") != std::string::npos);
}

TEST_CASE("weyl command")
{
    const fs::path out = scratch("weyl");
    std::ostringstream log;
    RunOptions o{"weyl", scene_path("sphere"), out.string()};
    CHECK(run(o, log) == 0);
    const json j = json::parse(slurp(out / "weyl.json"));
    REQUIRE(j["sections"].size() == 1);
    CHECK(j["sections"][0]["exponent"].get<double>() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(j["sections"][0]["kernel_dim"] == 4);
}

TEST_CASE("modes command on the sphere")
{
    const fs::path out = scratch("modes");
    std::ostringstream log;
    RunOptions o{"modes", scene_path("sphere"), out.string()};
    CHECK(run(o, log) == 0);
    const json j = json::parse(slurp(out / "modes.json"));
    CHECK(j["matching"]["dim"] == 2);
    CHECK(j["matching"]["dim_la"] == 1);
    CHECK(j["matching"]["dim_lr"] == 1);
    for (const auto& v : j["vertices"]) {
        CHECK(v["dim_pbar"] == 2);
        CHECK(v["dim_p"] == 0);
        CHECK(v["dim_lv"] == v["half_kernel_dhat"]);
    }
    CHECK(j["reference"]["gap"].get<double>() <= 1e-4);
}

TEST_CASE("splice and gap commands write their tables")
{
    const fs::path out = scratch("splice");
    std::ostringstream log;
    RunOptions o{"splice", scene_path("sphere"), out.string()};
    o.r_grid = parse_r_grid("2:3:1");
    CHECK(run(o, log) == 0);
    CHECK(slurp(out / "splice.csv").find("r,basis_index,ratio,bound") != std::string::npos);
    o.command = "gap";
    CHECK(run(o, log) == 0);
    const json g = json::parse(slurp(out / "gap.json"));
    CHECK(g["rows"].size() == 2);
}

TEST_CASE("unknown command and overrides")
{
    std::ostringstream log;
    RunOptions o{"bogus", scene_path("sphere"), "unused"};
    CHECK_THROWS_WITH_AS(run(o, log), doctest::Contains("ValidationError"), Error);
    RunOptions p{"cohomology", scene_path("sphere"), "unused"};
    p.h = 0.2;
    p.epsilon = 0.25;
    const Scene s = prepared_scene(p);
    CHECK(s.geo.h == 0.2);
    CHECK(s.params.epsilon == 0.25);
    p.tol = -1.0;
    CHECK_THROWS_AS(prepared_scene(p), Error);
}

#include "hodgelab/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hodgelab/error.hpp"

namespace hodgelab {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

template <typename T>
T get(const json& j, const char* key, T fallback)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        invalid(std::string("field '") + key + "': " + e.what());
    }
}

Rational rational(const json& x)
{
    if (x.is_number_integer()) return Rational(x.get<long long>());
    if (x.is_array() && x.size() == 2 && x[0].is_number_integer() && x[1].is_number_integer()) {
        const long long den = x[1].get<long long>();
        if (den == 0) invalid("zero denominator in a rational entry");
        return Rational(x[0].get<long long>(), den);
    }
    invalid("matrix entries are integers or [num, den] pairs");
}

std::vector<std::size_t> dims(const json& j)
{
    std::vector<std::size_t> out;
    if (!j.is_array()) invalid("dimension lists are arrays");
    for (const auto& x : j) {
        if (!x.is_number_unsigned()) invalid("dimensions are non-negative integers");
        out.push_back(x.get<std::size_t>());
    }
    return out;
}

CochainSystem parse_cochain(const json& j, const Graph& g)
{
    CochainSystem s;
    s.graph = g;
    s.n_grades = get<std::size_t>(j, "grades", 3);
    if (s.n_grades == 0) invalid("cochain system needs at least one grade");
    const json vd = j.value("vertex_dims", json::object()), ed = j.value("edge_dims", json::object());
    s.a_dims.resize(g.vertices().size());
    s.b_dims.resize(g.edges().size());
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        if (!vd.contains(g.vertices()[v])) throw Error(ErrorCode::GradeMissing, "no dimensions for vertex '" + g.vertices()[v] + "'");
        s.a_dims[v] = dims(vd.at(g.vertices()[v]));
        if (s.a_dims[v].size() != s.n_grades) throw Error(ErrorCode::GradeMissing, "vertex '" + g.vertices()[v] + "' misses a grade");
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        if (!ed.contains(g.edges()[e].id)) throw Error(ErrorCode::GradeMissing, "no dimensions for edge '" + g.edges()[e].id + "'");
        s.b_dims[e] = dims(ed.at(g.edges()[e].id));
        if (s.b_dims[e].size() != s.n_grades) throw Error(ErrorCode::GradeMissing, "edge '" + g.edges()[e].id + "' misses a grade");
    }
    s.l.assign(g.half_edges().size(), std::vector<QMatrix>(s.n_grades));
    std::vector<std::vector<char>> seen(g.half_edges().size(), std::vector<char>(s.n_grades, 0));
    for (const auto& r : j.value("restrictions", json::array())) {
        const std::size_t e = g.edge_index(get<std::string>(r, "edge", ""));
        const std::string side = get<std::string>(r, "side", "");
        if (side != "tail" && side != "head") invalid("restriction side is 'tail' or 'head'");
        const std::size_t h = g.half_edge_index(e, side == "tail" ? +1 : -1);
        if (r.contains("vertex") && g.vertex_index(r.at("vertex").get<std::string>()) != g.half_edges()[h].vertex)
            invalid("restriction vertex does not sit at that end of edge '" + g.edges()[e].id + "'");
        const std::size_t q = get<std::size_t>(r, "grade", s.n_grades);
        if (q >= s.n_grades) throw Error(ErrorCode::DegreeOutOfRange, "restriction grade out of range");
        const std::size_t rows = s.b_dims[e][q], cols = s.a_dims[g.half_edges()[h].vertex][q];
        const json m = r.value("matrix", json::array());
        if (m.size() != rows) invalid("restriction matrix has the wrong number of rows");
        QMatrix mat(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (!m[i].is_array() || m[i].size() != cols) invalid("restriction matrix has the wrong number of columns");
            for (std::size_t k = 0; k < cols; ++k) mat(i, k) = rational(m[i][k]);
        }
        s.l[h][q] = mat;
        seen[h][q] = 1;
    }
    for (std::size_t h = 0; h < g.half_edges().size(); ++h)
        for (std::size_t q = 0; q < s.n_grades; ++q) {
            const std::size_t rows = s.b_dims[g.half_edges()[h].edge][q], cols = s.a_dims[g.half_edges()[h].vertex][q];
            if (seen[h][q]) continue;
            if (rows * cols != 0) throw Error(ErrorCode::GradeMissing, "missing restriction matrix in grade " + std::to_string(q));
            s.l[h][q] = QMatrix(rows, cols);
        }
    s.validate();
    return s;
}

std::vector<double> grid(const json& j, const char* key, const std::vector<double>& fallback)
{
    const auto g = get<std::vector<double>>(j, key, fallback);
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) invalid(std::string(key) + " must be strictly ascending");
    return g;
}

} // namespace

Scene parse_scene(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "scene is not a JSON object");

    Scene s;
    s.hash = hex64(fnv1a(j.dump()));
    s.name = get<std::string>(j, "name", "scene");

    const json& gj = j.value("graph", json::object());
    GraphSpec gs;
    gs.vertices = get<std::vector<std::string>>(gj, "vertices", {});
    for (const auto& e : gj.value("edges", json::array()))
        gs.edges.push_back({get<std::string>(e, "id", ""), get<std::string>(e, "tail", ""), get<std::string>(e, "head", ""),
                            get<std::string>(e, "cross_section", "")});
    s.geo.graph = Graph::build(gs);
    const Graph& g = s.geo.graph;

    std::map<std::string, CircleSpec> sections;
    for (const auto& c : j.value("cross_sections", json::array())) {
        const std::string id = get<std::string>(c, "id", "");
        if (get<std::string>(c, "kind", "circle") != "circle") invalid("cross-section '" + id + "' is not a circle");
        CircleSpec cs{get<double>(c, "circumference", 0.0), get<std::size_t>(c, "n_theta", 0)};
        if (!(cs.circumference > 0.0)) invalid("cross-section '" + id + "' needs a positive circumference");
        if (cs.n_theta < 3) throw Error(ErrorCode::BadResolution, "cross-section '" + id + "' needs n_theta >= 3");
        if (!sections.emplace(id, cs).second) throw Error(ErrorCode::DuplicateId, "cross-section '" + id + "' defined twice");
    }
    for (const auto& e : g.edges()) {
        const auto it = sections.find(e.cross_section);
        if (it == sections.end()) invalid("edge '" + e.id + "' refers to unknown cross-section '" + e.cross_section + "'");
        s.geo.sections.push_back(it->second);
    }

    const json pj = j.value("pieces", json::object());
    for (const auto& v : g.vertices()) {
        if (!pj.contains(v)) invalid("vertex '" + v + "' has no piece");
        const json& p = pj.at(v);
        try {
            s.geo.kinds.push_back(parse_piece_kind(get<std::string>(p, "kind", "")));
        } catch (const Error& e) {
            invalid(std::string("vertex '") + v + "': " + e.what());
        }
        s.geo.tube_lengths.push_back(get<double>(p, "tube_length", 1.0));
        if (!(s.geo.tube_lengths.back() > 0.0)) invalid("tube_length must be positive");
    }
    for (const auto& [k, _] : pj.items())
        if (std::find(g.vertices().begin(), g.vertices().end(), k) == g.vertices().end())
            invalid("piece for unknown vertex '" + k + "'");

    const json& q = j.value("params", json::object());
    SceneParams& pr = s.params;
    pr.h = get<double>(q, "h", pr.h);
    pr.r = get<double>(q, "r", pr.r);
    pr.r_grid = grid(q, "r_grid", pr.r_grid);
    pr.scan_grid = grid(q, "scan_grid", pr.r_grid);
    pr.r_ref = get<double>(q, "R_ref", pr.r_ref);
    pr.epsilon = get<double>(q, "epsilon", pr.epsilon);
    pr.gap_s = get<double>(q, "gap_s", pr.gap_s);
    pr.seed = get<std::uint64_t>(q, "seed", pr.seed);
    pr.tol = get<double>(q, "tol", pr.tol);
    pr.fit_tol = get<double>(q, "fit_tol", pr.fit_tol);
    pr.gap_ratio = get<double>(q, "gap_ratio", pr.gap_ratio);
    pr.weyl_n_theta = get<std::size_t>(q, "weyl_n_theta", pr.weyl_n_theta);
    pr.weyl_modes = get<std::size_t>(q, "weyl_modes", pr.weyl_modes);
    if (!(pr.h > 0.0)) invalid("h must be positive");
    if (!(pr.tol > 0.0) || !(pr.fit_tol > 0.0) || !(pr.gap_ratio > 1.0)) invalid("tolerances must be positive");
    if (!(pr.epsilon > 0.0)) invalid("epsilon must be positive");
    s.geo.h = pr.h;

    if (j.contains("cochain_system")) s.cochain = parse_cochain(j.at("cochain_system"), g);
    return s;
}

Scene load_scene(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open scene file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

CochainSystem scene_cochain(const Scene& s)
{
    if (s.cochain) return *s.cochain;
    return preset_system(s.geo.graph, s.geo.kinds);
}

void set_h(Scene& s, double h)
{
    if (!(h > 0.0)) throw Error(ErrorCode::ValidationError, "h must be positive");
    s.params.h = h;
    s.geo.h = h;
}

} // namespace hodgelab

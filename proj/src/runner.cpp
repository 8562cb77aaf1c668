#include "hodgelab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hodgelab/acceptance.hpp"
#include "hodgelab/error.hpp"
#include "hodgelab/splicing.hpp"

namespace hodgelab {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> parse_r_grid(const std::string& spec)
{
    if (spec.empty()) return {};
    double a = 0, b = 0, step = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &a, &b, &step, &tail) != 3)
        throw Error(ErrorCode::ParseError, "r grid must look like a:b:step, got '" + spec + "'");
    if (!(step > 0.0) || b < a) throw Error(ErrorCode::ValidationError, "r grid needs step > 0 and b >= a");
    std::vector<double> g;
    for (std::size_t k = 0;; ++k) {
        const double r = a + static_cast<double>(k) * step;
        if (r > b + 1e-9 * step) break;
        g.push_back(r);
    }
    return g;
}

const std::vector<std::string>& run_commands()
{
    static const std::vector<std::string> c{"cohomology", "spectrum", "weyl", "modes", "splice", "scan", "gap", "all"};
    return c;
}

void write_atomic(const std::string& path, const std::string& content)
{
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error(ErrorCode::Io, "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename into '" + p.string() + "': " + ec.message());
}

Scene prepared_scene(const RunOptions& o)
{
    Scene s = load_scene(o.scene);
    if (o.seed) s.params.seed = *o.seed;
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw Error(ErrorCode::ValidationError, "tol must be positive");
        s.params.tol = *o.tol;
    }
    if (o.r_grid) s.params.r_grid = s.params.scan_grid = *o.r_grid;
    if (o.epsilon) {
        if (!(*o.epsilon > 0.0)) throw Error(ErrorCode::ValidationError, "epsilon must be positive");
        s.params.epsilon = *o.epsilon;
    }
    if (o.h) set_h(s, *o.h);
    return s;
}

namespace {

std::vector<double> vec(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json meta(const Scene& s, const std::string& command)
{
    return {{"command", command}, {"scene", s.name}, {"scene_hash", s.hash}, {"seed", s.params.seed},
            {"version", kToolVersion}, {"h", s.params.h}};
}

std::string csv_header(const Scene& s, const std::string& columns)
{
    return "# scene=" + s.name + " scene_hash=" + s.hash + " seed=" + std::to_string(s.params.seed)
           + " version=" + kToolVersion + "\n" + columns + "\n";
}

EigenOptions eig_options(const Scene& s)
{
    EigenOptions e;
    e.tol = s.params.tol;
    e.seed = s.params.seed;
    return e;
}

ApsOptions aps_options(const Scene& s)
{
    ApsOptions a;
    a.fit_tol = s.params.fit_tol;
    a.gap_ratio = s.params.gap_ratio;
    a.eig = eig_options(s);
    return a;
}

struct Output {
    fs::path dir;
    std::ostream& log;
    void put(const std::string& name, const std::string& content)
    {
        write_atomic((dir / name).string(), content);
        log << "wrote " << (dir / name).string() << "\n";
    }
    void put(const std::string& name, const json& j) { put(name, j.dump(2) + "\n"); }
};

json cmd_cohomology(const Scene& s)
{
    const CochainSystem sys = scene_cochain(s);
    const GradedCohomology coh = cohomology(sys);
    const SpectralTerms terms = spectral_sequence_terms(sys);
    json j = meta(s, "cohomology");
    j["c0"] = coh.c0;
    j["c1"] = coh.c1;
    j["rank_rho"] = coh.rank;
    j["h0"] = coh.h0;
    j["h1"] = coh.h1;
    j["predicted_betti"] = predicted_betti_all(coh);
    j["e1"] = terms.e1;
    j["e2"] = terms.e2;
    j["source"] = s.cochain ? "explicit" : "pieces";
    return j;
}

json cmd_spectrum(const Scene& s)
{
    const CellComplex x = assemble(s.geo, s.params.r);
    const GaussBonnetOperator op = operators(x);
    const EigenOptions eo = eig_options(s);
    const KernelReport kl = kernel_dimension(op.Delta, -1.0, s.params.gap_ratio, 8, eo);
    EigenOptions ed = eo;
    ed.psd = false;
    const KernelReport kd = kernel_dimension(op.D, -1.0, s.params.gap_ratio, 8, ed);
    const auto betti = predicted_betti_all(cohomology(scene_cochain(s)));
    std::size_t total = 0;
    for (auto b : betti) total += b;
    IntSpMat dd = x.d1 * x.d0;
    dd.prune(0);
    json j = meta(s, "spectrum");
    j["r"] = s.params.r;
    j["cells"] = {x.n0, x.n1, x.n2};
    j["euler_characteristic"] = x.euler_characteristic();
    j["kernel_dim"] = kl.dim;
    j["kernel_dim_D"] = kd.dim;
    j["tol_abs"] = kl.tol_abs;
    j["gap_ratio"] = kl.gap_ratio;
    j["last_accepted"] = kl.last_accepted;
    j["first_rejected"] = kl.first_rejected;
    j["eigenvalues_laplacian"] = vec(kl.eig.values);
    j["eigenvalues_D"] = vec(kd.eig.values);
    j["restarts"] = kl.eig.restarts;
    j["shift_invert"] = kl.eig.shift_invert;
    j["d1d0_nonzeros"] = dd.nonZeros();
    j["predicted_betti"] = betti;
    j["betti_match"] = total == kl.dim;
    return j;
}

void cmd_weyl(const Scene& s, Output& out)
{
    json j = meta(s, "weyl");
    std::set<double> seen;
    std::string csv = csv_header(s, "section,k,lambda");
    json sections = json::array();
    for (std::size_t e = 0; e < s.geo.sections.size(); ++e) {
        const double len = s.geo.sections[e].circumference;
        if (!seen.insert(len).second) continue;
        const CrossSectionSpectrum fine = discrete_cross_section(len, s.params.weyl_n_theta, false);
        const WeylFit f = weyl_fit(fine, s.params.weyl_modes);
        const CrossSectionSpectrum coarse = discrete_cross_section(len, s.geo.sections[e].n_theta, false);
        const double oracle = weyl_counting_oracle(len);
        sections.push_back({{"edge", s.geo.graph.edges()[e].id},
                            {"circumference", len},
                            {"n_theta", s.params.weyl_n_theta},
                            {"modes", f.modes_used},
                            {"exponent", f.exponent},
                            {"constant", f.constant},
                            {"counting_slope", f.counting_slope},
                            {"counting_oracle", oracle},
                            {"counting_ratio", f.counting_slope / oracle},
                            {"lambda0_scene_resolution", smallest_nonzero(coarse)},
                            {"kernel_dim", coarse.kernel_dim}});
        // positive values in ascending order
        std::vector<double> pos;
        for (Eigen::Index i = 0; i < fine.values.size(); ++i)
            if (fine.values(i) > 0.0) pos.push_back(fine.values(i));
        std::sort(pos.begin(), pos.end());
        for (std::size_t k = 0; k < std::min(pos.size(), s.params.weyl_modes); ++k)
            csv += s.geo.graph.edges()[e].id + "," + std::to_string(k + 1) + "," + num(pos[k]) + "\n";
    }
    j["sections"] = sections;
    out.put("weyl.json", j);
    out.put("weyl.csv", csv);
}

json cmd_modes(const Scene& s)
{
    const Geometry& geo = s.geo;
    const ApsOptions ao = aps_options(s);
    std::vector<ApsResult> pbar;
    json verts = json::array();
    for (std::size_t v = 0; v < geo.graph.vertices().size(); ++v) {
        pbar.push_back(aps_kernel(geo, v, ApsCondition::PBar, ao));
        const ApsResult p = aps_kernel(geo, v, ApsCondition::P, ao);
        const ApsResult& b = pbar.back();
        verts.push_back({{"vertex", geo.graph.vertices()[v]},
                         {"degree", b.half_edges.size()},
                         {"T", b.T},
                         {"tau", b.tau},
                         {"dim_pbar", b.solutions.size()},
                         {"dim_p", p.solutions.size()},
                         {"dim_l2", b.dim_l2},
                         {"dim_lv", b.dim_lv},
                         {"half_kernel_dhat", 2 * b.half_edges.size()},
                         {"lagrangian_defect", lagrangian_defect(geo.graph, b)},
                         {"star_exchange_gap", b.half_edges.empty() ? 0.0 : star_exchange_gap(b)},
                         {"constraint_residual", b.constraint_residual}});
    }
    const MatchingSet ms = matching_assembly(geo.graph, pbar, ao.lv_tol);
    const GradedCohomology coh = cohomology(scene_cochain(s));
    std::size_t h0 = 0, h1 = 0;
    for (auto x : coh.h0) h0 += x;
    for (auto x : coh.h1) h1 += x;
    json j = meta(s, "modes");
    j["vertices"] = verts;
    j["matching"] = {{"dim", ms.dim},       {"dim_l2", ms.dim_l2},     {"dim_la", ms.dim_la},
                     {"dim_lr", ms.dim_lr}, {"sum_h0", h0},            {"sum_h1", h1},
                     {"match_residual", ms.match_residual}};
    if (ms.dim > 0 && !geo.graph.edges().empty()) {
        const ReferenceResult ref = reference_extraction(geo, s.params.r_ref, 0.2, s.params.fit_tol);
        const SubspaceBasis a = orthonormalize(ms.limits, "limits", 1e-6);
        const SubspaceBasis b = orthonormalize(ref.limits, "limits", 1e-6);
        j["reference"] = {{"R_ref", ref.r},
                          {"kernel_dim", ref.kernel.dim},
                          {"max_fit_residual", ref.max_fit_residual},
                          {"gap", std::max(kato_gap(a, b), kato_gap(b, a))}};
    }
    return j;
}

void cmd_splice(const Scene& s, Output& out)
{
    SpliceOptions so;
    so.aps = aps_options(s);
    so.eig = eig_options(s);
    const SpliceReport rep = splice_report(s.geo, s.params.r_grid, so);
    std::string csv = csv_header(s, "r,basis_index,ratio,bound");
    json pts = json::array();
    for (const auto& p : rep.points) {
        for (std::size_t k = 0; k < p.ratios.size(); ++k)
            csv += num(p.r) + "," + std::to_string(k) + "," + num(p.ratios[k]) + "," + num(p.bound) + "\n";
        pts.push_back({{"r", p.r},
                       {"lambda0", p.lambda0},
                       {"bound", p.bound},
                       {"cutoff", p.cutoff},
                       {"ratios", p.ratios},
                       {"defects", p.defects},
                       {"gram_min_sv", p.gram_min_sv},
                       {"dim_w", p.dim_w},
                       {"dim_projection", p.dim_projection},
                       {"cutoff_max_slope", cutoff_profile(p.r, s.params.h).max_slope}});
    }
    json j = meta(s, "splice");
    j["points"] = pts;
    j["floor"] = rep.floor;
    j["fitted_points"] = rep.fitted_points;
    j["decay_rate"] = std::isfinite(rep.decay_rate) ? json(rep.decay_rate) : json(nullptr);
    j["defect_constant"] = rep.defect_constant;
    out.put("splice.csv", csv);
    out.put("splice.json", j);
}

void cmd_scan(const Scene& s, Output& out)
{
    const ScanReport rep = small_eigenvalue_scan(s.geo, s.params.scan_grid, s.params.epsilon, eig_options(s));
    std::string csv = csv_header(s, "r,mu1,mu1_scaled,kernel_dim");
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv += num(r.r) + "," + num(r.mu1) + "," + num(r.scaled) + "," + std::to_string(r.kernel_dim) + "\n";
        rows.push_back({{"r", r.r}, {"mu1", r.mu1}, {"mu1_scaled", r.scaled}, {"kernel_dim", r.kernel_dim},
                        {"violation", r.violation}});
    }
    json j = meta(s, "scan");
    j["epsilon"] = rep.epsilon;
    j["rows"] = rows;
    j["loglog_slope"] = rep.slope;
    j["violations"] = rep.violations;
    out.put("scan.csv", csv);
    out.put("scan.json", j);
}

void cmd_gap(const Scene& s, Output& out)
{
    SpliceOptions so;
    so.aps = aps_options(s);
    so.eig = eig_options(s);
    const GapReport rep = gap_experiment(s.geo, s.params.r_grid, s.params.gap_s, so);
    std::string csv = csv_header(s, "r,delta");
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv += num(r.r) + "," + num(r.delta) + "\n";
        rows.push_back({{"r", r.r}, {"delta", r.delta}, {"dim_e", r.dim_e}, {"dim_w", r.dim_w}});
    }
    json j = meta(s, "gap");
    j["s"] = rep.s;
    j["rows"] = rows;
    out.put("gap.csv", csv);
    out.put("gap.json", j);
}

} // namespace

int run(const RunOptions& o, std::ostream& log)
{
    const auto& cmds = run_commands();
    if (std::find(cmds.begin(), cmds.end(), o.command) == cmds.end())
        throw Error(ErrorCode::ValidationError, "unknown command '" + o.command + "'");
    Output out{fs::path(o.out), log};

    if (o.command == "all") {
        fs::path dir(o.scene);
        if (!fs::is_directory(dir)) dir = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
        const auto results = run_acceptance(dir.string(), &log);
        json j = {{"command", "all"}, {"version", kToolVersion}, {"scene_dir", dir.string()}};
        json rows = json::array();
        bool ok = true;
        for (const auto& r : results) {
            ok = ok && r.pass;
            rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        }
        j["criteria"] = rows;
        j["pass"] = ok;
        out.put("acceptance.json", j);
        return ok ? 0 : 1;
    }

    const Scene s = prepared_scene(o);
    if (o.command == "cohomology") out.put("cohomology.json", cmd_cohomology(s));
    else if (o.command == "spectrum") out.put("spectrum.json", cmd_spectrum(s));
    else if (o.command == "weyl") cmd_weyl(s, out);
    else if (o.command == "modes") out.put("modes.json", cmd_modes(s));
    else if (o.command == "splice") cmd_splice(s, out);
    else if (o.command == "scan") cmd_scan(s, out);
    else if (o.command == "gap") cmd_gap(s, out);
    return 0;
}

} // namespace hodgelab

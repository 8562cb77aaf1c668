#include "hodgelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgelab/error.hpp"

namespace hodgelab {

double spectral_gap(const Geometry& geo)
{
    double lam = std::numeric_limits<double>::infinity();
    for (const auto& sp : edge_spectra(geo)) lam = std::min(lam, smallest_nonzero(sp));
    return lam;
}

StretchedModel build_model(const Geometry& geo, double r, const ApsOptions& opts)
{
    StretchedModel m;
    m.geo = geo;
    m.r = r;
    m.x = assemble(geo, r);
    m.op = operators(m.x);
    m.spectra = edge_spectra(geo);
    m.lambda0 = spectral_gap(geo);

    const std::size_t ns = cylinder_slabs(r, geo.h);
    const double tau = 2.0 * r / static_cast<double>(ns);
    const double want = std::isfinite(m.lambda0) ? std::max(r, 4.0 / m.lambda0) : r;
    ApsOptions o = opts;
    o.chart_r = r;
    o.n_slabs = std::min(ns, static_cast<std::size_t>(std::ceil(want / tau - 1e-9)));
    for (std::size_t v = 0; v < geo.graph.vertices().size(); ++v)
        m.stars.push_back(aps_kernel(geo, v, ApsCondition::PBar, o));
    m.matching = matching_assembly(geo.graph, m.stars, opts.lv_tol);
    m.offsets.assign(m.stars.size() + 1, 0);
    for (std::size_t v = 0; v < m.stars.size(); ++v)
        m.offsets[v + 1] = m.offsets[v] + static_cast<Eigen::Index>(m.stars[v].solutions.size());
    return m;
}

Vec vertex_form(const StretchedModel& m, const Vec& coeff, std::size_t v)
{
    if (coeff.size() != m.offsets.back()) throw Error(ErrorCode::AmbientMismatch, "coefficient vector has the wrong size");
    const ApsResult& a = m.stars[v];
    Vec f = Vec::Zero(static_cast<Eigen::Index>(a.star.size()));
    for (std::size_t j = 0; j < a.solutions.size(); ++j)
        f += coeff(m.offsets[v] + static_cast<Eigen::Index>(j)) * a.solutions[j].form;
    return f;
}

Vec edge_limit(const StretchedModel& m, const Vec& coeff, std::size_t e)
{
    const Graph& g = m.geo.graph;
    const std::size_t he = g.half_edge_index(e, +1);
    const std::size_t v = g.half_edges()[he].vertex;
    const auto& at = g.half_edges_at(v);
    const auto pos = static_cast<Eigen::Index>(std::find(at.begin(), at.end(), he) - at.begin());
    Vec lv = Vec::Zero(4);
    const ApsResult& a = m.stars[v];
    for (std::size_t j = 0; j < a.solutions.size(); ++j)
        lv += coeff(m.offsets[v] + static_cast<Eigen::Index>(j)) * a.solutions[j].limit.segment(4 * pos, 4);
    return lv;
}

} // namespace hodgelab

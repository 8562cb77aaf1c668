#pragma once

#include <numbers>
#include <string>

#include "hodgelab/complex.hpp"

namespace fixtures {

using namespace hodgelab;

inline Geometry geometry(const std::string& name, std::size_t n_theta = 16, double h = 0.3)
{
    GraphSpec gs;
    std::vector<PieceKind> kinds;
    if (name == "sphere") {
        gs = {{"a", "b"}, {{"e", "a", "b", "c"}}};
        kinds = {PieceKind::Cap, PieceKind::Cap};
    } else if (name == "torus") {
        gs = {{"a"}, {{"e", "a", "a", "c"}}};
        kinds = {PieceKind::Tube};
    } else {
        gs = {{"a", "b"}, {{"e0", "a", "b", "c"}, {"e1", "a", "b", "c"}, {"e2", "a", "b", "c"}}};
        kinds = {PieceKind::Pants, PieceKind::Pants};
    }
    Geometry g;
    g.graph = Graph::build(gs);
    g.kinds = kinds;
    g.tube_lengths.assign(kinds.size(), 1.0);
    g.sections.assign(g.graph.edges().size(), {2.0 * std::numbers::pi, n_theta});
    g.h = h;
    return g;
}

// Raw 1-forms on the chart cells: theta-edges carry h_theta (dtheta), or
// t-edges carry tau (dt).
inline std::pair<Vec, Vec> chart_coordinate_forms(const CellComplex& c)
{
    const auto n1 = static_cast<Eigen::Index>(c.n1);
    Vec dtheta = Vec::Zero(n1), dt = Vec::Zero(n1);
    for (const auto& ch : c.charts) {
        for (std::size_t j = 0; j < ch.layers(); ++j)
            for (std::size_t i = 0; i < ch.n_theta; ++i)
                dtheta(static_cast<Eigen::Index>(ch.theta_edge[j][i])) = ch.h_theta * ch.theta_sign[j][i];
        for (std::size_t j = 0; j < ch.slabs(); ++j)
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                const auto e = static_cast<Eigen::Index>(ch.t_edge[j][i]);
                dt(e) = ch.tau * c.d0.coeff(static_cast<int>(e), static_cast<int>(ch.node[j + 1][i]));
            }
    }
    return {dtheta, dt};
}

// Harmonic 1-forms of a small closed complex, symmetric coordinates on C1.
inline Mat harmonic_one_forms(const CellComplex& c)
{
    const GaussBonnetOperator op = operators(c);
    const auto n0 = static_cast<Eigen::Index>(c.n0), n1 = static_cast<Eigen::Index>(c.n1);
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(op.Delta).block(n0, n0, n1, n1));
    Eigen::Index k = 0;
    while (k < n1 && es.eigenvalues()(k) < 1e-9) ++k;
    return es.eigenvectors().leftCols(k);
}

// Project a raw 1-form onto the harmonic space; returns a symmetric vector
// on the full C0 + C1 + C2 space.
inline Vec harmonic_part(const CellComplex& c, const Mat& harm, const Vec& raw1)
{
    const Vec sq = c.m1.cwiseSqrt();
    const Vec s = harm * (harm.transpose() * raw1.cwiseProduct(sq));
    Vec full = Vec::Zero(static_cast<Eigen::Index>(c.size()));
    full.segment(static_cast<Eigen::Index>(c.n0), static_cast<Eigen::Index>(c.n1)) = s;
    return full;
}

} // namespace fixtures

#pragma once

#include <cstddef>
#include <vector>

#include "hodgelab/complex.hpp"
#include "hodgelab/cylinder_modes.hpp"

namespace hodgelab {

/// Smallest nonzero cross-section eigenvalue over all edges (infinity for a
/// graph without edges).
double spectral_gap(const Geometry& geo);

/// X(r) together with vertex stars in the same charts and the matching set
/// built from them.
struct StretchedModel {
    Geometry geo;
    double r = 0.0;
    double lambda0 = 0.0;
    CellComplex x;
    GaussBonnetOperator op;
    std::vector<CrossSectionSpectrum> spectra;
    std::vector<ApsResult> stars;
    MatchingSet matching;
    std::vector<Eigen::Index> offsets; ///< start of each vertex in matching.coeffs rows
};

/// Stars get half-cylinders of length min(2r, max(r, 4 / lambda0)) rounded up
/// to whole slabs of X(r).
StretchedModel build_model(const Geometry& geo, double r, const ApsOptions& opts = {});

/// Vertex solution of one matching-set coefficient vector on the star of v.
Vec vertex_form(const StretchedModel& m, const Vec& coeff, std::size_t v);

/// Limiting value [abs0, abs1, rel0, rel1] on edge e, tail side.
Vec edge_limit(const StretchedModel& m, const Vec& coeff, std::size_t e);

} // namespace hodgelab

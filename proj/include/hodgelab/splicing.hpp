#pragma once

#include <cstddef>
#include <vector>

#include "hodgelab/model.hpp"
#include "hodgelab/spectral.hpp"

namespace hodgelab {

/// 6x^5 - 15x^4 + 10x^3 on [0, 1], clamped outside.
double smoothstep5(double x);

/// g_r(vartheta): 1 up to r - 3/4, 0 from r - 1/4 on.
double cutoff_value(double r, double vartheta);

struct CutoffProfile {
    double r = 0.0;
    std::vector<double> vartheta; ///< slab centres of X(r), measured from one end
    std::vector<double> values;
    double max_slope = 0.0;       ///< largest difference quotient between slabs
};

CutoffProfile cutoff_profile(double r, double h);

/// S_r(w) for a matching-set coefficient vector, symmetric coordinates on m.x.
Vec splice(const StretchedModel& m, const Vec& coeff);

/// Near-kernel of Delta(r): eigenvectors with |mu| <= cutoff.
struct NearKernel {
    double cutoff = 0.0;   ///< on |mu|
    double tol_abs = 0.0;  ///< kernel threshold on Delta
    EigenResult eig;       ///< of Delta
    SubspaceBasis span;
};

/// cutoff = max(exp(-lambda0 r / 4), 10 sqrt(tol_abs)).
NearKernel near_kernel(const StretchedModel& m, const EigenOptions& opts = {});

struct ProjectedSplice {
    Vec spliced;
    Vec projected;
    double ratio = 0.0; ///< ||Pi S w - S w|| / ||S w||
};

ProjectedSplice projected_splice(const StretchedModel& m, const NearKernel& nk, const Vec& coeff);

struct SplicePoint {
    double r = 0.0;
    double lambda0 = 0.0;
    double bound = 0.0;          ///< exp(-lambda0 r / 4)
    double cutoff = 0.0;
    std::vector<double> ratios;  ///< per matching-set basis element
    std::vector<double> defects; ///< ||D S w|| / ||S w||
    double gram_min_sv = 0.0;
    std::size_t dim_w = 0;
    std::size_t dim_projection = 0;
};

struct SpliceReport {
    std::vector<SplicePoint> points;
    double floor = 0.0;        ///< ratios at or below this are numerical zeros
    double decay_rate = 0.0;   ///< from log(max ratio) vs r above the floor; NaN without two such points
    std::size_t fitted_points = 0;
    double defect_constant = 0.0; ///< smallest C with defect <= C exp(-lambda0 (r - 1))
};

struct SpliceOptions {
    double floor = 1e-9;
    ApsOptions aps;
    EigenOptions eig;
};

SpliceReport splice_report(const Geometry& geo, const std::vector<double>& r_grid, const SpliceOptions& opts = {});

struct ScanRow {
    double r = 0.0;
    double mu1 = 0.0;
    double scaled = 0.0; ///< mu1 r^{1 + eps}
    std::size_t kernel_dim = 0;
    bool violation = false;
};

struct ScanReport {
    double epsilon = 0.5;
    std::vector<ScanRow> rows;
    double slope = 0.0; ///< least-squares slope of log mu1 vs log r
    std::size_t violations = 0;
};

ScanReport small_eigenvalue_scan(const Geometry& geo, const std::vector<double>& r_grid, double epsilon,
                                 const EigenOptions& opts = {});

struct GapRow {
    double r = 0.0;
    double delta = 0.0;
    std::size_t dim_e = 0;
    std::size_t dim_w = 0;
};

struct GapReport {
    double s = 1.0;
    std::vector<GapRow> rows;
};

/// Restrictions to one coordinate space, vertex by vertex.
Mat restrict_to_vertices(const CellComplex& c, const Graph& g, double s, const Mat& sym);

GapReport gap_experiment(const Geometry& geo, const std::vector<double>& r_grid, double s, const SpliceOptions& opts = {});

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hodgelab

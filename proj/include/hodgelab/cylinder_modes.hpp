#pragma once

#include <cstddef>
#include <vector>

#include "hodgelab/complex.hpp"
#include "hodgelab/cross_section.hpp"
#include "hodgelab/spectral.hpp"

namespace hodgelab {

/// Per-cell orientation of a chart relative to +theta / +t / dtheta^dt.
struct ChartSigns {
    std::vector<std::vector<int>> t_edge; ///< [slab][i]
    std::vector<std::vector<int>> face;   ///< [slab][i]
};

ChartSigns chart_signs(const CellComplex& c, const CylinderChart& ch);

/// Slab traces of a symmetric-coordinate form, one 4N column per slab, in the
/// cross-section layout.
Mat slab_traces(const CellComplex& c, const CylinderChart& ch, const Vec& sym);

/// Coefficients of the slab traces in the cross-section eigenbasis.
struct ModalProfile {
    std::size_t edge = 0;
    int side = 0;
    double tau = 0.0;
    std::vector<double> t; ///< slab centres
    Vec values;            ///< eigenvalue per mode
    std::size_t kernel_dim = 4;
    Mat coeff;             ///< modes x slabs; kernel modes are rows 0,1 and 2N,2N+1
    Eigen::Matrix4d kernel_to_hat = Eigen::Matrix4d::Identity(); ///< kernel rows -> [abs0, abs1, rel0, rel1]
    std::vector<std::size_t> kernel_rows() const;
};

ModalProfile modal_transform(const CellComplex& c, const CylinderChart& ch, const CrossSectionSpectrum& sp,
                             const Vec& sym);

/// Slab trace rebuilt from the profile at one slab.
Vec reconstruct_trace(const ModalProfile& p, const CrossSectionSpectrum& sp, std::size_t slab);

/// t-independent form carrying the cross-section vector `v` (symmetric
/// coordinates, 4N) on every layer and slab of the chart. Returns a raw
/// cochain on the whole complex, zero off the chart.
Vec pullback(const CellComplex& c, const CylinderChart& ch, const Vec& v);

/// Discrete decay rate of a mode with |value| = s at frequency mu for slab
/// length tau: cosh(alpha tau) = 1 + tau^2 (s^2 - mu^2) / 2.
double discrete_rate(double s, double mu, double tau);

struct LowModeFit {
    double mu = 0.0;
    double lambda0 = 0.0;
    Vec alpha;            ///< per mode; for kernel modes the oscillation frequency
    Vec a, b;             ///< kernel modes, in kernel_rows order: a cos + b sin
    Vec c_plus, c_minus;  ///< non-kernel modes: c+ e^{alpha t} + c- e^{-alpha t}
    double residual = 0.0;     ///< absolute, over the window
    double rel_residual = 0.0; ///< residual / window norm
    std::size_t first_slab = 0, last_slab = 0; ///< window, inclusive
    double window_norm = 0.0;
    Eigen::Matrix4d kernel_to_hat = Eigen::Matrix4d::Identity();
};

/// Least-squares fit of every modal profile to the low-mode model, each mode
/// with free amplitudes for both exponentials. `window` is the fraction of
/// slabs dropped at each end.
LowModeFit fit_low_mode(const ModalProfile& p, double mu, double lambda0, double window = 0.2);

struct LimitingValue {
    Vec hat;      ///< [abs0, abs1, rel0, rel1]
    Vec absolute; ///< [abs0, abs1]
    Vec relative; ///< [rel0, rel1]
    double residual = 0.0;
};

LimitingValue limiting_value(const LowModeFit& fit, double tol = 1e-6);

enum class ApsCondition { P, PBar };

struct ApsOptions {
    double T = -1.0;            ///< half-cylinder length; <= 0 picks max(4 / lambda0, 4)
    double chart_r = -1.0;      ///< put the star in the charts of X(chart_r) instead
    std::size_t n_slabs = 0;    ///< with chart_r: slabs per half-cylinder
    double window = 0.2;
    double fit_tol = 1e-6;
    double gap_ratio = 1e3;
    double lv_tol = 1e-6;       ///< rank tolerance on unit-normalized limiting values
    EigenOptions eig;
};

struct ExtendedSolution {
    std::size_t vertex = 0;
    Vec form;      ///< symmetric coordinates on the star
    Vec limit;     ///< 4 per adjacent half-edge, in half_edges_at order
    Vec absolute;  ///< abs parts, 2 per half-edge
    Vec relative;  ///< rel parts, 2 per half-edge
    bool l2 = false;
    double fit_residual = 0.0;
};

struct ApsResult {
    std::size_t vertex = 0;
    ApsCondition condition = ApsCondition::PBar;
    double T = 0.0;
    double tau = 0.0;
    double lambda0 = 0.0;
    CellComplex star;
    std::vector<std::size_t> half_edges;
    std::vector<ExtendedSolution> solutions; ///< L2 solutions first
    KernelReport kernel;
    double constraint_residual = 0.0; ///< max |B u| over the basis
    std::size_t dim_l2 = 0;
    std::size_t dim_lv = 0;
    Mat limits() const; ///< 4 deg x k
};

/// Cross-section spectra of all graph edges.
std::vector<CrossSectionSpectrum> edge_spectra(const Geometry& geo);

ApsResult aps_kernel(const Geometry& geo, std::size_t vertex, ApsCondition cond, const ApsOptions& opts = {});

/// {u, w}_v: sum over half-edges of the outward sign times <u, sigma w>.
double symplectic_product(const Graph& g, std::size_t vertex, const Vec& u, const Vec& w);

struct MatchingSet {
    Mat coeffs;          ///< per-vertex solution coefficients stacked, one column per element
    Mat limits;          ///< 4 per edge (tail side), one column per element
    std::size_t dim = 0;
    std::size_t dim_l2 = 0;
    std::size_t dim_la = 0;
    std::size_t dim_lr = 0;
    double match_residual = 0.0; ///< largest singular value accepted as zero
};

MatchingSet matching_assembly(const Graph& g, const std::vector<ApsResult>& per_vertex, double tol = 1e-6);

struct ReferenceResult {
    double r = 0.0;
    Mat limits; ///< 4 per edge, one column per global harmonic form
    KernelReport kernel;
    double max_fit_residual = 0.0;
};

ReferenceResult reference_extraction(const Geometry& geo, double r_ref, double window = 0.2, double fit_tol = 1e-6);

/// Hodge star on limiting values of one vertex (block diagonal per half-edge).
Mat kernel_star(std::size_t degree);

/// Gap between *L_v^a and L_v^r, larger of the two directions.
double star_exchange_gap(const ApsResult& pbar, double tol = 1e-6);

/// Largest |{u, w}| over unit-normalized pairs of limiting values.
double lagrangian_defect(const Graph& g, const ApsResult& pbar);

/// Rank of the columns of m with singular values above tol * max(1, s_max).
std::size_t numeric_rank(const Mat& m, double tol);

} // namespace hodgelab

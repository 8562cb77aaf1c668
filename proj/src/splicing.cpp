#include "hodgelab/splicing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgelab/error.hpp"

namespace hodgelab {

double smoothstep5(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double cutoff_value(double r, double vartheta)
{
    return 1.0 - smoothstep5((vartheta - (r - 0.75)) / 0.5);
}

CutoffProfile cutoff_profile(double r, double h)
{
    CutoffProfile p;
    p.r = r;
    const std::size_t ns = cylinder_slabs(r, h);
    const double tau = 2.0 * r / static_cast<double>(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        p.vartheta.push_back((static_cast<double>(j) + 0.5) * tau);
        p.values.push_back(cutoff_value(r, p.vartheta.back()));
    }
    for (std::size_t j = 0; j + 1 < ns; ++j)
        p.max_slope = std::max(p.max_slope, std::abs(p.values[j + 1] - p.values[j]) / tau);
    return p;
}

namespace {

auto at(std::size_t k) { return static_cast<Eigen::Index>(k); }

// distance from the vertex end of a half-edge to the point t of the cylinder
double from_end(int side, double r, double t) { return side > 0 ? t + r : r - t; }

} // namespace

Vec splice(const StretchedModel& m, const Vec& coeff)
{
    if (m.r < 2.0) throw Error(ErrorCode::ROutOfRange, "splicing needs r >= 2");
    const Graph& g = m.geo.graph;
    const CellComplex& x = m.x;
    const double r = m.r;
    const std::size_t o1 = x.n0, o2 = x.n0 + x.n1;
    Vec out = Vec::Zero(at(x.size()));

    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        const CellComplex& st = m.stars[v].star;
        const Vec w = vertex_form(m, coeff, v);
        const RegionIndex rx = vertex_region(x, g, v, 0.0);
        const RegionIndex rs = vertex_region(st, g, v, 0.0);
        if (rx.flat.size() != rs.flat.size()) throw Error(ErrorCode::GluingMismatch, "star and X(r) pieces differ");
        for (std::size_t k = 0; k < rx.flat.size(); ++k)
            out(at(rx.flat[k])) = rx.sign[k] * rs.sign[k] * w(at(rs.flat[k]));

        const std::size_t so1 = st.n0, so2 = st.n0 + st.n1;
        for (const auto& cs : st.charts) {
            const CylinderChart* cx = x.chart_for_edge(cs.edge);
            if (!cx) throw Error(ErrorCode::GluingMismatch, "edge has no cylinder in X(r)");
            if (cs.tau * static_cast<double>(cs.slabs()) < r - 1e-9)
                throw Error(ErrorCode::TruncationTooShort, "star half-cylinder is shorter than r");
            const ChartSigns gs = chart_signs(st, cs), gx = chart_signs(x, *cx);
            const auto nl = static_cast<long>(cx->layers());
            for (std::size_t l = 0; l < cs.layers(); ++l) {
                const long L = cs.offset + static_cast<long>(l);
                if (L <= 0 || L >= nl - 1) continue; // piece circles
                const double gv = cutoff_value(r, from_end(cs.side, r, cs.t_layer[l]));
                if (gv == 0.0) continue;
                const auto Lu = static_cast<std::size_t>(L);
                for (std::size_t i = 0; i < cs.n_theta; ++i) {
                    out(at(cx->node[Lu][i])) += gv * w(at(cs.node[l][i]));
                    out(at(o1 + cx->theta_edge[Lu][i])) +=
                        gv * cx->theta_sign[Lu][i] * cs.theta_sign[l][i] * w(at(so1 + cs.theta_edge[l][i]));
                }
            }
            for (std::size_t j = 0; j < cs.slabs(); ++j) {
                const auto J = static_cast<std::size_t>(cs.offset) + j;
                const double gv = cutoff_value(r, from_end(cs.side, r, cs.slab_t(j)));
                if (gv == 0.0) continue;
                for (std::size_t i = 0; i < cs.n_theta; ++i) {
                    out(at(o1 + cx->t_edge[J][i])) +=
                        gv * gx.t_edge[J][i] * gs.t_edge[j][i] * w(at(so1 + cs.t_edge[j][i]));
                    out(at(o2 + cx->face[J][i])) += gv * gx.face[J][i] * gs.face[j][i] * w(at(so2 + cs.face[j][i]));
                }
            }
        }
    }

    // constant-mode bridge (1 - g) pi^* w_e on every cylinder
    for (const auto& cx : x.charts) {
        const Vec hat = edge_limit(m, coeff, cx.edge);
        if (hat.isZero(0.0)) continue;
        const Vec bridge = x.to_symmetric(pullback(x, cx, m.spectra[cx.edge].kernel_basis() * hat));
        auto weight = [&](double t) { return 1.0 - cutoff_value(r, from_end(+1, r, t)) - cutoff_value(r, from_end(-1, r, t)); };
        for (std::size_t l = 1; l + 1 < cx.layers(); ++l) {
            const double b = weight(cx.t_layer[l]);
            for (std::size_t i = 0; i < cx.n_theta; ++i) {
                out(at(cx.node[l][i])) += b * bridge(at(cx.node[l][i]));
                out(at(o1 + cx.theta_edge[l][i])) += b * bridge(at(o1 + cx.theta_edge[l][i]));
            }
        }
        for (std::size_t j = 0; j < cx.slabs(); ++j) {
            const double b = weight(cx.slab_t(j));
            for (std::size_t i = 0; i < cx.n_theta; ++i) {
                out(at(o1 + cx.t_edge[j][i])) += b * bridge(at(o1 + cx.t_edge[j][i]));
                out(at(o2 + cx.face[j][i])) += b * bridge(at(o2 + cx.face[j][i]));
            }
        }
    }
    return out;
}

NearKernel near_kernel(const StretchedModel& m, const EigenOptions& opts)
{
    NearKernel nk;
    nk.tol_abs = default_kernel_tol(m.op.D);
    const double bound = std::isfinite(m.lambda0) ? std::exp(-m.lambda0 * m.r / 4.0) : 0.0;
    nk.cutoff = std::max(bound, 10.0 * nk.tol_abs);
    const auto n = static_cast<std::size_t>(m.op.Delta.rows());
    std::size_t want = std::max<std::size_t>(m.matching.dim + 4, 8);
    while (true) {
        nk.eig = smallest_eigenpairs(m.op.Delta, std::min(want, n), opts);
        const auto k = nk.eig.values.size();
        if (k == 0 || std::sqrt(std::max(0.0, nk.eig.values(k - 1))) > nk.cutoff || want >= n) break;
        want *= 2;
    }
    nk.span = spectral_subspace(nk.eig, nk.cutoff * nk.cutoff, "X(r)");
    return nk;
}

ProjectedSplice projected_splice(const StretchedModel& m, const NearKernel& nk, const Vec& coeff)
{
    ProjectedSplice ps;
    ps.spliced = splice(m, coeff);
    ps.projected = spectral_projection(nk.span, ps.spliced);
    const double nrm = ps.spliced.norm();
    ps.ratio = nrm > 0.0 ? (ps.projected - ps.spliced).norm() / nrm : 0.0;
    return ps;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SpliceReport splice_report(const Geometry& geo, const std::vector<double>& r_grid, const SpliceOptions& opts)
{
    if (r_grid.empty()) throw Error(ErrorCode::ValidationError, "empty r grid");
    SpliceReport rep;
    rep.floor = opts.floor;
    std::vector<double> fr, fy;
    for (double r : r_grid) {
        const StretchedModel m = build_model(geo, r, opts.aps);
        const NearKernel nk = near_kernel(m, opts.eig);
        SplicePoint pt;
        pt.r = r;
        pt.lambda0 = m.lambda0;
        pt.bound = std::isfinite(m.lambda0) ? std::exp(-m.lambda0 * r / 4.0) : 0.0;
        pt.cutoff = nk.cutoff;
        pt.dim_w = m.matching.dim;
        pt.dim_projection = nk.span.dim();
        Mat cols(at(m.x.size()), m.matching.coeffs.cols());
        for (Eigen::Index k = 0; k < m.matching.coeffs.cols(); ++k) {
            const ProjectedSplice ps = projected_splice(m, nk, m.matching.coeffs.col(k));
            cols.col(k) = ps.spliced;
            pt.ratios.push_back(ps.ratio);
            const double nrm = ps.spliced.norm();
            pt.defects.push_back(nrm > 0.0 ? (m.op.D * ps.spliced).norm() / nrm : 0.0);
            if (std::isfinite(m.lambda0))
                rep.defect_constant = std::max(rep.defect_constant, pt.defects.back() / std::exp(-m.lambda0 * (r - 1.0)));
        }
        // injectivity: orthonormalize the spliced span, then project
        const SubspaceBasis q = orthonormalize(cols, "X(r)", 1e-8);
        if (q.dim() < pt.dim_w || pt.dim_w == 0) {
            pt.gram_min_sv = 0.0;
        } else {
            Eigen::JacobiSVD<Mat> svd(Mat(nk.span.q.transpose() * q.q));
            pt.gram_min_sv = svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
            if (static_cast<std::size_t>(svd.singularValues().size()) < pt.dim_w) pt.gram_min_sv = 0.0;
        }
        const double worst = pt.ratios.empty() ? 0.0 : *std::max_element(pt.ratios.begin(), pt.ratios.end());
        if (worst > rep.floor) fr.push_back(r), fy.push_back(std::log(worst));
        rep.points.push_back(std::move(pt));
    }
    rep.fitted_points = fr.size();
    rep.decay_rate = fr.size() >= 2 ? -fit_slope(fr, fy) : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

ScanReport small_eigenvalue_scan(const Geometry& geo, const std::vector<double>& r_grid, double epsilon,
                                 const EigenOptions& opts)
{
    if (r_grid.empty()) throw Error(ErrorCode::ValidationError, "empty r grid");
    ScanReport rep;
    rep.epsilon = epsilon;
    EigenOptions o = opts;
    o.psd = false;
    std::vector<double> lx, ly;
    for (double r : r_grid) {
        const CellComplex x = assemble(geo, r);
        const GaussBonnetOperator op = operators(x);
        const KernelReport kr = kernel_dimension(op.D, -1.0, 1e3, 8, o);
        ScanRow row;
        row.r = r;
        row.kernel_dim = kr.dim;
        row.mu1 = std::abs(kr.eig.values(at(kr.dim)));
        row.scaled = row.mu1 * std::pow(r, 1.0 + epsilon);
        row.violation = row.mu1 < std::pow(r, -(1.0 + epsilon));
        rep.violations += row.violation;
        lx.push_back(std::log(r));
        ly.push_back(std::log(row.mu1));
        rep.rows.push_back(row);
    }
    rep.slope = fit_slope(lx, ly);
    return rep;
}

Mat restrict_to_vertices(const CellComplex& c, const Graph& g, double s, const Mat& sym)
{
    std::vector<RegionIndex> regions;
    std::size_t rows = 0;
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        regions.push_back(vertex_region(c, g, v, s));
        rows += regions.back().flat.size();
    }
    Mat out(at(rows), sym.cols());
    for (Eigen::Index k = 0; k < sym.cols(); ++k) {
        Eigen::Index off = 0;
        for (const auto& ri : regions) {
            const Vec part = gather(ri, sym.col(k));
            out.col(k).segment(off, part.size()) = part;
            off += part.size();
        }
    }
    return out;
}

GapReport gap_experiment(const Geometry& geo, const std::vector<double>& r_grid, double s, const SpliceOptions& opts)
{
    if (r_grid.empty()) throw Error(ErrorCode::ValidationError, "empty r grid");
    if (s > *std::min_element(r_grid.begin(), r_grid.end()))
        throw Error(ErrorCode::SOutOfRange, "s exceeds the smallest r of the grid");
    GapReport rep;
    rep.s = s;
    const Graph& g = geo.graph;
    for (double r : r_grid) {
        const StretchedModel m = build_model(geo, r, opts.aps);
        GapRow row;
        row.r = r;
        const std::size_t dim = m.matching.dim;
        row.dim_w = dim;
        const EigenResult eig = smallest_eigenpairs(m.op.Delta, std::max<std::size_t>(dim, 1), opts.eig);
        const Mat e = restrict_to_vertices(m.x, g, s, eig.vectors.leftCols(at(dim)));

        Mat w(e.rows(), at(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            const Vec coeff = m.matching.coeffs.col(at(k));
            Eigen::Index off = 0;
            for (std::size_t v = 0; v < g.vertices().size(); ++v) {
                const Vec part = gather(vertex_region(m.stars[v].star, g, v, s), vertex_form(m, coeff, v));
                if (off + part.size() > w.rows()) throw Error(ErrorCode::GluingMismatch, "star and X(r) regions differ");
                w.col(at(k)).segment(off, part.size()) = part;
                off += part.size();
            }
            if (off != w.rows()) throw Error(ErrorCode::GluingMismatch, "star and X(r) regions differ");
        }
        const SubspaceBasis qe = orthonormalize(e, "X0(s)", 1e-8);
        const SubspaceBasis qw = orthonormalize(w, "X0(s)", 1e-8);
        row.dim_e = qe.dim();
        row.delta = kato_gap(qe, qw);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace hodgelab

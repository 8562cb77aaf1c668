#include "hodgelab/cylinder_modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgelab/error.hpp"

namespace hodgelab {

ChartSigns chart_signs(const CellComplex& c, const CylinderChart& ch)
{
    ChartSigns s;
    s.t_edge.assign(ch.slabs(), std::vector<int>(ch.n_theta, 1));
    s.face.assign(ch.slabs(), std::vector<int>(ch.n_theta, 1));
    for (std::size_t j = 0; j < ch.slabs(); ++j)
        for (std::size_t i = 0; i < ch.n_theta; ++i) {
            s.t_edge[j][i] = c.d0.coeff(static_cast<int>(ch.t_edge[j][i]), static_cast<int>(ch.node[j + 1][i]));
            s.face[j][i] = c.d1.coeff(static_cast<int>(ch.face[j][i]), static_cast<int>(ch.theta_edge[j][i]))
                           * ch.theta_sign[j][i];
        }
    return s;
}

namespace {

struct TraceEntry {
    std::size_t row;  ///< within 4N
    std::size_t cell; ///< flat index into C0 + C1 + C2
    double w;         ///< weight on the symmetric coordinate
};

// Linear map sym -> trace of slab j, as a list of entries.
std::vector<TraceEntry> trace_entries(const CellComplex& c, const CylinderChart& ch, const ChartSigns& sg,
                                      std::size_t j)
{
    const std::size_t n = ch.n_theta;
    const double sh = std::sqrt(ch.h_theta), tau = ch.tau;
    const std::size_t o1 = c.n0, o2 = c.n0 + c.n1;
    std::vector<TraceEntry> out;
    out.reserve(6 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l : {j, j + 1}) {
            const std::size_t a = ch.node[l][i];
            out.push_back({i, a, 0.5 * sh / std::sqrt(c.m0(static_cast<Eigen::Index>(a)))});
            const std::size_t e = ch.theta_edge[l][i];
            out.push_back({n + i, o1 + e, 0.5 * ch.theta_sign[l][i] / (sh * std::sqrt(c.m1(static_cast<Eigen::Index>(e))))});
        }
        const std::size_t te = ch.t_edge[j][i];
        out.push_back({2 * n + i, o1 + te, sg.t_edge[j][i] * sh / (tau * std::sqrt(c.m1(static_cast<Eigen::Index>(te))))});
        const std::size_t f = ch.face[j][i];
        out.push_back({3 * n + i, o2 + f, sg.face[j][i] / (tau * sh * std::sqrt(c.m2(static_cast<Eigen::Index>(f))))});
    }
    return out;
}

SpMat trace_operator(const CellComplex& c, const CylinderChart& ch, const ChartSigns& sg, std::size_t j)
{
    std::vector<Eigen::Triplet<double>> t;
    for (const auto& e : trace_entries(c, ch, sg, j))
        t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.cell), e.w);
    SpMat m(static_cast<Eigen::Index>(4 * ch.n_theta), static_cast<Eigen::Index>(c.size()));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

void check_chart(const CylinderChart& ch, const CrossSectionSpectrum& sp)
{
    if (ch.n_theta != sp.n_theta || sp.vectors.size() == 0)
        throw Error(ErrorCode::EdgeNotCylindrical, "chart and cross-section do not match");
    if (ch.slabs() == 0) throw Error(ErrorCode::EdgeNotCylindrical, "chart has no slabs");
}

} // namespace

Mat slab_traces(const CellComplex& c, const CylinderChart& ch, const Vec& sym)
{
    if (static_cast<std::size_t>(sym.size()) != c.size())
        throw Error(ErrorCode::AmbientMismatch, "form does not live on this complex");
    const ChartSigns sg = chart_signs(c, ch);
    Mat tr = Mat::Zero(static_cast<Eigen::Index>(4 * ch.n_theta), static_cast<Eigen::Index>(ch.slabs()));
    for (std::size_t j = 0; j < ch.slabs(); ++j)
        for (const auto& e : trace_entries(c, ch, sg, j))
            tr(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(j)) += e.w * sym(static_cast<Eigen::Index>(e.cell));
    return tr;
}

std::vector<std::size_t> ModalProfile::kernel_rows() const
{
    const auto n2 = static_cast<std::size_t>(values.size()) / 2;
    return {0, 1, n2, n2 + 1};
}

ModalProfile modal_transform(const CellComplex& c, const CylinderChart& ch, const CrossSectionSpectrum& sp,
                             const Vec& sym)
{
    check_chart(ch, sp);
    ModalProfile p;
    p.edge = ch.edge;
    p.side = ch.side;
    p.tau = ch.tau;
    for (std::size_t j = 0; j < ch.slabs(); ++j) p.t.push_back(ch.slab_t(j));
    p.values = sp.values;
    p.kernel_dim = sp.kernel_dim;
    p.coeff = sp.vectors.transpose() * slab_traces(c, ch, sym);
    const Mat k = sp.kernel_basis();
    const auto rows = p.kernel_rows();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) p.kernel_to_hat(a, b) = k.col(a).dot(sp.vectors.col(static_cast<Eigen::Index>(rows[b])));
    return p;
}

Vec reconstruct_trace(const ModalProfile& p, const CrossSectionSpectrum& sp, std::size_t slab)
{
    return sp.vectors * p.coeff.col(static_cast<Eigen::Index>(slab));
}

Vec pullback(const CellComplex& c, const CylinderChart& ch, const Vec& v)
{
    const std::size_t n = ch.n_theta;
    if (static_cast<std::size_t>(v.size()) != 4 * n) throw Error(ErrorCode::AmbientMismatch, "vector size is not 4N");
    const ChartSigns sg = chart_signs(c, ch);
    const double sh = std::sqrt(ch.h_theta), tau = ch.tau;
    const std::size_t o1 = c.n0, o2 = c.n0 + c.n1;
    Vec raw = Vec::Zero(static_cast<Eigen::Index>(c.size()));
    auto at = [](std::size_t k) { return static_cast<Eigen::Index>(k); };
    for (std::size_t l = 0; l < ch.layers(); ++l)
        for (std::size_t i = 0; i < n; ++i) {
            raw(at(ch.node[l][i])) = v(at(i)) / sh;
            raw(at(o1 + ch.theta_edge[l][i])) = ch.theta_sign[l][i] * v(at(n + i)) * sh;
        }
    for (std::size_t j = 0; j < ch.slabs(); ++j)
        for (std::size_t i = 0; i < n; ++i) {
            raw(at(o1 + ch.t_edge[j][i])) = sg.t_edge[j][i] * v(at(2 * n + i)) * tau / sh;
            raw(at(o2 + ch.face[j][i])) = sg.face[j][i] * v(at(3 * n + i)) * tau * sh;
        }
    return raw;
}

double discrete_rate(double s, double mu, double tau)
{
    const double x = tau * tau * (s * s - mu * mu) / 2.0;
    if (x >= 0.0) return std::acosh(1.0 + x) / tau;
    // oscillating: cos(omega tau) = 1 + x
    return std::acos(std::max(-1.0, 1.0 + x)) / tau;
}

LowModeFit fit_low_mode(const ModalProfile& p, double mu, double lambda0, double window)
{
    if (std::abs(mu) >= lambda0)
        throw Error(ErrorCode::MuTooLarge, "|mu| = " + std::to_string(std::abs(mu)) + " is not below lambda0 = "
                                               + std::to_string(lambda0));
    const std::size_t s = p.t.size();
    const auto drop = static_cast<std::size_t>(std::floor(window * static_cast<double>(s)));
    if (s < 2 * drop + 6)
        throw Error(ErrorCode::IllConditionedFit, "fit window holds " + std::to_string(s > 2 * drop ? s - 2 * drop : 0)
                                                      + " slabs, need 6");
    LowModeFit fit;
    fit.mu = mu;
    fit.lambda0 = lambda0;
    fit.first_slab = drop;
    fit.last_slab = s - 1 - drop;
    fit.kernel_to_hat = p.kernel_to_hat;
    const auto w = static_cast<Eigen::Index>(s - 2 * drop);
    const auto modes = p.coeff.rows();
    Vec tw(w);
    for (Eigen::Index k = 0; k < w; ++k) tw(k) = p.t[drop + static_cast<std::size_t>(k)];
    const double t_lo = tw.minCoeff(), t_hi = tw.maxCoeff();

    fit.alpha = Vec::Zero(modes);
    fit.c_plus = Vec::Zero(modes);
    fit.c_minus = Vec::Zero(modes);
    fit.a = Vec::Zero(4);
    fit.b = Vec::Zero(4);
    const auto krows = p.kernel_rows();
    double res2 = 0.0, norm2 = 0.0;
    for (Eigen::Index m = 0; m < modes; ++m) {
        const Vec y = p.coeff.row(m).segment(static_cast<Eigen::Index>(drop), w).transpose();
        norm2 += y.squaredNorm();
        const auto kit = std::find(krows.begin(), krows.end(), static_cast<std::size_t>(m));
        Mat basis;
        if (kit != krows.end()) {
            const double om = discrete_rate(0.0, mu, p.tau);
            fit.alpha(m) = om;
            if (mu == 0.0) {
                basis = Mat::Ones(w, 1);
            } else {
                basis.resize(w, 2);
                for (Eigen::Index k = 0; k < w; ++k) {
                    basis(k, 0) = std::cos(om * tw(k));
                    basis(k, 1) = std::sin(om * tw(k));
                }
            }
            const Vec x = basis.colPivHouseholderQr().solve(y);
            const auto slot = static_cast<Eigen::Index>(kit - krows.begin());
            fit.a(slot) = x(0);
            if (x.size() > 1) fit.b(slot) = x(1);
            res2 += (basis * x - y).squaredNorm();
        } else {
            const double al = discrete_rate(std::abs(p.values(m)), mu, p.tau);
            fit.alpha(m) = al;
            // anchored at the window ends so neither column overflows
            basis.resize(w, 2);
            for (Eigen::Index k = 0; k < w; ++k) {
                basis(k, 0) = std::exp(al * (tw(k) - t_hi));
                basis(k, 1) = std::exp(-al * (tw(k) - t_lo));
            }
            const Vec x = basis.colPivHouseholderQr().solve(y);
            fit.c_plus(m) = x(0) * std::exp(-al * t_hi);
            fit.c_minus(m) = x(1) * std::exp(al * t_lo);
            res2 += (basis * x - y).squaredNorm();
        }
    }
    fit.residual = std::sqrt(res2);
    fit.window_norm = std::sqrt(norm2);
    fit.rel_residual = fit.window_norm > 0.0 ? fit.residual / fit.window_norm : 0.0;
    return fit;
}

LimitingValue limiting_value(const LowModeFit& fit, double tol)
{
    if (fit.mu != 0.0) throw Error(ErrorCode::ValidationError, "limiting values need a fit at mu = 0");
    if (fit.residual > tol * std::max(fit.window_norm, 1.0))
        throw Error(ErrorCode::ResidualTooLarge, "fit residual " + std::to_string(fit.residual) + " against window norm "
                                                     + std::to_string(fit.window_norm));
    LimitingValue lv;
    lv.hat = fit.kernel_to_hat * fit.a;
    lv.absolute = lv.hat.head(2);
    lv.relative = lv.hat.tail(2);
    lv.residual = fit.residual;
    return lv;
}

std::vector<CrossSectionSpectrum> edge_spectra(const Geometry& geo)
{
    std::vector<CrossSectionSpectrum> out;
    for (std::size_t e = 0; e < geo.graph.edges().size(); ++e)
        out.push_back(discrete_cross_section(geo.sections[e].circumference, geo.sections[e].n_theta, true,
                                             geo.graph.edges()[e].cross_section));
    return out;
}

std::size_t numeric_rank(const Mat& m, double tol)
{
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& sv = svd.singularValues();
    const double cut = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > cut;
    return r;
}

Mat ApsResult::limits() const
{
    const auto rows = static_cast<Eigen::Index>(4 * half_edges.size());
    Mat m(rows, static_cast<Eigen::Index>(solutions.size()));
    for (std::size_t k = 0; k < solutions.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = solutions[k].limit;
    return m;
}

namespace {

struct StarFit {
    Vec limit;
    double residual = 0.0;
};

StarFit star_limit(const CellComplex& star, const std::vector<CrossSectionSpectrum>& spectra, const Vec& u,
                   double window, double tol)
{
    StarFit f;
    f.limit = Vec::Zero(static_cast<Eigen::Index>(4 * star.charts.size()));
    for (std::size_t c = 0; c < star.charts.size(); ++c) {
        const auto& ch = star.charts[c];
        const auto& sp = spectra[ch.edge];
        const ModalProfile p = modal_transform(star, ch, sp, u);
        const LimitingValue lv = limiting_value(fit_low_mode(p, 0.0, smallest_nonzero(sp), window), tol);
        f.limit.segment(static_cast<Eigen::Index>(4 * c), 4) = lv.hat;
        f.residual = std::max(f.residual, lv.residual);
    }
    return f;
}

ExtendedSolution make_solution(std::size_t v, const Vec& form, const StarFit& f)
{
    ExtendedSolution s;
    s.vertex = v;
    s.form = form;
    s.limit = f.limit;
    const auto deg = f.limit.size() / 4;
    s.absolute.resize(2 * deg);
    s.relative.resize(2 * deg);
    for (Eigen::Index c = 0; c < deg; ++c) {
        s.absolute.segment(2 * c, 2) = f.limit.segment(4 * c, 2);
        s.relative.segment(2 * c, 2) = f.limit.segment(4 * c + 2, 2);
    }
    s.fit_residual = f.residual;
    return s;
}

} // namespace

ApsResult aps_kernel(const Geometry& geo, std::size_t vertex, ApsCondition cond, const ApsOptions& opts)
{
    const Graph& g = geo.graph;
    if (vertex >= g.vertices().size()) throw Error(ErrorCode::ValidationError, "vertex out of range");
    const auto spectra = edge_spectra(geo);
    const auto& at = g.half_edges_at(vertex);

    ApsResult res;
    res.vertex = vertex;
    res.condition = cond;
    res.half_edges = at;
    res.lambda0 = std::numeric_limits<double>::infinity();
    for (std::size_t h : at) res.lambda0 = std::min(res.lambda0, smallest_nonzero(spectra[g.half_edges()[h].edge]));

    double r_chart = 0.0;
    std::size_t n_slabs = 0;
    if (opts.chart_r > 0.0) {
        r_chart = opts.chart_r;
        n_slabs = opts.n_slabs;
        const std::size_t ns = cylinder_slabs(r_chart, geo.h);
        if (n_slabs == 0 || n_slabs > ns)
            throw Error(ErrorCode::ValidationError, "n_slabs must lie in [1, " + std::to_string(ns) + "]");
        res.tau = 2.0 * r_chart / static_cast<double>(ns);
        res.T = res.tau * static_cast<double>(n_slabs);
    } else {
        const double T = opts.T > 0.0 ? opts.T : std::max(4.0 / res.lambda0, 4.0);
        if (T < 1.0) throw Error(ErrorCode::CylinderTooShort, "T must be at least 1");
        r_chart = T;
        n_slabs = cylinder_slabs(T, geo.h) / 2;
        res.tau = 2.0 * T / static_cast<double>(cylinder_slabs(T, geo.h));
        res.T = T;
    }
    if (!at.empty() && res.T < 3.0 / res.lambda0 - 1e-12)
        throw Error(ErrorCode::CylinderTooShort, "half-cylinders of length " + std::to_string(res.T)
                                                     + " are shorter than 3 / lambda0 = "
                                                     + std::to_string(3.0 / res.lambda0));

    res.star = build_star(geo, vertex, r_chart, n_slabs);
    const CellComplex& c = res.star;
    const GaussBonnetOperator op = operators(c);
    const auto n = static_cast<Eigen::Index>(c.size());

    // co-differential rows on the far circles are left to the boundary condition
    Vec keep = Vec::Ones(n);
    for (const auto& ch : c.charts) {
        const long fl = ch.far_layer();
        if (fl < 0) continue;
        for (std::size_t i = 0; i < ch.n_theta; ++i) {
            keep(static_cast<Eigen::Index>(ch.node[static_cast<std::size_t>(fl)][i])) = 0.0;
            keep(static_cast<Eigen::Index>(c.n0 + ch.theta_edge[static_cast<std::size_t>(fl)][i])) = 0.0;
        }
    }

    std::vector<Eigen::Triplet<double>> bt;
    Eigen::Index brow = 0;
    for (const auto& ch : c.charts) {
        const auto& sp = spectra[ch.edge];
        const ChartSigns sg = chart_signs(c, ch);
        const std::size_t ns = ch.slabs();
        if (ns < 2) throw Error(ErrorCode::CylinderTooShort, "half-cylinder needs at least two slabs");
        const std::size_t jf = ch.side > 0 ? ns - 1 : 0;
        const std::size_t jp = ch.side > 0 ? ns - 2 : 1;
        const Mat far = Mat(sp.vectors.transpose() * trace_operator(c, ch, sg, jf));
        const Mat prev = Mat(sp.vectors.transpose() * trace_operator(c, ch, sg, jp));
        const auto modes = sp.vectors.cols();
        const auto half = modes / 2;
        auto push = [&](const Vec& row) {
            for (Eigen::Index k = 0; k < row.size(); ++k)
                if (row(k) != 0.0) bt.emplace_back(static_cast<int>(brow), static_cast<int>(k), row(k));
            ++brow;
        };
        for (Eigen::Index m = 0; m < modes; ++m) {
            const bool kernel = m == 0 || m == 1 || m == half || m == half + 1;
            if (kernel) {
                if (cond == ApsCondition::PBar) {
                    push(Vec(far.row(m) - prev.row(m)));
                } else {
                    push(Vec(far.row(m)));
                    push(Vec(prev.row(m)));
                }
            } else {
                const double kappa = std::exp(-discrete_rate(std::abs(sp.values(m)), 0.0, ch.tau) * ch.tau);
                push(Vec(far.row(m) - kappa * prev.row(m)));
            }
        }
    }
    SpMat b(brow, n);
    b.setFromTriplets(bt.begin(), bt.end());
    b.prune(1e-300);

    const double pen = one_norm(op.D);
    const SpMat st = op.S.transpose();
    const SpMat a = SpMat(st * op.S) + SpMat(op.S * keep.asDiagonal() * st) + pen * SpMat(SpMat(b.transpose()) * b);
    res.kernel = kernel_dimension(SpMat(a.pruned()), -1.0, opts.gap_ratio, 8, opts.eig);
    const auto k = static_cast<Eigen::Index>(res.kernel.dim);
    Mat basis = res.kernel.eig.vectors.leftCols(k);

    // rotate so that solutions without limiting value come first
    Mat lim(static_cast<Eigen::Index>(4 * at.size()), k);
    for (Eigen::Index j = 0; j < k; ++j) lim.col(j) = star_limit(c, spectra, basis.col(j), opts.window, opts.fit_tol).limit;
    if (k > 0 && lim.rows() > 0) {
        Eigen::JacobiSVD<Mat> svd(lim, Eigen::ComputeFullV);
        const Vec& sv = svd.singularValues();
        std::size_t rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > opts.lv_tol;
        res.dim_lv = rank;
        res.dim_l2 = static_cast<std::size_t>(k) - rank;
        basis = basis * svd.matrixV().rowwise().reverse();
    } else {
        res.dim_l2 = static_cast<std::size_t>(k);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        const StarFit f = star_limit(c, spectra, basis.col(j), opts.window, opts.fit_tol);
        ExtendedSolution s = make_solution(vertex, basis.col(j), f);
        s.l2 = static_cast<std::size_t>(j) < res.dim_l2;
        res.constraint_residual = std::max(res.constraint_residual, (b * basis.col(j)).norm());
        res.solutions.push_back(std::move(s));
    }
    return res;
}

double symplectic_product(const Graph& g, std::size_t vertex, const Vec& u, const Vec& w)
{
    const auto& at = g.half_edges_at(vertex);
    if (u.size() != static_cast<Eigen::Index>(4 * at.size()) || w.size() != u.size())
        throw Error(ErrorCode::AmbientMismatch, "limiting values do not match the vertex degree");
    const Eigen::Matrix4d sigma = circle_kernel_sigma();
    double sum = 0.0;
    for (std::size_t c = 0; c < at.size(); ++c) {
        const auto i = static_cast<Eigen::Index>(4 * c);
        const Eigen::Vector4d uc = u.segment<4>(i), wc = w.segment<4>(i);
        sum += g.half_edges()[at[c]].sign * uc.dot(sigma * wc);
    }
    return sum;
}

MatchingSet matching_assembly(const Graph& g, const std::vector<ApsResult>& per_vertex, double tol)
{
    const std::size_t nv = g.vertices().size();
    if (per_vertex.size() != nv) throw Error(ErrorCode::ValidationError, "need one kernel basis per vertex");
    std::vector<Eigen::Index> off(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) {
        const ApsResult& a = per_vertex[v];
        if (a.half_edges != g.half_edges_at(v))
            throw Error(ErrorCode::ValidationError, "kernel basis of vertex " + std::to_string(v) + " has other half-edges");
        const auto k = static_cast<Eigen::Index>(a.solutions.size());
        if (k > 0) {
            Mat f(a.solutions.front().form.size(), k);
            for (Eigen::Index j = 0; j < k; ++j) f.col(j) = a.solutions[static_cast<std::size_t>(j)].form;
            if ((f.transpose() * f - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-6)
                throw Error(ErrorCode::RankDeficientInput, "kernel basis of vertex " + std::to_string(v) + " is not orthonormal");
        }
        off[v + 1] = off[v] + k;
    }
    const Eigen::Index total = off[nv];
    const std::size_t ne = g.edges().size();

    // limiting value of a stacked coefficient vector at one half-edge
    auto block = [&](std::size_t he) {
        const std::size_t v = g.half_edges()[he].vertex;
        const auto& at = g.half_edges_at(v);
        const auto pos = static_cast<Eigen::Index>(std::find(at.begin(), at.end(), he) - at.begin());
        Mat m = Mat::Zero(4, total);
        const Mat lim = per_vertex[v].limits();
        if (lim.cols() > 0) m.middleCols(off[v], lim.cols()) = lim.middleRows(4 * pos, 4);
        return m;
    };

    Mat rho(static_cast<Eigen::Index>(4 * ne), total);
    Mat tail_lv(static_cast<Eigen::Index>(4 * ne), total);
    for (std::size_t e = 0; e < ne; ++e) {
        const Mat lt = block(g.half_edge_index(e, +1));
        const Mat lh = block(g.half_edge_index(e, -1));
        rho.middleRows(static_cast<Eigen::Index>(4 * e), 4) = lh - lt;
        tail_lv.middleRows(static_cast<Eigen::Index>(4 * e), 4) = lt;
    }

    MatchingSet ms;
    Mat null;
    if (rho.rows() == 0 || total == 0) {
        null = Mat::Identity(total, total);
    } else {
        Eigen::JacobiSVD<Mat> svd(rho, Eigen::ComputeFullV);
        const Vec& sv = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > tol) ++rank;
            else ms.match_residual = std::max(ms.match_residual, sv(i));
        }
        null = svd.matrixV().rightCols(total - rank);
    }
    ms.coeffs = null;
    ms.dim = static_cast<std::size_t>(null.cols());
    ms.limits = tail_lv * null;
    const std::size_t rank_l = numeric_rank(ms.limits, tol);
    ms.dim_l2 = ms.dim - rank_l;
    Mat abs_rows = Mat::Zero(static_cast<Eigen::Index>(2 * ne), null.cols());
    Mat rel_rows = abs_rows;
    for (std::size_t e = 0; e < ne; ++e) {
        const auto i = static_cast<Eigen::Index>(e);
        abs_rows.middleRows(2 * i, 2) = ms.limits.middleRows(4 * i, 2);
        rel_rows.middleRows(2 * i, 2) = ms.limits.middleRows(4 * i + 2, 2);
    }
    ms.dim_la = numeric_rank(abs_rows, tol);
    ms.dim_lr = numeric_rank(rel_rows, tol);
    return ms;
}

ReferenceResult reference_extraction(const Geometry& geo, double r_ref, double window, double fit_tol)
{
    ReferenceResult out;
    out.r = r_ref;
    const CellComplex c = assemble(geo, r_ref);
    const GaussBonnetOperator op = operators(c);
    out.kernel = kernel_dimension(op.Delta);
    const auto spectra = edge_spectra(geo);
    const auto k = static_cast<Eigen::Index>(out.kernel.dim);
    const std::size_t ne = geo.graph.edges().size();
    out.limits = Mat::Zero(static_cast<Eigen::Index>(4 * ne), k);
    for (const auto& ch : c.charts) {
        const auto& sp = spectra[ch.edge];
        for (Eigen::Index j = 0; j < k; ++j) {
            const ModalProfile p = modal_transform(c, ch, sp, out.kernel.eig.vectors.col(j));
            const LimitingValue lv = limiting_value(fit_low_mode(p, 0.0, smallest_nonzero(sp), window), fit_tol);
            out.limits.block(static_cast<Eigen::Index>(4 * ch.edge), j, 4, 1) = lv.hat;
            out.max_fit_residual = std::max(out.max_fit_residual, lv.residual);
        }
    }
    return out;
}

Mat kernel_star(std::size_t degree)
{
    const auto d = static_cast<Eigen::Index>(degree);
    Mat m = Mat::Zero(4 * d, 4 * d);
    for (Eigen::Index c = 0; c < d; ++c) m.block(4 * c, 4 * c, 4, 4) = circle_kernel_star();
    return m;
}

double star_exchange_gap(const ApsResult& pbar, double tol)
{
    const Mat lim = pbar.limits();
    const auto deg = lim.rows() / 4;
    Mat la = lim, lr = lim;
    for (Eigen::Index c = 0; c < deg; ++c) {
        la.middleRows(4 * c + 2, 2).setZero();
        lr.middleRows(4 * c, 2).setZero();
    }
    const SubspaceBasis a = orthonormalize(la, "limits", tol);
    const SubspaceBasis r = orthonormalize(lr, "limits", tol);
    const SubspaceBasis sa = orthonormalize(kernel_star(static_cast<std::size_t>(deg)) * a.q, "limits", tol);
    return std::max(kato_gap(sa, r), kato_gap(r, sa));
}

double lagrangian_defect(const Graph& g, const ApsResult& pbar)
{
    const SubspaceBasis l = orthonormalize(pbar.limits(), "limits", 1e-6);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < l.q.cols(); ++i)
        for (Eigen::Index j = 0; j < l.q.cols(); ++j)
            worst = std::max(worst, std::abs(symplectic_product(g, pbar.vertex, l.q.col(i), l.q.col(j))));
    return worst;
}

} // namespace hodgelab

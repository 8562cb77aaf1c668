#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hodgelab/error.hpp"
#include "hodgelab/splicing.hpp"

using namespace hodgelab;

namespace {

const StretchedModel& sphere3()
{
    static const StretchedModel m = build_model(fixtures::geometry("sphere"), 3.0);
    return m;
}

const StretchedModel& theta3()
{
    static const StretchedModel m = build_model(fixtures::geometry("theta"), 3.0);
    return m;
}

Mat spliced_columns(const StretchedModel& m)
{
    Mat s(static_cast<Eigen::Index>(m.x.size()), m.matching.coeffs.cols());
    for (Eigen::Index k = 0; k < s.cols(); ++k) s.col(k) = splice(m, m.matching.coeffs.col(k));
    return s;
}

// symmetric coordinates of the raw function 1 on nodes
Vec constant_function(const CellComplex& c)
{
    Vec raw = Vec::Zero(static_cast<Eigen::Index>(c.size()));
    raw.head(static_cast<Eigen::Index>(c.n0)).setOnes();
    return c.to_symmetric(raw);
}

double theta_from_end(int side, double r, double t) { return side > 0 ? t + r : r - t; }

} // namespace

TEST_CASE("quintic cutoff")
{
    CHECK(smoothstep5(-1.0) == 0.0);
    CHECK(smoothstep5(2.0) == 1.0);
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    for (double r : {2.0, 3.5, 6.0}) {
        CHECK(cutoff_value(r, 0.0) == 1.0);
        CHECK(cutoff_value(r, r - 0.75) == 1.0);
        CHECK(cutoff_value(r, r - 0.25) == 0.0);
        CHECK(cutoff_value(r, r) == 0.0);
        CHECK(cutoff_value(r, r - 0.5) == doctest::Approx(0.5));
    }
}

TEST_CASE("cutoff profile invariants")
{
    for (double h : {0.1, 0.2, 0.3})
        for (double r : {2.0, 3.0, 4.5, 8.0}) {
            const CutoffProfile p = cutoff_profile(r, h);
            CHECK(p.max_slope <= 4.0);
            for (std::size_t j = 0; j < p.values.size(); ++j) {
                if (p.vartheta[j] <= r - 0.75) CHECK(p.values[j] == 1.0);
                if (p.vartheta[j] >= r - 0.25) CHECK(p.values[j] == 0.0);
                CHECK(p.values[j] >= 0.0);
                CHECK(p.values[j] <= 1.0);
            }
        }
    // finite differences approach the analytic maximum 15/4
    CHECK(cutoff_profile(4.0, 0.01).max_slope == doctest::Approx(3.75).epsilon(1e-3));
}

TEST_CASE("spliced constant is the constant")
{
    const StretchedModel& m = sphere3();
    REQUIRE(m.matching.dim == 2);
    const Mat s = spliced_columns(m);
    const Vec u = constant_function(m.x);
    const Vec a = s.colPivHouseholderQr().solve(u);
    const Vec su = s * a;
    CHECK((su - u).norm() <= 1e-8 * u.norm());
    const Vec raw = m.x.to_raw(su);
    for (std::size_t i = 0; i < m.x.n0; ++i) CHECK(raw(static_cast<Eigen::Index>(i)) == doctest::Approx(1.0).epsilon(1e-8));

    const NearKernel nk = near_kernel(m);
    CHECK(projected_splice(m, nk, Vec(m.matching.coeffs * a)).ratio <= 1e-10);
}

TEST_CASE("limit-free element vanishes mid-cylinder")
{
    StretchedModel m = theta3();
    for (auto& st : m.stars)
        for (auto& sol : st.solutions) sol.limit.setZero();
    const Vec s = splice(m, m.matching.coeffs.col(0));
    const Vec raw = m.x.to_raw(s);
    const std::size_t o1 = m.x.n0, o2 = m.x.n0 + m.x.n1;
    for (const auto& ch : m.x.charts) {
        for (std::size_t l = 0; l < ch.layers(); ++l) {
            if (std::abs(ch.t_layer[l]) >= 0.25) continue;
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                CHECK(raw(static_cast<Eigen::Index>(ch.node[l][i])) == 0.0);
                CHECK(raw(static_cast<Eigen::Index>(o1 + ch.theta_edge[l][i])) == 0.0);
            }
        }
        for (std::size_t j = 0; j < ch.slabs(); ++j) {
            if (std::abs(ch.slab_t(j)) >= 0.25) continue;
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                CHECK(raw(static_cast<Eigen::Index>(o1 + ch.t_edge[j][i])) == 0.0);
                CHECK(raw(static_cast<Eigen::Index>(o2 + ch.face[j][i])) == 0.0);
            }
        }
    }
}

TEST_CASE("partition identity on nodes")
{
    const StretchedModel& m = theta3();
    const Graph& g = m.geo.graph;
    const double r = m.r;
    for (Eigen::Index k = 0; k < m.matching.coeffs.cols(); ++k) {
        const Vec coeff = m.matching.coeffs.col(k);
        const Vec s = splice(m, coeff);
        for (std::size_t v = 0; v < g.vertices().size(); ++v) {
            const Vec w = vertex_form(m, coeff, v);
            for (const auto& cs : m.stars[v].star.charts) {
                const CylinderChart* cx = m.x.chart_for_edge(cs.edge);
                for (std::size_t l = 0; l < cs.layers(); ++l) {
                    const double th = theta_from_end(cs.side, r, cs.t_layer[l]);
                    if (th > r - 0.75) continue;
                    const auto L = static_cast<std::size_t>(cs.offset + static_cast<long>(l));
                    for (std::size_t i = 0; i < cs.n_theta; ++i)
                        CHECK(s(static_cast<Eigen::Index>(cx->node[L][i]))
                              == doctest::Approx(w(static_cast<Eigen::Index>(cs.node[l][i]))).epsilon(1e-12));
                }
            }
        }
        // where both cutoffs vanish the bridge is all there is
        for (const auto& cx : m.x.charts) {
            const Vec bridge = m.x.to_symmetric(pullback(m.x, cx, m.spectra[cx.edge].kernel_basis() * edge_limit(m, coeff, cx.edge)));
            for (std::size_t l = 0; l < cx.layers(); ++l) {
                if (std::abs(cx.t_layer[l]) > 0.25) continue;
                for (std::size_t i = 0; i < cx.n_theta; ++i) {
                    const auto n = static_cast<Eigen::Index>(cx.node[l][i]);
                    CHECK(s(n) == doctest::Approx(bridge(n)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("splice errors")
{
    StretchedModel m = sphere3();
    m.r = 1.9;
    CHECK_THROWS_WITH_AS(splice(m, m.matching.coeffs.col(0)), doctest::Contains("ROutOfRange"), Error);

    const Geometry geo = fixtures::geometry("sphere");
    StretchedModel m6 = build_model(geo, 6.0);
    ApsOptions o;
    o.chart_r = 6.0;
    o.n_slabs = 12; // T = 3.6 < r
    m6.stars[0] = aps_kernel(geo, 0, ApsCondition::PBar, o);
    CHECK_THROWS_WITH_AS(splice(m6, m6.matching.coeffs.col(0)), doctest::Contains("TruncationTooShort"), Error);
}

TEST_CASE("theta closeness, injectivity and defect")
{
    const SpliceReport rep = splice_report(fixtures::geometry("theta"), {2.0, 4.0});
    REQUIRE(rep.points.size() == 2);
    double prev = 1.0;
    for (const auto& p : rep.points) {
        CHECK(p.dim_w == 6);
        CHECK(p.gram_min_sv >= 0.5);
        double worst = 0.0;
        for (double x : p.ratios) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
            CHECK(x <= 1.5 * p.bound);
            worst = std::max(worst, x);
        }
        CHECK(worst < prev);
        prev = worst;
        for (double d : p.defects) CHECK(d <= rep.defect_constant * std::exp(-p.lambda0 * (p.r - 1.0)) * (1 + 1e-12));
    }
    CHECK(rep.fitted_points == 2);
    CHECK(rep.decay_rate >= 0.8 * rep.points[0].lambda0 / 4.0);
}

TEST_CASE("torus projected spliced basis stays injective")
{
    const SpliceReport rep = splice_report(fixtures::geometry("torus"), {2.0, 3.0, 4.0});
    for (const auto& p : rep.points) {
        CHECK(p.dim_w == 4);
        CHECK(p.gram_min_sv >= 0.5);
    }
}

TEST_CASE("small eigenvalue scan")
{
    const ScanReport rep = small_eigenvalue_scan(fixtures::geometry("sphere"), {2.0, 4.0}, 0.5);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.kernel_dim == 2);
        CHECK(row.mu1 > 0.0);
        CHECK(row.scaled == doctest::Approx(row.mu1 * std::pow(row.r, 1.5)));
        CHECK_FALSE(row.violation);
    }
    CHECK(rep.violations == 0);
    CHECK(rep.slope >= -1.5);
    CHECK_THROWS_WITH_AS(small_eigenvalue_scan(fixtures::geometry("sphere"), {}, 0.5), doctest::Contains("ValidationError"),
                         Error);
}

TEST_CASE("gap experiment")
{
    const Geometry geo = fixtures::geometry("sphere");
    const GapReport rep = gap_experiment(geo, {2.0, 3.0}, 1.0);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.dim_e == 2);
        CHECK(row.dim_w == 2);
        CHECK(row.delta <= 1e-6);
    }
    CHECK_THROWS_WITH_AS(gap_experiment(geo, {2.0, 3.0}, 2.5), doctest::Contains("SOutOfRange"), Error);
}

TEST_CASE("restriction to vertices matches X0(s)")
{
    const StretchedModel& m = sphere3();
    const Restriction rs = restrict_complex(m.x, 1.0);
    const Mat one = Mat::Ones(static_cast<Eigen::Index>(m.x.size()), 1);
    CHECK(restrict_to_vertices(m.x, m.geo.graph, 1.0, one).rows() == static_cast<Eigen::Index>(rs.flat.size()));
}

TEST_CASE("least-squares slope")
{
    CHECK(fit_slope({1, 2, 3}, {5, 3, 1}) == doctest::Approx(-2.0));
    CHECK(std::isnan(fit_slope({1}, {1})));
}

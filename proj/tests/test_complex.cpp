#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "hodgelab/cech_derham.hpp"
#include "hodgelab/error.hpp"
#include "hodgelab/spectral.hpp"

using namespace hodgelab;

namespace {

std::vector<CircleSpec> circles(std::size_t k, std::size_t n = 16)
{
    return std::vector<CircleSpec>(k, CircleSpec{2.0 * std::numbers::pi, n});
}

long chi(const CellComplex& c) { return c.euler_characteristic(); }

// dense kernel dimension of the block-diagonal Laplacian
std::size_t dense_kernel(const SpMat& delta)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(delta), Eigen::EigenvaluesOnly);
    const double tol = 1e-9 * std::max(1.0, one_norm(delta));
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < tol) ++k;
    return k;
}

} // namespace

TEST_CASE("piece meshes have the right topology")
{
    const PieceTemplate cap = make_piece(PieceKind::Cap, circles(1), 0.3);
    const CellComplex cc = piece_complex(cap);
    CHECK(chi(cc) == 1);
    REQUIRE(cap.circles.size() == 1);
    CHECK(cap.circles[0].size() == 16);

    const CellComplex pc = piece_complex(make_piece(PieceKind::Pants, circles(3), 0.3));
    CHECK(chi(pc) == -1);
    CHECK(pc.open_circles.size() == 3);

    const PieceTemplate tube = make_piece(PieceKind::Tube, circles(2), 0.25, 1.0);
    const CellComplex tc = piece_complex(tube);
    CHECK(chi(tc) == 0);
    CHECK(tc.n2 == 4 * 16);
    for (const auto& f : tube.faces) CHECK(f.size() == 4);
}

TEST_CASE("piece edge lengths stay near the target")
{
    for (double h : {0.2, 0.3}) {
        for (PieceKind k : {PieceKind::Cap, PieceKind::Tube, PieceKind::Pants}) {
            const PieceTemplate p = make_piece(k, circles(piece_circle_count(k), 24), h);
            double lo = 1e9, hi = 0.0;
            for (std::size_t f = 0; f < p.faces.size(); ++f) {
                const auto& cs = p.coords[f];
                for (std::size_t i = 0; i < cs.size(); ++i) {
                    const double len = (cs[(i + 1) % cs.size()] - cs[i]).norm();
                    lo = std::min(lo, len);
                    hi = std::max(hi, len);
                }
            }
            INFO("kind " << std::string(piece_kind_name(k)) << " h " << h);
            CHECK(lo >= 0.5 * h);
            CHECK(hi <= 2.0 * h);
        }
    }
}

TEST_CASE("piece errors")
{
    CHECK_THROWS_AS(make_piece(PieceKind::Cap, circles(2), 0.3), Error);
    CHECK_THROWS_AS(make_piece(PieceKind::Cap, circles(1, 4), 0.3), Error);
    CHECK_THROWS_AS(make_piece(PieceKind::Pants, circles(3, 17), 0.3), Error);
    CHECK_THROWS_AS(make_piece(PieceKind::Cap, circles(1), 0.0), Error);
    std::vector<CircleSpec> mixed = circles(2);
    mixed[1].n_theta = 20;
    try {
        make_piece(PieceKind::Tube, mixed, 0.3);
        FAIL("expected ResolutionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ResolutionMismatch);
    }
}

TEST_CASE("assembled scenes")
{
    const struct {
        const char* name;
        long chi;
        std::size_t betti;
    } cases[] = {{"sphere", 2, 2}, {"torus", 0, 4}, {"theta", -2, 6}};
    for (const auto& cs : cases) {
        const Geometry g = fixtures::geometry(cs.name);
        for (double r : {1.0, 3.0}) {
            const CellComplex c = assemble(g, r);
            INFO(cs.name << " r=" << r);
            CHECK(chi(c) == cs.chi);
            long sum = 0;
            for (PieceKind k : g.kinds) sum += piece_euler_characteristic(k);
            CHECK(chi(c) == sum);
            CHECK(c.closed());
            const IntSpMat dd = c.d1 * c.d0;
            CHECK(IntSpMat(dd.pruned()).nonZeros() == 0);
            CHECK(c.mass().minCoeff() > 0.0);
            CHECK(c.label0.size() == c.n0);
            CHECK(c.label1.size() == c.n1);
            CHECK(c.label2.size() == c.n2);
            for (const auto& l : c.label2)
                if (l.kind == CellKind::Edge) CHECK(std::abs(l.t) <= r + 1e-12);
            for (const auto& ch : c.charts) CHECK(ch.slabs() == cylinder_slabs(r, g.h));
        }
    }
    CHECK_THROWS_AS(assemble(fixtures::geometry("sphere"), 0.5), Error);
}

TEST_CASE("kernel of the Laplacian matches the Betti numbers")
{
    for (const char* name : {"sphere", "torus"}) {
        const Geometry g = fixtures::geometry(name);
        const CellComplex c = assemble(g, 3.0);
        const GaussBonnetOperator op = operators(c);
        // D symmetric
        CHECK(SpMat(op.D - SpMat(op.D.transpose())).norm() < 1e-12 * op.D.norm());
        const std::vector<std::size_t> betti = predicted_betti_all(cohomology(preset_system(g.graph, g.kinds)));
        std::size_t total = 0;
        for (std::size_t b : betti) total += b;
        INFO(name);
        CHECK(dense_kernel(op.Delta) == total);
        CHECK(kernel_dimension(op.Delta).dim == total);
        EigenOptions o;
        o.psd = false;
        CHECK(kernel_dimension(op.D, -1.0, 1e3, 8, o).dim == total);
    }
}

TEST_CASE("restriction")
{
    const CellComplex c = assemble(fixtures::geometry("theta"), 2.0);
    const Restriction r0 = restrict_complex(c, 0.0);
    std::size_t vertex_cells = 0;
    for (const auto* labels : {&c.label0, &c.label1, &c.label2})
        for (const auto& l : *labels) vertex_cells += l.kind == CellKind::Vertex;
    CHECK(r0.flat.size() == vertex_cells);
    for (const auto& l : r0.complex.label2) CHECK(l.kind == CellKind::Vertex);

    const Restriction rr = restrict_complex(c, 2.0);
    CHECK(rr.flat.size() == c.size());

    // norm split over kept cells
    const Restriction rh = restrict_complex(c, 1.0);
    Vec x = Vec::LinSpaced(static_cast<Eigen::Index>(c.size()), -1.0, 2.0);
    const Vec kept = restrict_vector(rh, x);
    double direct = 0.0;
    for (std::size_t i : rh.flat) direct += x(static_cast<Eigen::Index>(i)) * x(static_cast<Eigen::Index>(i));
    CHECK(kept.squaredNorm() == doctest::Approx(direct).epsilon(1e-14));
    CHECK(rh.flat.size() < c.size());
    CHECK(rh.flat.size() > r0.flat.size());
    const IntSpMat dd = rh.complex.d1 * rh.complex.d0;
    CHECK(IntSpMat(dd.pruned()).nonZeros() == 0);
    for (std::size_t comp : rh.component) CHECK(comp < 2);

    CHECK_THROWS_AS(restrict_complex(c, -0.1), Error);
    CHECK_THROWS_AS(restrict_complex(c, 2.5), Error);
}

TEST_CASE("hodge star")
{
    const CellComplex c = assemble(fixtures::geometry("sphere"), 2.0);
    const SpMat s0 = hodge_star(c, 0);
    const Vec one = Vec::Ones(static_cast<Eigen::Index>(c.n0));
    const Vec vol = s0 * one;
    CHECK((vol - c.m0).cwiseAbs().maxCoeff() < 1e-14);
    // isometry between the mass norm and the dual norm (dual mass = 1/m)
    for (int k = 0; k <= 2; ++k) {
        const Vec& m = k == 0 ? c.m0 : (k == 1 ? c.m1 : c.m2);
        Vec u = Vec::LinSpaced(m.size(), 0.5, 1.5);
        const Vec su = hodge_star(c, k) * u;
        const double nu = u.dot(m.cwiseProduct(u));
        const double ns = su.dot(m.cwiseInverse().cwiseProduct(su));
        CHECK(std::abs(nu - ns) < 1e-10 * nu);
        const Vec back = hodge_star_inverse(c, k) * su;
        const double sign = (k * (2 - k)) % 2 ? -1.0 : 1.0;
        CHECK((dual_hodge_star(c, k) * su - sign * u).norm() < 1e-12 * u.norm());
        CHECK((back - u).norm() < 1e-12 * u.norm());
    }
}

TEST_CASE("star carries the dtheta harmonic form to the dt one on the torus")
{
    const Geometry g = fixtures::geometry("torus");
    const CellComplex c = assemble(g, 3.0);
    const GaussBonnetOperator op = operators(c);
    const auto n0 = static_cast<Eigen::Index>(c.n0), n1 = static_cast<Eigen::Index>(c.n1);
    const Mat delta1 = Mat(op.Delta).block(n0, n0, n1, n1);
    Eigen::SelfAdjointEigenSolver<Mat> es(delta1);
    REQUIRE(es.eigenvalues()(1) < 1e-9);
    REQUIRE(es.eigenvalues()(2) > 1e-3);
    const Mat harm = es.eigenvectors().leftCols(2); // symmetric coordinates
    const Vec sq = c.m1.cwiseSqrt();

    // templates: theta-edges carry h_theta, t-edges carry tau (raw)
    Vec dtheta = Vec::Zero(n1), dt = Vec::Zero(n1);
    for (const auto& ch : c.charts) {
        for (std::size_t j = 0; j < ch.layers(); ++j)
            for (std::size_t i = 0; i < ch.n_theta; ++i)
                dtheta(static_cast<Eigen::Index>(ch.theta_edge[j][i])) = ch.h_theta * ch.theta_sign[j][i];
        for (std::size_t j = 0; j < ch.slabs(); ++j)
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                const auto e = static_cast<Eigen::Index>(ch.t_edge[j][i]);
                const int sgn = c.d0.coeff(static_cast<int>(e), static_cast<int>(ch.node[j + 1][i]));
                dt(e) = ch.tau * sgn;
            }
    }
    auto harmonic = [&](const Vec& raw) {
        const Vec s = harm * (harm.transpose() * raw.cwiseProduct(sq));
        return Vec(s.cwiseQuotient(sq));
    };
    const Vec a = harmonic(dtheta), b = harmonic(dt);

    const std::vector<std::size_t> cells = chart_edge_cells(c);
    const Vec sa = cylinder_star_transfer(c, a);
    Vec diff_p(static_cast<Eigen::Index>(cells.size())), diff_m(diff_p.size()), ref(diff_p.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto e = static_cast<Eigen::Index>(cells[k]);
        const auto kk = static_cast<Eigen::Index>(k);
        diff_p(kk) = sa(e) - b(e);
        diff_m(kk) = sa(e) + b(e);
        ref(kk) = b(e);
    }
    const double err = std::min(diff_p.norm(), diff_m.norm()) / ref.norm();
    CHECK(err <= 5.0 * g.h * g.h);
}

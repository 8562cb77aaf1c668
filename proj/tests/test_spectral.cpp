#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "hodgelab/error.hpp"
#include "hodgelab/spectral.hpp"

using namespace hodgelab;

namespace {

SpMat cycle_laplacian(int n)
{
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        t.emplace_back(i, (i + 1) % n, -1.0);
        t.emplace_back((i + 1) % n, i, -1.0);
    }
    SpMat a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SpMat diagonal(const std::vector<double>& d)
{
    SpMat a(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) a.insert(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return a;
}

Vec random_vec(std::mt19937_64& rng, Eigen::Index n)
{
    std::normal_distribution<double> nd;
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

} // namespace

TEST_CASE("cycle laplacian smallest nonzero eigenvalue")
{
    const int n = 100;
    const SpMat a = cycle_laplacian(n);
    // big enough to take the Krylov path
    const EigenResult r = smallest_eigenpairs(a, 3);
    REQUIRE(r.values.size() == 3);
    const double exact = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / n);
    CHECK(std::abs(r.values(0)) < 1e-9);
    CHECK(std::abs(r.values(1) - exact) / exact < 1e-8);
    CHECK(std::abs(r.values(2) - exact) / exact < 1e-8);

    const SpMat big = cycle_laplacian(2000);
    const EigenResult rb = smallest_eigenpairs(big, 5);
    CHECK(rb.shift_invert);
    const double e1 = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / 2000);
    const double e2 = 2.0 - 2.0 * std::cos(4.0 * std::numbers::pi / 2000);
    CHECK(std::abs(rb.values(1) - e1) / e1 < 1e-8);
    CHECK(std::abs(rb.values(3) - e2) / e2 < 1e-8);
    const Mat g = rb.vectors.transpose() * rb.vectors;
    CHECK((g - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("identity operator")
{
    const SpMat a = diagonal(std::vector<double>(300, 1.0));
    const EigenResult r = smallest_eigenpairs(a, 3);
    for (int i = 0; i < 3; ++i) CHECK(r.values(i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scene complex against dense oracle")
{
    const CellComplex c = assemble(fixtures::geometry("torus"), 3.0);
    REQUIRE(c.size() <= 2000);
    const GaussBonnetOperator op = operators(c);
    Eigen::SelfAdjointEigenSolver<Mat> dense{Mat(op.Delta)};

    const EigenResult r = smallest_eigenpairs(op.Delta, 12);
    CHECK(r.shift_invert);
    const double scale = one_norm(op.Delta);
    for (int i = 0; i < 12; ++i) {
        const double ref = dense.eigenvalues()(i);
        CHECK(std::abs(r.values(i) - ref) <= 1e-8 * std::max(std::abs(ref), 1e-4 * scale));
        CHECK(r.residuals(i) <= 1e-10 * scale);
    }

    // indefinite D: eigenvalues +-sqrt of those of Delta
    EigenOptions o;
    o.psd = false;
    const EigenResult rd = smallest_eigenpairs(op.D, 10, o);
    Eigen::SelfAdjointEigenSolver<Mat> dd{Mat(op.D)};
    std::vector<double> mags;
    for (Eigen::Index i = 0; i < dd.eigenvalues().size(); ++i) mags.push_back(std::abs(dd.eigenvalues()(i)));
    std::sort(mags.begin(), mags.end());
    for (int i = 0; i < 10; ++i) {
        const double ref = mags[static_cast<std::size_t>(i)];
        CHECK(std::abs(std::abs(rd.values(i)) - ref) <= 1e-8 * std::max(ref, 1e-4 * one_norm(op.D)));
    }
}

TEST_CASE("kernel dimension")
{
    const EigenResult r = smallest_eigenpairs(diagonal({0.0, 0.0, 1.0}), 3);
    const KernelReport k = kernel_dimension(r, 1e-9);
    CHECK(k.dim == 2);
    CHECK(k.gap_ratio >= 1e3);

    const KernelReport kt = kernel_dimension(operators(assemble(fixtures::geometry("torus"), 3.0)).Delta);
    CHECK(kt.dim == 4);
    CHECK(kt.gap_ratio > 1e3);

    // a small eigenvalue hiding just above the threshold is ambiguous
    CHECK_THROWS_AS(kernel_dimension(smallest_eigenpairs(diagonal({0.0, 1e-8, 1.0}), 3), 1e-9), Error);
    try {
        kernel_dimension(smallest_eigenpairs(diagonal({0.0, 1e-8, 1.0}), 3), 1e-9);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AmbiguousKernel);
    }
}

TEST_CASE("projection properties")
{
    const SpMat a = cycle_laplacian(400);
    const EigenResult r = smallest_eigenpairs(a, 8);
    const SubspaceBasis span = spectral_subspace(r, 1e-3, "cycle");
    CHECK(span.dim() == 5); // 0, and two pairs below 1e-3
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec u = random_vec(rng, 400);
        const Vec w = random_vec(rng, 400);
        const Vec pu = spectral_projection(span, u);
        CHECK((spectral_projection(span, pu) - pu).norm() < 1e-10 * pu.norm());
        CHECK(pu.norm() <= u.norm());
        CHECK(std::abs(pu.dot(w) - u.dot(spectral_projection(span, w))) < 1e-10 * u.norm() * w.norm());
        const Vec perp = u - pu;
        CHECK(spectral_projection(span, perp).norm() < 1e-10 * u.norm());
    }
    CHECK_THROWS_AS(spectral_subspace(r, 10.0), Error);
    CHECK_THROWS_AS(spectral_projection(span, Vec::Ones(3)), Error);
}

TEST_CASE("kato gap")
{
    const Mat e1 = Mat::Identity(2, 2).col(0), e2 = Mat::Identity(2, 2).col(1);
    const SubspaceBasis a = orthonormalize(e1), b = orthonormalize(e2);
    CHECK(kato_gap(a, a) == doctest::Approx(0.0));
    CHECK(kato_gap(a, b) == doctest::Approx(1.0));

    // asymmetry: a line inside a plane
    Mat plane = Mat::Zero(3, 2);
    plane(0, 0) = 1.0;
    plane(1, 1) = 1.0;
    Mat line = Mat::Zero(3, 1);
    line(0, 0) = 1.0;
    line(1, 0) = 1.0;
    const SubspaceBasis pl = orthonormalize(plane), ln = orthonormalize(line);
    CHECK(kato_gap(ln, pl) < 1e-8);
    CHECK(kato_gap(pl, ln) == doctest::Approx(1.0));

    // delta < 1 forces dim A <= dim B on random pairs
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int da = 1 + trial % 3, db = 1 + (trial / 3) % 3;
        Mat ma(6, da), mb(6, db);
        for (int j = 0; j < da; ++j) ma.col(j) = random_vec(rng, 6);
        for (int j = 0; j < db; ++j) mb.col(j) = random_vec(rng, 6);
        const double d = kato_gap(orthonormalize(ma), orthonormalize(mb));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        if (d < 1.0 - 1e-9) CHECK(da <= db);
    }
    CHECK_THROWS_AS(kato_gap(a, orthonormalize(Mat::Identity(3, 1))), Error);
    CHECK_THROWS_AS(kato_gap(orthonormalize(e1, "x"), orthonormalize(e1, "y")), Error);
}

TEST_CASE("determinism under a fixed seed")
{
    const SpMat a = cycle_laplacian(1500);
    EigenOptions o;
    o.seed = 99;
    const EigenResult r1 = smallest_eigenpairs(a, 6, o);
    const EigenResult r2 = smallest_eigenpairs(a, 6, o);
    CHECK(r1.seed == 99);
    for (int i = 0; i < 6; ++i) CHECK(r1.values(i) == r2.values(i));
    CHECK(r1.vectors == r2.vectors);
}

TEST_CASE("invalid requests")
{
    CHECK_THROWS_AS(smallest_eigenpairs(diagonal({1.0, 2.0}), 0), Error);
}

#include "hodgelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <memory>
#include <random>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "hodgelab/error.hpp"

namespace hodgelab {

double one_norm(const SpMat& a)
{
    double best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

namespace {

using Apply = std::function<Mat(const Mat&)>;

struct Krylov {
    Mat values;
    Mat vectors;
};

Mat random_block(std::mt19937_64& rng, Eigen::Index n, Eigen::Index b)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat x(n, b);
    for (Eigen::Index j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = nd(rng);
    return x;
}

// Orthonormalize the columns of w against basis[:, :filled] and each other.
// Returns R with w = Q R (restricted to the new directions); columns that
// collapse are replaced by random directions with a zero R column.
Mat orthonormalize_block(Mat& w, const Mat& basis, Eigen::Index filled, std::mt19937_64& rng, std::size_t& breakdowns,
                         std::size_t& reorth)
{
    const Eigen::Index b = w.cols();
    Mat r = Mat::Zero(b, b);
    for (Eigen::Index c = 0; c < b; ++c) {
        Vec v = w.col(c);
        const double before = v.norm();
        for (int pass = 0; pass < 2; ++pass) {
            if (filled > 0) v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
            for (Eigen::Index k = 0; k < c; ++k) {
                const double h = w.col(k).dot(v);
                r(k, c) += h;
                v -= h * w.col(k);
            }
            ++reorth;
        }
        double nrm = v.norm();
        if (nrm <= 1e-10 * std::max(before, 1e-300) || nrm == 0.0) {
            ++breakdowns;
            for (int attempt = 0; attempt < 3; ++attempt) {
                v = random_block(rng, w.rows(), 1).col(0);
                for (int pass = 0; pass < 2; ++pass) {
                    if (filled > 0) v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
                    for (Eigen::Index k = 0; k < c; ++k) v -= w.col(k).dot(v) * w.col(k);
                }
                if (v.norm() > 1e-8) break;
            }
            for (Eigen::Index k = 0; k < c; ++k) r(k, c) = r(k, c); // coefficients kept
            nrm = v.norm();
            w.col(c) = v / nrm;
            r(c, c) = 0.0;
            continue;
        }
        r(c, c) = nrm;
        w.col(c) = v / nrm;
    }
    return r;
}

// Eigenpairs of largest magnitude of the symmetric operator `op`, block Krylov-Schur.
// Convergence is judged on the residual of A at the Rayleigh quotient.
EigenResult largest_of(const Apply& op, const SpMat& a, Eigen::Index m, const EigenOptions& opts)
{
    const Eigen::Index n = a.rows();
    const double norm_a = std::max(one_norm(a), 1e-300);
    EigenResult res;
    res.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);

    const Eigen::Index b = std::clamp<Eigen::Index>(m, 2, 16);
    // keep m + b Ritz vectors and grow by three blocks between restarts
    const Eigen::Index p = std::min(m + 5 * b, n);
    const Eigen::Index bb = std::min(b, p);

    Mat v = Mat::Zero(n, p);
    Mat h = Mat::Zero(p, p);
    {
        Mat x = random_block(rng, n, bb);
        orthonormalize_block(x, v, 0, rng, res.breakdowns, res.reorthogonalizations);
        v.leftCols(bb) = x;
    }
    Eigen::Index filled = bb, j0 = 0;

    for (std::size_t restart = 0;; ++restart) {
        Mat f;
        while (true) {
            Mat w = op(v.middleCols(j0, bb));
            for (int pass = 0; pass < 2; ++pass) {
                const Mat c = v.leftCols(filled).transpose() * w;
                w -= v.leftCols(filled) * c;
                h.block(0, j0, filled, bb) += c;
                ++res.reorthogonalizations;
            }
            if (filled + bb > p) {
                f = w;
                break;
            }
            const Mat r = orthonormalize_block(w, v, filled, rng, res.breakdowns, res.reorthogonalizations);
            v.middleCols(filled, bb) = w;
            h.block(filled, j0, bb, bb) = r;
            j0 = filled;
            filled += bb;
        }
        const Eigen::Index pf = filled;
        const Mat hs = 0.5 * (h.topLeftCorner(pf, pf) + h.topLeftCorner(pf, pf).transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(hs);
        // descending magnitude
        std::vector<Eigen::Index> by_mag(static_cast<std::size_t>(pf));
        std::iota(by_mag.begin(), by_mag.end(), 0);
        std::stable_sort(by_mag.begin(), by_mag.end(), [&](Eigen::Index i, Eigen::Index j) {
            return std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(j));
        });
        Mat y(pf, pf);
        Vec theta(pf);
        for (Eigen::Index i = 0; i < pf; ++i) {
            y.col(i) = es.eigenvectors().col(by_mag[static_cast<std::size_t>(i)]);
            theta(i) = es.eigenvalues()(by_mag[static_cast<std::size_t>(i)]);
        }

        const Eigen::Index mm = std::min(m, pf);
        // Rayleigh-Ritz with A itself over a margin of Ritz vectors: separates
        // pairs Op cannot tell apart and keeps clusters whole across the cut
        const Eigen::Index mr = std::min(pf, mm + bb);
        Mat x;
        {
            const Mat xr = v.leftCols(pf) * y.leftCols(mr);
            const Mat g = xr.transpose() * (a * xr);
            Eigen::SelfAdjointEigenSolver<Mat> ga(0.5 * (g + g.transpose()));
            std::vector<Eigen::Index> order(static_cast<std::size_t>(mr));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
                return std::abs(ga.eigenvalues()(i)) < std::abs(ga.eigenvalues()(j));
            });
            x.resize(n, mm);
            for (Eigen::Index i = 0; i < mm; ++i) x.col(i) = xr * ga.eigenvectors().col(order[static_cast<std::size_t>(i)]);
        }
        const Mat ax = a * x;
        Vec lam(mm), rn(mm);
        bool ok = true;
        for (Eigen::Index i = 0; i < mm; ++i) {
            lam(i) = x.col(i).dot(ax.col(i));
            rn(i) = (ax.col(i) - lam(i) * x.col(i)).norm();
            if (rn(i) > opts.tol * norm_a) ok = false;
        }
        res.restarts = restart;
        if (ok || pf == n || restart >= opts.max_restarts) {
            if (!ok && pf < n)
                throw Error(ErrorCode::NoConvergence, "eigensolver hit the restart cap; worst residual "
                                                          + std::to_string(rn.maxCoeff() / norm_a));
            res.values = lam;
            res.vectors = x;
            res.residuals = rn;
            return res;
        }

        // thick restart: keep k Ritz vectors plus the normalized residual block
        const Eigen::Index k = std::min(mm + bb, pf - 2 * bb);
        Mat q = f;
        const Mat rf = orthonormalize_block(q, v, pf, rng, res.breakdowns, res.reorthogonalizations);
        Mat vn = Mat::Zero(n, p);
        vn.leftCols(k) = v.leftCols(pf) * y.leftCols(k);
        vn.middleCols(k, bb) = q;
        Mat hn = Mat::Zero(p, p);
        for (Eigen::Index i = 0; i < k; ++i) hn(i, i) = theta(i);
        hn.block(k, 0, bb, k) = rf * y.block(pf - bb, 0, bb, k);
        v = vn;
        h = hn;
        filled = k + bb;
        j0 = k;
    }
}

EigenResult dense_smallest(const SpMat& a, Eigen::Index m, const EigenOptions& opts)
{
    Eigen::SelfAdjointEigenSolver<Mat> es{Mat(a)};
    EigenResult r;
    r.seed = opts.seed;
    const Eigen::Index n = a.rows();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) {
        return std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(j));
    });
    r.values.resize(m);
    r.vectors.resize(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        r.values(k) = es.eigenvalues()(idx[static_cast<std::size_t>(k)]);
        r.vectors.col(k) = es.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
    }
    r.residuals = (a * r.vectors - r.vectors * r.values.asDiagonal()).colwise().norm().transpose();
    return r;
}

EigenResult solve_smallest(const SpMat& a, Eigen::Index m, const EigenOptions& opts)
{
    const Eigen::Index n = a.rows();
    const Eigen::Index b = std::clamp<Eigen::Index>(m, 2, 16);
    if (n <= std::max(4 * std::max<Eigen::Index>(m, 16), m + 6 * b)) return dense_smallest(a, m, opts);
    const double norm_a = one_norm(a);
    const double shift = 1e-6 * std::max(norm_a, 1e-300);
    SpMat eye(n, n);
    eye.setIdentity();
    const SpMat shifted = a + shift * eye;
    const bool psd = opts.psd;
    EigenResult r;
    bool factored = false;
    if (psd) {
        auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
        ldlt->compute(shifted);
        if (ldlt->info() == Eigen::Success) {
            r = largest_of(
                [ldlt, &shifted](const Mat& x) {
                    // one refinement step keeps the solve accurate near the kernel
                    Mat y = ldlt->solve(x);
                    y += ldlt->solve(Mat(x - shifted * y));
                    return y;
                },
                a, m, opts);
            factored = true;
        }
    } else {
        // zero diagonal blocks need pivoting
        auto lu = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
        lu->compute(shifted);
        if (lu->info() == Eigen::Success) {
            r = largest_of(
                [lu, &shifted](const Mat& x) {
                    Mat y = lu->solve(x);
                    y += Mat(lu->solve(Mat(x - shifted * y)));
                    return y;
                },
                a, m, opts);
            factored = true;
        }
    }
    if (factored) {
        r.shift_invert = true;
    } else if (psd) {
        const double c = norm_a;
        r = largest_of([&a, c](const Mat& x) { return Mat(c * x - a * x); }, a, m, opts);
    } else {
        const double c2 = norm_a * norm_a;
        r = largest_of([&a, c2](const Mat& x) { return Mat(c2 * x - a * (a * x)); }, a, m, opts);
    }
    return r;
}

void sort_by_magnitude(EigenResult& r)
{
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(r.values.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double a = std::abs(r.values(i)), b = std::abs(r.values(j));
        if (a != b) return a < b;
        return r.values(i) < r.values(j);
    });
    Vec v(r.values.size()), res(r.values.size());
    Mat x(r.vectors.rows(), r.vectors.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        v(kk) = r.values(idx[k]);
        res(kk) = r.residuals(idx[k]);
        x.col(kk) = r.vectors.col(idx[k]);
    }
    r.values = v;
    r.residuals = res;
    r.vectors = x;
}

} // namespace

EigenResult smallest_eigenpairs(const SpMat& a, std::size_t m, const EigenOptions& opts)
{
    if (m == 0) throw Error(ErrorCode::ValidationError, "need at least one eigenpair");
    if (a.rows() != a.cols()) throw Error(ErrorCode::ValidationError, "operator must be square");
    const auto n = a.rows();
    const Eigen::Index mm = std::min<Eigen::Index>(static_cast<Eigen::Index>(m), n);
    EigenResult r = solve_smallest(a, mm, opts);
    const double bound = opts.tol * std::max(one_norm(a), 1e-300);
    for (Eigen::Index i = 0; i < r.residuals.size(); ++i)
        if (!(r.residuals(i) <= bound))
            throw Error(ErrorCode::NoConvergence, "residual contract violated for pair " + std::to_string(i));
    sort_by_magnitude(r);
    return r;
}

double default_kernel_tol(const SpMat& a)
{
    return std::max(1e-9, 100.0 * std::numeric_limits<double>::epsilon() * one_norm(a));
}

KernelReport kernel_dimension(const EigenResult& eig, double tol_abs, double gap_ratio)
{
    KernelReport k;
    k.tol_abs = tol_abs;
    k.eig = eig;
    const auto n = eig.values.size();
    Eigen::Index c = 0;
    while (c < n && std::abs(eig.values(c)) < tol_abs) ++c;
    k.dim = static_cast<std::size_t>(c);
    if (c == n)
        throw Error(ErrorCode::AmbiguousKernel, "all " + std::to_string(n) + " computed values lie below tol_abs");
    k.first_rejected = std::abs(eig.values(c));
    k.last_accepted = c > 0 ? std::abs(eig.values(c - 1)) : 0.0;
    k.gap_ratio = k.first_rejected / std::max(k.last_accepted, tol_abs);
    if (k.gap_ratio < gap_ratio)
        throw Error(ErrorCode::AmbiguousKernel, "gap ratio " + std::to_string(k.gap_ratio) + " below "
                                                    + std::to_string(gap_ratio) + " (kernel candidates "
                                                    + std::to_string(c) + ")");
    return k;
}

KernelReport kernel_dimension(const SpMat& a, double tol_abs, double gap_ratio, std::size_t m0, const EigenOptions& opts)
{
    if (tol_abs <= 0.0) tol_abs = default_kernel_tol(a);
    std::size_t m = std::max<std::size_t>(m0, 2);
    const auto n = static_cast<std::size_t>(a.rows());
    while (true) {
        const EigenResult eig = smallest_eigenpairs(a, std::min(m, n), opts);
        std::size_t below = 0;
        while (below < static_cast<std::size_t>(eig.values.size()) && std::abs(eig.values(below)) < tol_abs) ++below;
        if (below < static_cast<std::size_t>(eig.values.size()) || m >= n) return kernel_dimension(eig, tol_abs, gap_ratio);
        m *= 2;
    }
}

SubspaceBasis orthonormalize(const Mat& cols, const std::string& ambient, double rel_tol)
{
    SubspaceBasis s;
    s.ambient = ambient;
    if (cols.cols() == 0) {
        s.q = Mat(cols.rows(), 0);
        return s;
    }
    Eigen::BDCSVD<Mat> svd(cols, Eigen::ComputeThinU);
    const Vec& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rel_tol * std::max(sv(0), 1e-300)) ++r;
    if (sv(0) == 0.0) r = 0;
    s.q = svd.matrixU().leftCols(r);
    return s;
}

SubspaceBasis spectral_subspace(const EigenResult& eig, double cutoff, const std::string& ambient)
{
    Eigen::Index c = 0;
    while (c < eig.values.size() && std::abs(eig.values(c)) <= cutoff) ++c;
    if (c == eig.values.size())
        throw Error(ErrorCode::UnresolvedSpectrum, "no computed eigenvalue above the cutoff " + std::to_string(cutoff));
    SubspaceBasis s;
    s.ambient = ambient;
    s.q = eig.vectors.leftCols(c);
    return s;
}

Vec spectral_projection(const SubspaceBasis& span, const Vec& u)
{
    if (span.q.rows() != u.size()) throw Error(ErrorCode::AmbientMismatch, "vector and subspace live in different spaces");
    return span.q * (span.q.transpose() * u);
}

double kato_gap(const SubspaceBasis& a, const SubspaceBasis& b)
{
    if (a.q.rows() != b.q.rows() || (!a.ambient.empty() && !b.ambient.empty() && a.ambient != b.ambient))
        throw Error(ErrorCode::AmbientMismatch, "subspaces live in different spaces");
    if (a.dim() == 0) return 0.0;
    if (b.dim() == 0) return 1.0;
    const Mat e = a.q - b.q * (b.q.transpose() * a.q);
    Eigen::SelfAdjointEigenSolver<Mat> es(e.transpose() * e, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return std::clamp(std::sqrt(std::max(top, 0.0)), 0.0, 1.0);
}

} // namespace hodgelab

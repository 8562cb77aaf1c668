#include "hodgelab/exact.hpp"

#include <utility>

namespace hodgelab {

QMatrix to_rational(const IntMatrix& m)
{
    QMatrix q(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = Rational(m(i, j));
    return q;
}

namespace {

// Clear denominators row by row so Bareiss can run over the integers.
ExactMatrix<BigInt> integer_scaled(const QMatrix& m)
{
    ExactMatrix<BigInt> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        BigInt l = 1;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const BigInt d = boost::multiprecision::denominator(m(i, j));
            l = l / boost::multiprecision::gcd(l, d) * d;
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const Rational v = m(i, j) * Rational(l);
            out(i, j) = boost::multiprecision::numerator(v);
        }
    }
    return out;
}

std::size_t bareiss_rank(ExactMatrix<BigInt> a)
{
    const std::size_t n = a.rows(), m = a.cols();
    BigInt prev = 1;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m && row < n; ++col) {
        std::size_t p = row;
        while (p < n && a(p, col) == 0) ++p;
        if (p == n) continue;
        if (p != row)
            for (std::size_t j = 0; j < m; ++j) std::swap(a(p, j), a(row, j));
        for (std::size_t i = row + 1; i < n; ++i) {
            for (std::size_t j = col + 1; j < m; ++j)
                a(i, j) = (a(row, col) * a(i, j) - a(i, col) * a(row, j)) / prev;
            a(i, col) = 0;
        }
        prev = a(row, col);
        ++row;
    }
    return row;
}

} // namespace

std::size_t exact_rank(const QMatrix& m) { return bareiss_rank(integer_scaled(m)); }

std::size_t exact_rank(const IntMatrix& m) { return exact_rank(to_rational(m)); }

EchelonForm reduced_echelon(const QMatrix& m)
{
    EchelonForm out{m, {}};
    QMatrix& a = out.reduced;
    const std::size_t n = a.rows(), c = a.cols();
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < n; ++col) {
        std::size_t p = row;
        while (p < n && a(p, col) == 0) ++p;
        if (p == n) continue;
        if (p != row)
            for (std::size_t j = 0; j < c; ++j) std::swap(a(p, j), a(row, j));
        const Rational piv = a(row, col);
        for (std::size_t j = col; j < c; ++j) a(row, j) /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a(i, col) == 0) continue;
            const Rational f = a(i, col);
            for (std::size_t j = col; j < c; ++j) a(i, j) -= f * a(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    return out;
}

QMatrix kernel_basis(const QMatrix& m)
{
    const EchelonForm e = reduced_echelon(m);
    const std::size_t c = m.cols();
    std::vector<bool> is_pivot(c, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < c; ++j)
        if (!is_pivot[j]) free_cols.push_back(j);

    QMatrix k(c, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        const std::size_t j = free_cols[f];
        k(j, f) = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) k(e.pivots[r], f) = -e.reduced(r, j);
    }
    return k;
}

} // namespace hodgelab

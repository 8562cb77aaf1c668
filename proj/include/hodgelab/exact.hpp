#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hodgelab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix over an exact ring.
template <typename T>
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    ExactMatrix transpose() const
    {
        ExactMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const
    {
        for (const auto& x : data_)
            if (x != 0) return false;
        return true;
    }

    bool operator==(const ExactMatrix& o) const
    {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = ExactMatrix<long long>;
using QMatrix = ExactMatrix<Rational>;

QMatrix to_rational(const IntMatrix& m);

/// Rank by fraction-free (Bareiss) elimination on the integer-scaled matrix.
std::size_t exact_rank(const QMatrix& m);
std::size_t exact_rank(const IntMatrix& m);

struct EchelonForm {
    QMatrix reduced;                 ///< reduced row echelon form
    std::vector<std::size_t> pivots; ///< pivot column of each nonzero row
};

EchelonForm reduced_echelon(const QMatrix& m);

/// Kernel basis as columns; one vector per free column of the reduced
/// echelon form, with a 1 in that free slot (canonical, deterministic).
QMatrix kernel_basis(const QMatrix& m);

} // namespace hodgelab

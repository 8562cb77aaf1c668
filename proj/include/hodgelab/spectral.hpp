#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hodgelab/cross_section.hpp"

namespace hodgelab {

struct EigenOptions {
    double tol = 1e-10;          ///< residual tolerance relative to the 1-norm of A
    std::uint64_t seed = 12345;
    bool psd = true;             ///< A known positive semidefinite
    std::size_t max_restarts = 400;
};

/// Eigenpairs sorted by |value| ascending; vectors orthonormal (symmetric
/// coordinates, so the mass inner product is the Euclidean one).
struct EigenResult {
    Vec values;
    Mat vectors;
    Vec residuals;
    std::size_t restarts = 0;
    std::size_t reorthogonalizations = 0;
    std::size_t breakdowns = 0;
    bool shift_invert = false;
    std::uint64_t seed = 0;
};

double one_norm(const SpMat& a);

/// Block Krylov-Schur Lanczos with full reorthogonalization. PSD operators
/// use shift-invert around zero; indefinite ones are solved through A^2 and a
/// final Rayleigh-Ritz step with A.
EigenResult smallest_eigenpairs(const SpMat& a, std::size_t m, const EigenOptions& opts = {});

struct KernelReport {
    std::size_t dim = 0;
    double tol_abs = 0.0;
    double gap_ratio = 0.0;       ///< observed ratio
    double last_accepted = 0.0;
    double first_rejected = 0.0;
    EigenResult eig;
};

double default_kernel_tol(const SpMat& a);

/// Count eigenvalues below tol_abs from an existing result; AmbiguousKernel
/// when no clean gap separates them from the rest.
KernelReport kernel_dimension(const EigenResult& eig, double tol_abs, double gap_ratio = 1e3);

/// Solve for more eigenpairs until the kernel is bounded by a rejected value.
KernelReport kernel_dimension(const SpMat& a, double tol_abs = -1.0, double gap_ratio = 1e3, std::size_t m0 = 8,
                              const EigenOptions& opts = {});

struct SubspaceBasis {
    Mat q;
    std::string ambient;
    std::size_t dim() const { return static_cast<std::size_t>(q.cols()); }
};

/// Orthonormal basis of span(cols), dropping directions below rel_tol.
SubspaceBasis orthonormalize(const Mat& cols, const std::string& ambient = "", double rel_tol = 1e-10);

/// Eigenvectors with |value| <= cutoff; UnresolvedSpectrum unless some
/// computed value exceeds the cutoff.
SubspaceBasis spectral_subspace(const EigenResult& eig, double cutoff, const std::string& ambient = "");

Vec spectral_projection(const SubspaceBasis& span, const Vec& u);

/// sup over unit a in A of dist(a, B).
double kato_gap(const SubspaceBasis& a, const SubspaceBasis& b);

} // namespace hodgelab

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hodgelab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Spectral data of the doubled circle operator on F = u0 (+) u1, laid out as
/// [u0 nodes | u0 edges | u1 nodes | u1 edges], each block of size N, in
/// mass-symmetrized coordinates.
///
/// Column j < 2N is a mode with value >= 0 (kernel abs0, abs1 first, then
/// positive values ascending); column j + 2N is sigma times column j.
struct CrossSectionSpectrum {
    std::string id;
    double circumference = 0.0;
    std::size_t n_theta = 0;
    double spacing = 0.0;

    Vec values;
    Mat vectors; ///< empty when built without vectors
    std::size_t kernel_dim = 0;

    SpMat d_e;   ///< circle operator on (nodes, edges), size 2N
    SpMat sigma; ///< size 4N
    SpMat d_hat; ///< size 4N

    std::size_t size() const { return 4 * n_theta; }

    /// Canonical kernel basis, columns [abs0, abs1, rel0, rel1].
    Mat kernel_basis() const;

    /// Index of a column within the 4N layout.
    std::size_t u0_node(std::size_t i) const { return i; }
    std::size_t u0_edge(std::size_t i) const { return n_theta + i; }
    std::size_t u1_node(std::size_t i) const { return 2 * n_theta + i; }
    std::size_t u1_edge(std::size_t i) const { return 3 * n_theta + i; }
};

CrossSectionSpectrum discrete_cross_section(double circumference, std::size_t n_theta, bool with_vectors = true,
                                            const std::string& id = "");

/// Smallest nonzero |value| over all edges.
double spectral_gap(const std::vector<CrossSectionSpectrum>& spectra);

/// Smallest nonzero |value| of one spectrum, known in closed form.
double smallest_nonzero(const CrossSectionSpectrum& s);

/// Number of values in [0, lambda], with multiplicity.
std::size_t weyl_counting(const CrossSectionSpectrum& s, double lambda);

struct WeylFit {
    double exponent = 0.0;       ///< slope of log lambda against log N
    double constant = 0.0;       ///< lambda ~ constant * N^exponent
    double counting_slope = 0.0; ///< slope of N(lambda) against lambda
    std::size_t modes_used = 0;
};

WeylFit weyl_fit(const CrossSectionSpectrum& s, std::size_t k_modes);

/// Fourier prediction of the counting slope: 4 L / (2 pi).
double weyl_counting_oracle(double circumference);

struct BoundaryConditionSpace {
    std::string edge;
    int side = 1;
    bool with_kernel = false;
    std::vector<std::size_t> positive;
    std::vector<std::size_t> negative;
    std::vector<std::size_t> zero;
    std::vector<std::size_t> selected;
};

BoundaryConditionSpace boundary_condition(const CrossSectionSpectrum& s, int side, bool with_kernel);

/// Hodge star on limiting-value coefficients [abs0, abs1, rel0, rel1]:
/// 1 -> vol, d theta -> dt, dt -> -d theta, vol -> 1.
Eigen::Matrix4d circle_kernel_star();

/// sigma restricted to the kernel basis.
Eigen::Matrix4d circle_kernel_sigma();

} // namespace hodgelab

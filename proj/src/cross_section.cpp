#include "hodgelab/cross_section.hpp"

#include <algorithm>
#include <cmath>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Trip = Eigen::Triplet<double>;

// Real Fourier eigenbasis of the cycle Laplacian, nonzero frequencies only,
// ordered by frequency; cos before sin.
std::vector<std::pair<Vec, double>> fourier_node_modes(std::size_t n, double h)
{
    std::vector<std::pair<Vec, double>> out;
    const double nn = static_cast<double>(n);
    for (std::size_t k = 1; 2 * k <= n; ++k) {
        const double s = 2.0 / h * std::sin(kPi * static_cast<double>(k) / nn);
        if (2 * k == n) {
            Vec f(n);
            for (std::size_t i = 0; i < n; ++i) f(i) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(nn);
            out.emplace_back(f, s);
        } else {
            Vec c(n), sn(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double a = 2.0 * kPi * static_cast<double>(k * i) / nn;
                c(i) = std::sqrt(2.0 / nn) * std::cos(a);
                sn(i) = std::sqrt(2.0 / nn) * std::sin(a);
            }
            out.emplace_back(c, s);
            out.emplace_back(sn, s);
        }
    }
    return out;
}

// Symmetrized circle coboundary, edge i from node i to node i+1.
Vec apply_d(const Vec& f, double h)
{
    const auto n = f.size();
    Vec g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = (f((i + 1) % n) - f(i)) / h;
    return g;
}

} // namespace

Mat CrossSectionSpectrum::kernel_basis() const
{
    const std::size_t n = n_theta;
    Mat k = Mat::Zero(4 * n, 4);
    const double c = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        k(u0_node(i), 0) = c;
        k(u0_edge(i), 1) = c;
        k(u1_node(i), 2) = c;
        k(u1_edge(i), 3) = c;
    }
    return k;
}

CrossSectionSpectrum discrete_cross_section(double circumference, std::size_t n_theta, bool with_vectors,
                                            const std::string& id)
{
    if (n_theta < 8) throw Error(ErrorCode::BadResolution, "n_theta must be at least 8");
    if (!(circumference > 0.0)) throw Error(ErrorCode::BadResolution, "circumference must be positive");

    CrossSectionSpectrum s;
    s.id = id;
    s.circumference = circumference;
    s.n_theta = n_theta;
    const std::size_t n = n_theta;
    const double h = circumference / static_cast<double>(n);
    s.spacing = h;

    // D_e on (nodes, edges)
    {
        std::vector<Trip> t;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + 1) % n;
            // d~ row i: -1/h at node i, +1/h at node j
            t.emplace_back(n + i, i, -1.0 / h);
            t.emplace_back(n + i, j, 1.0 / h);
            t.emplace_back(i, n + i, -1.0 / h);
            t.emplace_back(j, n + i, 1.0 / h);
        }
        s.d_e.resize(2 * n, 2 * n);
        s.d_e.setFromTriplets(t.begin(), t.end());
    }
    // sigma(u0, u1) = (-G u1, G u0), G = +1 on nodes, -1 on edges
    {
        std::vector<Trip> t;
        for (std::size_t i = 0; i < n; ++i) {
            t.emplace_back(s.u0_node(i), s.u1_node(i), -1.0);
            t.emplace_back(s.u0_edge(i), s.u1_edge(i), 1.0);
            t.emplace_back(s.u1_node(i), s.u0_node(i), 1.0);
            t.emplace_back(s.u1_edge(i), s.u0_edge(i), -1.0);
        }
        s.sigma.resize(4 * n, 4 * n);
        s.sigma.setFromTriplets(t.begin(), t.end());
    }
    // D_hat(u0, u1) = (-G D_e u1, G D_e u0); G D_e = [[0, d~^T], [-d~, 0]]
    {
        std::vector<Trip> t;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + 1) % n;
            // u0 nodes: -(d~^T u1e)
            t.emplace_back(s.u0_node(i), s.u1_edge(i), 1.0 / h);
            t.emplace_back(s.u0_node(j), s.u1_edge(i), -1.0 / h);
            // u0 edges: d~ u1n
            t.emplace_back(s.u0_edge(i), s.u1_node(i), -1.0 / h);
            t.emplace_back(s.u0_edge(i), s.u1_node(j), 1.0 / h);
            // u1 nodes: d~^T u0e
            t.emplace_back(s.u1_node(i), s.u0_edge(i), -1.0 / h);
            t.emplace_back(s.u1_node(j), s.u0_edge(i), 1.0 / h);
            // u1 edges: -d~ u0n
            t.emplace_back(s.u1_edge(i), s.u0_node(i), 1.0 / h);
            t.emplace_back(s.u1_edge(i), s.u0_node(j), -1.0 / h);
        }
        s.d_hat.resize(4 * n, 4 * n);
        s.d_hat.setFromTriplets(t.begin(), t.end());
    }

    const auto modes = fourier_node_modes(n, h);
    s.kernel_dim = 4;
    s.values = Vec::Zero(4 * n);
    for (std::size_t m = 0; m < modes.size(); ++m) {
        s.values(2 + 2 * m) = modes[m].second;
        s.values(3 + 2 * m) = modes[m].second;
    }
    for (std::size_t j = 0; j < 2 * n; ++j) s.values(2 * n + j) = -s.values(j);

    if (with_vectors) {
        s.vectors = Mat::Zero(4 * n, 4 * n);
        const Mat k = s.kernel_basis();
        s.vectors.col(0) = k.col(0);
        s.vectors.col(1) = k.col(1);
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const Vec& f = modes[m].first;
            const Vec g = apply_d(f, h) / modes[m].second;
            Vec a(4 * n), b(4 * n);
            a << f, g, f, -g;
            b << f, -g, -f, -g;
            s.vectors.col(2 + 2 * m) = 0.5 * a;
            s.vectors.col(3 + 2 * m) = 0.5 * b;
        }
        s.vectors.rightCols(2 * n) = s.sigma * s.vectors.leftCols(2 * n);
    }
    return s;
}

double smallest_nonzero(const CrossSectionSpectrum& s)
{
    return 2.0 / s.spacing * std::sin(kPi / static_cast<double>(s.n_theta));
}

double spectral_gap(const std::vector<CrossSectionSpectrum>& spectra)
{
    if (spectra.empty()) throw Error(ErrorCode::EmptySpectrum, "no cross-sections");
    double g = smallest_nonzero(spectra.front());
    for (const auto& s : spectra) g = std::min(g, smallest_nonzero(s));
    return g;
}

std::size_t weyl_counting(const CrossSectionSpectrum& s, double lambda)
{
    if (lambda < 0.0) return 0;
    std::size_t c = 0;
    const double eps = 1e-12 * (1.0 + std::abs(lambda));
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (s.values(i) >= 0.0 && s.values(i) <= lambda + eps) ++c;
    return c;
}

namespace {

// least-squares slope and intercept of y against x
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

} // namespace

WeylFit weyl_fit(const CrossSectionSpectrum& s, std::size_t k_modes)
{
    const std::size_t n = s.n_theta;
    if (k_modes < 2 || k_modes > n / 4)
        throw Error(ErrorCode::InsufficientModes, "need 2 <= K <= n_theta/4 modes, got K = " + std::to_string(k_modes));

    std::vector<double> pos;
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (s.values(i) > 0.0) pos.push_back(s.values(i));
    std::sort(pos.begin(), pos.end());
    if (pos.size() < k_modes) throw Error(ErrorCode::InsufficientModes, "not enough positive modes");
    pos.resize(k_modes);

    std::vector<double> levels;
    for (double v : pos)
        if (levels.empty() || v > levels.back() * (1.0 + 1e-12)) levels.push_back(v);
    if (levels.size() < 2) throw Error(ErrorCode::InsufficientModes, "fewer than two distinct levels");

    std::vector<double> lx, ly, cx, cy;
    for (double lv : levels) {
        const std::size_t total = weyl_counting(s, lv);
        const std::size_t nonzero = total - s.kernel_dim;
        lx.push_back(std::log(static_cast<double>(nonzero)));
        ly.push_back(std::log(lv));
        cx.push_back(lv);
        cy.push_back(static_cast<double>(total));
    }
    WeylFit f;
    const auto [e, c] = linear_fit(lx, ly);
    f.exponent = e;
    f.constant = std::exp(c);
    f.counting_slope = linear_fit(cx, cy).first;
    f.modes_used = k_modes;
    return f;
}

double weyl_counting_oracle(double circumference) { return 4.0 * circumference / (2.0 * kPi); }

BoundaryConditionSpace boundary_condition(const CrossSectionSpectrum& s, int side, bool with_kernel)
{
    BoundaryConditionSpace b;
    b.edge = s.id;
    b.side = side >= 0 ? 1 : -1;
    b.with_kernel = with_kernel;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (s.values(i) > 0.0) b.positive.push_back(k);
        else if (s.values(i) < 0.0) b.negative.push_back(k);
        else b.zero.push_back(k);
    }
    b.selected = b.side > 0 ? b.positive : b.negative;
    if (with_kernel) b.selected.insert(b.selected.end(), b.zero.begin(), b.zero.end());
    std::sort(b.selected.begin(), b.selected.end());
    return b;
}

Eigen::Matrix4d circle_kernel_star()
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(3, 0) = 1.0;  // 1 -> vol
    m(2, 1) = 1.0;  // d theta -> dt
    m(1, 2) = -1.0; // dt -> -d theta
    m(0, 3) = 1.0;  // vol -> 1
    return m;
}

Eigen::Matrix4d circle_kernel_sigma()
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(2, 0) = 1.0;
    m(3, 1) = -1.0;
    m(0, 2) = -1.0;
    m(1, 3) = 1.0;
    return m;
}

} // namespace hodgelab

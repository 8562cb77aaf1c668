#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "hodgelab/complex.hpp"
#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

using V2 = Eigen::Vector2d;

struct TemplateBuilder {
    PieceTemplate p;

    std::size_t node() { return p.n_nodes++; }

    void face(std::vector<std::size_t> cycle, std::vector<V2> coords)
    {
        p.faces.push_back(std::move(cycle));
        p.coords.push_back(std::move(coords));
    }

    // Quads between two node rings of equal size, or with the inner ring
    // half the size (triangle + quad per inner node).
    void ring_band(const std::vector<std::size_t>& outer, const std::vector<V2>& po, const std::vector<std::size_t>& inner,
                   const std::vector<V2>& pi)
    {
        const std::size_t no = outer.size(), ni = inner.size();
        if (no == ni) {
            for (std::size_t k = 0; k < no; ++k) {
                const std::size_t k1 = (k + 1) % no;
                face({outer[k], outer[k1], inner[k1], inner[k]}, {po[k], po[k1], pi[k1], pi[k]});
            }
            return;
        }
        for (std::size_t k = 0; k < ni; ++k) {
            const std::size_t k1 = (k + 1) % ni;
            const std::size_t a = 2 * k, b = 2 * k + 1, c = (2 * k + 2) % no;
            face({inner[k], outer[a], outer[b]}, {pi[k], po[a], po[b]});
            face({inner[k], outer[b], outer[c], inner[k1]}, {pi[k], po[b], po[c], pi[k1]});
        }
    }

    void fan(std::size_t centre, const V2& pc, const std::vector<std::size_t>& ring, const std::vector<V2>& pr)
    {
        for (std::size_t k = 0; k < ring.size(); ++k) {
            const std::size_t k1 = (k + 1) % ring.size();
            face({centre, ring[k], ring[k1]}, {pc, pr[k], pr[k1]});
        }
    }

    // Product collar of `slabs` slabs of length h outward from `base`; returns
    // the outermost layer.
    std::vector<std::size_t> collar(const std::vector<std::size_t>& base, double h_theta, double h, std::size_t slabs)
    {
        std::vector<std::size_t> prev = base;
        const std::size_t n = base.size();
        for (std::size_t l = 0; l < slabs; ++l) {
            std::vector<std::size_t> next(n);
            for (auto& x : next) x = node();
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t i1 = (i + 1) % n;
                face({prev[i], prev[i1], next[i1], next[i]}, {V2(0, 0), V2(h_theta, 0), V2(h_theta, h), V2(0, h)});
            }
            prev = next;
        }
        return prev;
    }
};

// Flip faces so that every interior edge is traversed in opposite directions
// by its two faces.
void orient_consistently(PieceTemplate& p)
{
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> edge_faces;
    auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (std::size_t f = 0; f < p.faces.size(); ++f) {
        const auto& c = p.faces[f];
        for (std::size_t k = 0; k < c.size(); ++k) edge_faces[key(c[k], c[(k + 1) % c.size()])].push_back(f);
    }
    for (const auto& [e, fs] : edge_faces)
        if (fs.size() > 2) throw Error(ErrorCode::BadTopology, "edge shared by more than two faces");

    auto direction = [&](std::size_t f, std::size_t a, std::size_t b) {
        const auto& c = p.faces[f];
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == a && c[(k + 1) % c.size()] == b) return 1;
            if (c[k] == b && c[(k + 1) % c.size()] == a) return -1;
        }
        return 0;
    };
    std::vector<int> state(p.faces.size(), 0);
    for (std::size_t s = 0; s < p.faces.size(); ++s) {
        if (state[s]) continue;
        state[s] = 1;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            const std::size_t f = queue.front();
            queue.pop_front();
            const auto c = p.faces[f];
            for (std::size_t k = 0; k < c.size(); ++k) {
                const std::size_t a = c[k], b = c[(k + 1) % c.size()];
                for (std::size_t g : edge_faces[key(a, b)]) {
                    if (g == f) continue;
                    if (!state[g]) {
                        if (direction(g, a, b) == 1) {
                            std::reverse(p.faces[g].begin(), p.faces[g].end());
                            std::reverse(p.coords[g].begin(), p.coords[g].end());
                        }
                        state[g] = 1;
                        queue.push_back(g);
                    } else if (direction(g, a, b) == 1) {
                        throw Error(ErrorCode::BadTopology, "piece mesh is not orientable");
                    }
                }
            }
        }
    }

    p.circle_traversal.clear();
    for (const auto& circle : p.circles) {
        const auto& fs = edge_faces[key(circle[0], circle[1])];
        if (fs.size() != 1) throw Error(ErrorCode::BadTopology, "boundary circle edge is not on the boundary");
        p.circle_traversal.push_back(direction(fs[0], circle[0], circle[1]));
    }
}

std::vector<V2> ring_points(double radius, std::size_t n)
{
    std::vector<V2> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        out[k] = V2(radius * std::cos(a), radius * std::sin(a));
    }
    return out;
}

PieceTemplate make_cap(const CircleSpec& c, double h)
{
    TemplateBuilder b;
    const std::size_t n = c.n_theta;
    const double ht = c.circumference / static_cast<double>(n);
    const double radius = ht / (2.0 * std::sin(kPi / static_cast<double>(n)));
    const std::size_t rings = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(radius / h)));

    std::vector<std::size_t> outer(n);
    for (auto& x : outer) x = b.node();
    std::vector<V2> po = ring_points(radius, n);
    const std::vector<std::size_t> disk_rim = outer;

    for (std::size_t i = 1; i < rings; ++i) {
        const double rho = radius * (1.0 - static_cast<double>(i) / static_cast<double>(rings));
        std::size_t ni = outer.size();
        if (2.0 * rho * std::sin(kPi / static_cast<double>(ni)) < 0.5 * h && ni % 2 == 0 && ni / 2 >= 4) ni /= 2;
        std::vector<std::size_t> inner(ni);
        for (auto& x : inner) x = b.node();
        const std::vector<V2> pi = ring_points(rho, ni);
        b.ring_band(outer, po, inner, pi);
        outer = inner;
        po = pi;
    }
    b.fan(b.node(), V2(0, 0), outer, po);

    b.p.circles.push_back(b.collar(disk_rim, ht, h, 2));
    b.p.kind = PieceKind::Cap;
    return b.p;
}

PieceTemplate make_tube(const CircleSpec& c, double h, double length)
{
    TemplateBuilder b;
    const std::size_t n = c.n_theta;
    const double ht = c.circumference / static_cast<double>(n);
    const std::size_t slabs = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(length / h)));
    std::vector<std::size_t> base(n);
    for (auto& x : base) x = b.node();
    const auto top = b.collar(base, ht, length / static_cast<double>(slabs), slabs);
    b.p.circles = {base, top};
    b.p.kind = PieceKind::Tube;
    return b.p;
}

PieceTemplate make_pants(const CircleSpec& c, double h)
{
    TemplateBuilder b;
    const std::size_t n = c.n_theta;
    const std::size_t half = n / 2;
    const double ht = c.circumference / static_cast<double>(n);
    const double side = static_cast<double>(half) * ht;
    const std::size_t perim = 3 * n;

    // regular hexagon of circumradius `side`, perimeter nodes at spacing ht
    auto hex_point = [&](double scale, std::size_t p, std::size_t count) {
        const double u = static_cast<double>(p) * 6.0 / static_cast<double>(count);
        const auto s = static_cast<std::size_t>(std::floor(u)) % 6;
        const double w = u - std::floor(u);
        const V2 c0(side * std::cos(kPi / 3.0 * static_cast<double>(s)), side * std::sin(kPi / 3.0 * static_cast<double>(s)));
        const V2 c1(side * std::cos(kPi / 3.0 * static_cast<double>(s + 1)),
                    side * std::sin(kPi / 3.0 * static_cast<double>(s + 1)));
        return V2(scale * ((1.0 - w) * c0 + w * c1));
    };
    const double inradius = side * std::sqrt(3.0) / 2.0;
    const std::size_t rings = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(inradius / h)));

    auto fill = [&](const std::vector<std::size_t>& rim) {
        std::vector<std::size_t> outer = rim;
        std::vector<V2> po(perim);
        for (std::size_t p = 0; p < perim; ++p) po[p] = hex_point(1.0, p, perim);
        for (std::size_t i = 1; i < rings; ++i) {
            const double rho = 1.0 - static_cast<double>(i) / static_cast<double>(rings);
            std::size_t ni = outer.size();
            const double spacing = rho * ht * static_cast<double>(perim) / static_cast<double>(ni);
            if (spacing < 0.5 * h && ni % 2 == 0 && ni / 2 >= 6) ni /= 2;
            std::vector<std::size_t> inner(ni);
            for (auto& x : inner) x = b.node();
            std::vector<V2> pi(ni);
            for (std::size_t p = 0; p < ni; ++p) pi[p] = hex_point(rho, p, ni);
            b.ring_band(outer, po, inner, pi);
            outer = inner;
            po = pi;
        }
        b.fan(b.node(), V2(0, 0), outer, po);
    };

    std::vector<std::size_t> top(perim), bottom(perim);
    for (auto& x : top) x = b.node();
    for (std::size_t p = 0; p < perim; ++p) {
        const std::size_t s = p / half;
        const bool on_b_side = (s % 2 == 1) || (p % half == 0);
        bottom[p] = on_b_side ? top[p] : b.node();
    }
    fill(top);
    fill(bottom);

    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t p0 = 2 * k * half;
        std::vector<std::size_t> circle;
        for (std::size_t q = 0; q <= half; ++q) circle.push_back(top[p0 + q]);
        for (std::size_t q = half - 1; q >= 1; --q) circle.push_back(bottom[p0 + q]);
        b.p.circles.push_back(b.collar(circle, ht, h, 2));
    }
    b.p.kind = PieceKind::Pants;
    return b.p;
}

} // namespace

PieceTemplate make_piece(PieceKind kind, const std::vector<CircleSpec>& circles, double h, double tube_length)
{
    if (circles.size() != piece_circle_count(kind))
        throw Error(ErrorCode::BadTopology, std::string(piece_kind_name(kind)) + " needs "
                                                + std::to_string(piece_circle_count(kind)) + " boundary circles, got "
                                                + std::to_string(circles.size()));
    if (!(h > 0.0)) throw Error(ErrorCode::BadResolution, "h must be positive");
    for (const auto& c : circles) {
        if (c.n_theta < 8) throw Error(ErrorCode::ResolutionMismatch, "boundary circle needs at least 8 nodes");
        if (!(c.circumference > 0.0)) throw Error(ErrorCode::ResolutionMismatch, "circumference must be positive");
    }
    for (const auto& c : circles)
        if (c.n_theta != circles[0].n_theta || std::abs(c.circumference - circles[0].circumference) > 1e-12)
            throw Error(ErrorCode::ResolutionMismatch, "boundary circles of one piece must agree");

    PieceTemplate p;
    switch (kind) {
    case PieceKind::Cap: p = make_cap(circles[0], h); break;
    case PieceKind::Tube: p = make_tube(circles[0], h, tube_length); break;
    case PieceKind::Pants:
        if (circles[0].n_theta % 2 != 0) throw Error(ErrorCode::ResolutionMismatch, "pants need an even n_theta");
        p = make_pants(circles[0], h);
        break;
    }
    orient_consistently(p);

    const long chi = static_cast<long>(p.n_nodes) - [&] {
        std::map<std::pair<std::size_t, std::size_t>, int> e;
        for (const auto& f : p.faces)
            for (std::size_t k = 0; k < f.size(); ++k)
                e[{std::min(f[k], f[(k + 1) % f.size()]), std::max(f[k], f[(k + 1) % f.size()])}] = 1;
        return static_cast<long>(e.size());
    }() + static_cast<long>(p.faces.size());
    if (chi != piece_euler_characteristic(kind)) throw Error(ErrorCode::BadTopology, "piece mesh has wrong Euler characteristic");
    return p;
}

CellComplex piece_complex(const PieceTemplate& p)
{
    ComplexBuilder b;
    for (std::size_t i = 0; i < p.n_nodes; ++i) b.add_node({});
    for (std::size_t f = 0; f < p.faces.size(); ++f) b.add_face(p.faces[f], p.coords[f], {});
    b.open_circles = p.circles;
    return b.finalize();
}

} // namespace hodgelab

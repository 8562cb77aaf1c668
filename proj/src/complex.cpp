#include "hodgelab/complex.hpp"

#include <algorithm>
#include <cmath>

#include "hodgelab/error.hpp"

namespace hodgelab {

long CylinderChart::far_layer() const
{
    if (side == 0) return -1;
    return side > 0 ? static_cast<long>(layers()) - 1 : 0;
}

Vec CellComplex::mass() const
{
    Vec m(size());
    m << m0, m1, m2;
    return m;
}

const CylinderChart* CellComplex::chart_for_edge(std::size_t edge) const
{
    for (const auto& ch : charts)
        if (ch.edge == edge) return &ch;
    return nullptr;
}

const CylinderChart* CellComplex::chart_for_half_edge(std::size_t half_edge) const
{
    for (const auto& ch : charts)
        if (ch.side != 0 && ch.half_edge == half_edge) return &ch;
    return nullptr;
}

Vec CellComplex::to_symmetric(const Vec& raw) const { return raw.cwiseProduct(mass().cwiseSqrt()); }

Vec CellComplex::to_raw(const Vec& sym) const { return sym.cwiseQuotient(mass().cwiseSqrt()); }

std::size_t ComplexBuilder::add_node(const CellLabel& label)
{
    labels0_.push_back(label);
    adjacency_.emplace_back();
    return labels0_.size() - 1;
}

std::pair<std::size_t, int> ComplexBuilder::edge(std::size_t a, std::size_t b, const CellLabel& label)
{
    for (const auto& [other, e] : adjacency_[a])
        if (other == b) return {e, edges_[e][0] == a ? 1 : -1};
    const std::size_t e = edges_.size();
    edges_.push_back({a, b});
    labels1_.push_back(label);
    adjacency_[a].emplace_back(b, e);
    adjacency_[b].emplace_back(a, e);
    return {e, 1};
}

std::size_t ComplexBuilder::add_face(const std::vector<std::size_t>& cycle, const std::vector<Eigen::Vector2d>& coords,
                                     const CellLabel& label)
{
    FaceRec f{cycle, coords, {}};
    for (std::size_t k = 0; k < cycle.size(); ++k) f.edges.push_back(edge(cycle[k], cycle[(k + 1) % cycle.size()], label));
    faces_.push_back(std::move(f));
    labels2_.push_back(label);
    return faces_.size() - 1;
}

CellComplex ComplexBuilder::finalize()
{
    CellComplex c;
    c.n0 = labels0_.size();
    c.n1 = edges_.size();
    c.n2 = faces_.size();
    c.label0 = labels0_;
    c.label1 = labels1_;
    c.label2 = labels2_;
    c.charts = charts;
    c.open_circles = open_circles;

    using T = Eigen::Triplet<int>;
    std::vector<T> t0, t1;
    for (std::size_t e = 0; e < c.n1; ++e) {
        t0.emplace_back(e, edges_[e][0], -1);
        t0.emplace_back(e, edges_[e][1], 1);
    }
    c.d0.resize(c.n1, c.n0);
    c.d0.setFromTriplets(t0.begin(), t0.end());

    c.m0 = Vec::Zero(c.n0);
    c.m2 = Vec::Zero(c.n2);
    Vec dual = Vec::Zero(c.n1), length = Vec::Zero(c.n1);
    for (std::size_t f = 0; f < c.n2; ++f) {
        const auto& fr = faces_[f];
        const std::size_t k = fr.cycle.size();
        double area = 0.0;
        Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < k; ++i) {
            const auto& p = fr.coords[i];
            const auto& q = fr.coords[(i + 1) % k];
            area += p.x() * q.y() - q.x() * p.y();
            centroid += p;
        }
        area = 0.5 * std::abs(area);
        centroid /= static_cast<double>(k);
        c.m2(f) = 1.0 / area;
        for (std::size_t i = 0; i < k; ++i) {
            c.m0(fr.cycle[i]) += area / static_cast<double>(k);
            const auto& p = fr.coords[i];
            const auto& q = fr.coords[(i + 1) % k];
            const auto [e, s] = fr.edges[i];
            t1.emplace_back(f, e, s);
            if (length(e) == 0.0) length(e) = (q - p).norm();
            dual(e) += (0.5 * (p + q) - centroid).norm();
        }
    }
    c.d1.resize(c.n2, c.n1);
    c.d1.setFromTriplets(t1.begin(), t1.end());
    c.m1 = dual.cwiseQuotient(length);
    return c;
}

std::size_t cylinder_slabs(double r, double h) { return 2 * static_cast<std::size_t>(std::ceil(r / h - 1e-9)); }

namespace {

struct PlacedPiece {
    std::vector<std::size_t> node_map;          ///< template node -> complex node
    std::vector<std::vector<std::size_t>> circles;
    std::vector<int> traversal;
};

PlacedPiece place_piece(ComplexBuilder& b, const PieceTemplate& p, std::size_t vertex)
{
    PlacedPiece out;
    const CellLabel lab{CellKind::Vertex, vertex, -1, 0.0};
    for (std::size_t i = 0; i < p.n_nodes; ++i) out.node_map.push_back(b.add_node(lab));
    for (std::size_t f = 0; f < p.faces.size(); ++f) {
        std::vector<std::size_t> cyc;
        for (auto n : p.faces[f]) cyc.push_back(out.node_map[n]);
        b.add_face(cyc, p.coords[f], lab);
    }
    for (const auto& c : p.circles) {
        std::vector<std::size_t> g;
        for (auto n : c) g.push_back(out.node_map[n]);
        out.circles.push_back(g);
    }
    out.traversal = p.circle_traversal;
    return out;
}

// Node i of a cylinder end layer glued to a piece circle. The cylinder faces
// run along +i on the low end and along -i on the high end; the piece must
// run the other way.
std::vector<std::size_t> glue_map(const std::vector<std::size_t>& circle, int traversal, bool low_end)
{
    const std::size_t n = circle.size();
    const bool reverse = low_end ? (traversal > 0) : (traversal < 0);
    std::vector<std::size_t> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = reverse ? circle[(n - i) % n] : circle[i];
    return m;
}

// Cylinder layers from `first` (global layer offset) with optional glued end
// layers. New cells are labelled with the edge.
CylinderChart add_cylinder(ComplexBuilder& b, std::size_t edge, const CircleSpec& cs, double tau, double r, long offset,
                           std::size_t n_slabs, const std::vector<std::size_t>* low, const std::vector<std::size_t>* high)
{
    CylinderChart ch;
    ch.edge = edge;
    ch.n_theta = cs.n_theta;
    ch.h_theta = cs.circumference / static_cast<double>(cs.n_theta);
    ch.tau = tau;
    ch.r = r;
    ch.offset = offset;
    const std::size_t n = cs.n_theta;
    for (std::size_t j = 0; j <= n_slabs; ++j) {
        const double t = -r + static_cast<double>(offset + static_cast<long>(j)) * tau;
        ch.t_layer.push_back(t);
        if (j == 0 && low) {
            ch.node.push_back(*low);
        } else if (j == n_slabs && high) {
            ch.node.push_back(*high);
        } else {
            std::vector<std::size_t> layer(n);
            for (auto& x : layer) x = b.add_node({CellKind::Edge, edge, offset + static_cast<long>(j), t});
            ch.node.push_back(layer);
        }
    }
    ch.theta_edge.resize(n_slabs + 1);
    ch.theta_sign.resize(n_slabs + 1);
    for (std::size_t j = 0; j <= n_slabs; ++j) {
        const CellLabel lab{CellKind::Edge, edge, offset + static_cast<long>(j), ch.t_layer[j]};
        for (std::size_t i = 0; i < n; ++i) {
            const auto [e, s] = b.edge(ch.node[j][i], ch.node[j][(i + 1) % n], lab);
            ch.theta_edge[j].push_back(e);
            ch.theta_sign[j].push_back(s);
        }
    }
    ch.t_edge.resize(n_slabs);
    ch.face.resize(n_slabs);
    for (std::size_t j = 0; j < n_slabs; ++j) {
        const CellLabel lab{CellKind::Edge, edge, offset + static_cast<long>(j), ch.slab_t(j)};
        for (std::size_t i = 0; i < n; ++i) ch.t_edge[j].push_back(b.edge(ch.node[j][i], ch.node[j + 1][i], lab).first);
        const double ht = ch.h_theta;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t i1 = (i + 1) % n;
            ch.face[j].push_back(b.add_face({ch.node[j][i], ch.node[j][i1], ch.node[j + 1][i1], ch.node[j + 1][i]},
                                            {Eigen::Vector2d(0, 0), Eigen::Vector2d(ht, 0), Eigen::Vector2d(ht, tau),
                                             Eigen::Vector2d(0, tau)},
                                            lab));
        }
    }
    return ch;
}

std::vector<CircleSpec> circles_at(const Geometry& geo, std::size_t v)
{
    std::vector<CircleSpec> out;
    for (auto h : geo.graph.half_edges_at(v)) out.push_back(geo.sections[geo.graph.half_edges()[h].edge]);
    return out;
}

PieceTemplate piece_for(const Geometry& geo, std::size_t v)
{
    const auto circles = circles_at(geo, v);
    if (circles.size() < piece_circle_count(geo.kinds[v]))
        throw Error(ErrorCode::OpenBoundaryLeft, "vertex '" + geo.graph.vertices()[v] + "' leaves a boundary circle unglued");
    if (circles.size() > piece_circle_count(geo.kinds[v]))
        throw Error(ErrorCode::GluingMismatch, "vertex '" + geo.graph.vertices()[v] + "' has more half-edges than circles");
    const double len = geo.tube_lengths.empty() ? 1.0 : geo.tube_lengths[v];
    return make_piece(geo.kinds[v], circles, geo.h, len);
}

// Every edge of a closed oriented complex bounds exactly two faces with
// opposite signs; on an open one, boundary edges bound one.
void check_orientation(const CellComplex& c)
{
    std::vector<int> count(c.n1, 0), sum(c.n1, 0);
    for (int k = 0; k < c.d1.outerSize(); ++k)
        for (IntSpMat::InnerIterator it(c.d1, k); it; ++it) {
            count[it.col()] += 1;
            sum[it.col()] += it.value();
        }
    std::vector<char> boundary(c.n0, 0), on_boundary(c.n1, 0);
    for (const auto& circ : c.open_circles)
        for (auto n : circ) boundary[n] = 1;
    std::vector<int> ends(c.n1, 0);
    for (int k = 0; k < c.d0.outerSize(); ++k)
        for (IntSpMat::InnerIterator it(c.d0, k); it; ++it)
            if (boundary[it.col()]) ends[it.row()] += 1;
    for (std::size_t e = 0; e < c.n1; ++e) on_boundary[e] = ends[e] == 2;
    for (std::size_t e = 0; e < c.n1; ++e) {
        if (count[e] == 2 && sum[e] == 0) continue;
        if (count[e] == 1 && on_boundary[e]) continue;
        throw Error(ErrorCode::GluingMismatch, "inconsistent orientation or unglued edge");
    }
}

} // namespace

CellComplex assemble(const Geometry& geo, double r)
{
    if (r < 1.0) throw Error(ErrorCode::ROutOfRange, "stretch r must be at least 1");
    const Graph& g = geo.graph;
    ComplexBuilder b;
    std::vector<PlacedPiece> placed;
    long chi_pieces = 0;
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        const PieceTemplate p = piece_for(geo, v);
        placed.push_back(place_piece(b, p, v));
        chi_pieces += piece_euler_characteristic(geo.kinds[v]);
    }
    const std::size_t n_s = cylinder_slabs(r, geo.h);
    const double tau = 2.0 * r / static_cast<double>(n_s);
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& ge = g.edges()[e];
        const std::size_t ct = circle_of_half_edge(g, 2 * e), chd = circle_of_half_edge(g, 2 * e + 1);
        const auto& pt = placed[ge.tail];
        const auto& ph = placed[ge.head];
        if (pt.circles[ct].size() != geo.sections[e].n_theta || ph.circles[chd].size() != geo.sections[e].n_theta)
            throw Error(ErrorCode::GluingMismatch, "circle size differs from cross-section of edge '" + ge.id + "'");
        const auto low = glue_map(pt.circles[ct], pt.traversal[ct], true);
        const auto high = glue_map(ph.circles[chd], ph.traversal[chd], false);
        CylinderChart ch = add_cylinder(b, e, geo.sections[e], tau, r, 0, n_s, &low, &high);
        ch.tail_vertex = ge.tail;
        ch.head_vertex = ge.head;
        b.charts.push_back(ch);
    }
    CellComplex c = b.finalize();
    c.r = r;
    check_orientation(c);
    if (c.euler_characteristic() != chi_pieces) throw Error(ErrorCode::GluingMismatch, "Euler characteristic mismatch");
    return c;
}

CellComplex build_star(const Geometry& geo, std::size_t vertex, double r, std::size_t n_slabs)
{
    const Graph& g = geo.graph;
    ComplexBuilder b;
    const PlacedPiece pp = place_piece(b, piece_for(geo, vertex), vertex);
    const std::size_t n_s = cylinder_slabs(r, geo.h);
    const double tau = 2.0 * r / static_cast<double>(n_s);
    const auto& at = g.half_edges_at(vertex);
    for (std::size_t c = 0; c < at.size(); ++c) {
        const auto& he = g.half_edges()[at[c]];
        CylinderChart ch;
        if (he.sign > 0) {
            const auto low = glue_map(pp.circles[c], pp.traversal[c], true);
            ch = add_cylinder(b, he.edge, geo.sections[he.edge], tau, r, 0, n_slabs, &low, nullptr);
            b.open_circles.push_back(ch.node.back());
        } else {
            const auto high = glue_map(pp.circles[c], pp.traversal[c], false);
            ch = add_cylinder(b, he.edge, geo.sections[he.edge], tau, r, static_cast<long>(n_s) - static_cast<long>(n_slabs),
                              n_slabs, nullptr, &high);
            b.open_circles.push_back(ch.node.front());
        }
        ch.side = he.sign;
        ch.half_edge = at[c];
        ch.tail_vertex = g.edges()[he.edge].tail;
        ch.head_vertex = g.edges()[he.edge].head;
        b.charts.push_back(ch);
    }
    CellComplex c = b.finalize();
    c.r = r;
    check_orientation(c);
    return c;
}

GaussBonnetOperator operators(const CellComplex& c)
{
    GaussBonnetOperator op;
    const Vec s0 = c.m0.cwiseSqrt(), s1 = c.m1.cwiseSqrt(), s2 = c.m2.cwiseSqrt();
    const SpMat d0 = c.d0.cast<double>(), d1 = c.d1.cast<double>();
    op.d0 = s1.asDiagonal() * d0 * s0.cwiseInverse().asDiagonal();
    op.d1 = s2.asDiagonal() * d1 * s1.cwiseInverse().asDiagonal();

    using T = Eigen::Triplet<double>;
    std::vector<T> t;
    for (int k = 0; k < op.d0.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.d0, k); it; ++it) t.emplace_back(c.n0 + it.row(), it.col(), it.value());
    for (int k = 0; k < op.d1.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.d1, k); it; ++it) t.emplace_back(c.n0 + c.n1 + it.row(), c.n0 + it.col(), it.value());
    op.S.resize(c.size(), c.size());
    op.S.setFromTriplets(t.begin(), t.end());
    op.D = SpMat(op.S.transpose()) + op.S;
    op.Delta = op.D * op.D;
    op.Delta.prune(0.0);
    return op;
}

namespace {

// Cells of one vertex region in canonical order, with sign normalising
// theta-edges to the i -> i+1 direction.
void vertex_region(const CellComplex& c, std::size_t v, double s, const Graph* g, std::vector<std::size_t>& flat,
                   std::vector<int>& sign)
{
    const std::size_t o1 = c.n0, o2 = c.n0 + c.n1;
    auto is_v = [&](const CellLabel& l) { return l.kind == CellKind::Vertex && l.index == v; };
    for (std::size_t i = 0; i < c.n0; ++i)
        if (is_v(c.label0[i])) flat.push_back(i), sign.push_back(1);
    for (std::size_t i = 0; i < c.n1; ++i)
        if (is_v(c.label1[i])) flat.push_back(o1 + i), sign.push_back(1);
    for (std::size_t i = 0; i < c.n2; ++i)
        if (is_v(c.label2[i])) flat.push_back(o2 + i), sign.push_back(1);

    // half-edges at v, in the canonical order
    std::vector<std::pair<const CylinderChart*, bool>> ends;
    if (g) {
        for (auto h : g->half_edges_at(v)) {
            const auto& he = g->half_edges()[h];
            const CylinderChart* ch = c.chart_for_half_edge(h);
            if (!ch) ch = c.chart_for_edge(he.edge);
            if (ch) ends.emplace_back(ch, he.sign > 0);
        }
    }
    const double eps = 1e-9;
    for (const auto& [ch, low] : ends) {
        const std::size_t nl = ch->layers();
        const std::size_t n = ch->n_theta;
        for (std::size_t k = 1; k < nl; ++k) {
            const std::size_t j = low ? k : nl - 1 - k;
            const double th = ch->vartheta(ch->t_layer[j]);
            if (th > s + eps) break;
            if (ch->side == 0 && !low && std::abs(ch->t_layer[j]) < eps) break; // midpoint kept once
            if (c.label0[ch->node[j][0]].kind == CellKind::Vertex) break;      // reached the other piece
            for (std::size_t i = 0; i < n; ++i) flat.push_back(ch->node[j][i]), sign.push_back(1);
            for (std::size_t i = 0; i < n; ++i) flat.push_back(o1 + ch->theta_edge[j][i]), sign.push_back(ch->theta_sign[j][i]);
        }
        for (std::size_t k = 0; k + 1 < nl; ++k) {
            const std::size_t j = low ? k : nl - 2 - k;
            const double tmin = std::min(std::abs(ch->t_layer[j]), std::abs(ch->t_layer[j + 1]));
            if (ch->r - tmin > s + eps) break;
            for (std::size_t i = 0; i < n; ++i) flat.push_back(o1 + ch->t_edge[j][i]), sign.push_back(1);
            for (std::size_t i = 0; i < n; ++i) flat.push_back(o2 + ch->face[j][i]), sign.push_back(1);
        }
    }
}

} // namespace

RegionIndex vertex_region(const CellComplex& c, const Graph& g, std::size_t v, double s)
{
    if (s < 0.0 || s > c.r + 1e-12) throw Error(ErrorCode::SOutOfRange, "s must lie in [0, r]");
    RegionIndex out;
    vertex_region(c, v, s, &g, out.flat, out.sign);
    return out;
}

Restriction restrict_complex(const CellComplex& c, double s)
{
    if (s < 0.0 || s > c.r + 1e-12) throw Error(ErrorCode::SOutOfRange, "s must lie in [0, r]");
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp0(c.n0, none), comp1(c.n1, none), comp2(c.n2, none);
    for (std::size_t i = 0; i < c.n0; ++i)
        if (c.label0[i].kind == CellKind::Vertex) comp0[i] = c.label0[i].index;
    for (std::size_t i = 0; i < c.n1; ++i)
        if (c.label1[i].kind == CellKind::Vertex) comp1[i] = c.label1[i].index;
    for (std::size_t i = 0; i < c.n2; ++i)
        if (c.label2[i].kind == CellKind::Vertex) comp2[i] = c.label2[i].index;

    const double eps = 1e-9;
    for (const auto& ch : c.charts) {
        auto owner = [&](double t) {
            if (ch.side > 0) return ch.tail_vertex;
            if (ch.side < 0) return ch.head_vertex;
            return t <= eps ? ch.tail_vertex : ch.head_vertex;
        };
        for (std::size_t j = 0; j < ch.layers(); ++j) {
            const double t = ch.t_layer[j];
            if (ch.vartheta(t) > s + eps) continue;
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                if (c.label0[ch.node[j][i]].kind == CellKind::Edge) comp0[ch.node[j][i]] = owner(t);
                if (c.label1[ch.theta_edge[j][i]].kind == CellKind::Edge) comp1[ch.theta_edge[j][i]] = owner(t);
            }
        }
        for (std::size_t j = 0; j < ch.slabs(); ++j) {
            const double tmin = std::min(std::abs(ch.t_layer[j]), std::abs(ch.t_layer[j + 1]));
            if (ch.r - tmin > s + eps) continue;
            for (std::size_t i = 0; i < ch.n_theta; ++i) {
                comp1[ch.t_edge[j][i]] = owner(ch.slab_t(j));
                comp2[ch.face[j][i]] = owner(ch.slab_t(j));
            }
        }
    }

    Restriction rs;
    std::vector<std::size_t> keep0(c.n0, none), keep1(c.n1, none), keep2(c.n2, none);
    const std::size_t o1 = c.n0, o2 = c.n0 + c.n1;
    for (std::size_t i = 0; i < c.n0; ++i)
        if (comp0[i] != none) keep0[i] = rs.cells[0].size(), rs.cells[0].push_back(i), rs.flat.push_back(i), rs.component.push_back(comp0[i]);
    for (std::size_t i = 0; i < c.n1; ++i)
        if (comp1[i] != none) keep1[i] = rs.cells[1].size(), rs.cells[1].push_back(i), rs.flat.push_back(o1 + i), rs.component.push_back(comp1[i]);
    for (std::size_t i = 0; i < c.n2; ++i)
        if (comp2[i] != none) keep2[i] = rs.cells[2].size(), rs.cells[2].push_back(i), rs.flat.push_back(o2 + i), rs.component.push_back(comp2[i]);

    CellComplex& sub = rs.complex;
    sub.n0 = rs.cells[0].size();
    sub.n1 = rs.cells[1].size();
    sub.n2 = rs.cells[2].size();
    sub.r = c.r;
    sub.m0.resize(sub.n0);
    sub.m1.resize(sub.n1);
    sub.m2.resize(sub.n2);
    for (std::size_t i = 0; i < sub.n0; ++i) sub.m0(i) = c.m0(rs.cells[0][i]), sub.label0.push_back(c.label0[rs.cells[0][i]]);
    for (std::size_t i = 0; i < sub.n1; ++i) sub.m1(i) = c.m1(rs.cells[1][i]), sub.label1.push_back(c.label1[rs.cells[1][i]]);
    for (std::size_t i = 0; i < sub.n2; ++i) sub.m2(i) = c.m2(rs.cells[2][i]), sub.label2.push_back(c.label2[rs.cells[2][i]]);
    using T = Eigen::Triplet<int>;
    std::vector<T> t0, t1;
    for (int k = 0; k < c.d0.outerSize(); ++k)
        for (IntSpMat::InnerIterator it(c.d0, k); it; ++it)
            if (keep1[it.row()] != none && keep0[it.col()] != none) t0.emplace_back(keep1[it.row()], keep0[it.col()], it.value());
    for (int k = 0; k < c.d1.outerSize(); ++k)
        for (IntSpMat::InnerIterator it(c.d1, k); it; ++it)
            if (keep2[it.row()] != none && keep1[it.col()] != none) t1.emplace_back(keep2[it.row()], keep1[it.col()], it.value());
    sub.d0.resize(sub.n1, sub.n0);
    sub.d0.setFromTriplets(t0.begin(), t0.end());
    sub.d1.resize(sub.n2, sub.n1);
    sub.d1.setFromTriplets(t1.begin(), t1.end());
    return rs;
}

Vec restrict_vector(const Restriction& rs, const Vec& sym)
{
    Vec out(rs.flat.size());
    for (std::size_t k = 0; k < rs.flat.size(); ++k) out(static_cast<Eigen::Index>(k)) = sym(rs.flat[k]);
    return out;
}

Vec gather(const RegionIndex& ri, const Vec& sym)
{
    Vec out(ri.flat.size());
    for (std::size_t k = 0; k < ri.flat.size(); ++k) out(static_cast<Eigen::Index>(k)) = ri.sign[k] * sym(ri.flat[k]);
    return out;
}

SpMat hodge_star(const CellComplex& c, int k)
{
    const Vec& m = k == 0 ? c.m0 : (k == 1 ? c.m1 : c.m2);
    SpMat s(m.size(), m.size());
    s.setIdentity();
    return s * m.asDiagonal();
}

SpMat hodge_star_inverse(const CellComplex& c, int k)
{
    const Vec& m = k == 0 ? c.m0 : (k == 1 ? c.m1 : c.m2);
    SpMat s(m.size(), m.size());
    s.setIdentity();
    return s * m.cwiseInverse().asDiagonal();
}

SpMat dual_hodge_star(const CellComplex& c, int k)
{
    const double sg = (k * (2 - k)) % 2 == 0 ? 1.0 : -1.0;
    return sg * hodge_star_inverse(c, k);
}

Vec cylinder_star_transfer(const CellComplex& c, const Vec& raw1)
{
    Vec out = Vec::Zero(c.n1);
    for (const auto& ch : c.charts) {
        const std::size_t n = ch.n_theta;
        const std::size_t nl = ch.layers();
        // a dtheta -> a dt on t-edges: average the four surrounding theta-edges
        for (std::size_t j = 0; j + 1 < nl; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t im = (i + n - 1) % n;
                double a = 0.0;
                for (std::size_t jj : {j, j + 1})
                    for (std::size_t ii : {im, i})
                        a += ch.theta_sign[jj][ii] * raw1(ch.theta_edge[jj][ii]);
                a /= 4.0 * ch.h_theta;
                out(ch.t_edge[j][i]) = a * ch.tau;
            }
        // b dt -> -b dtheta on theta-edges of interior layers
        for (std::size_t j = 1; j + 1 < nl; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t i1 = (i + 1) % n;
                double b = 0.0;
                for (std::size_t jj : {j - 1, j})
                    for (std::size_t ii : {i, i1}) b += raw1(ch.t_edge[jj][ii]);
                b /= 4.0 * ch.tau;
                out(ch.theta_edge[j][i]) = -b * ch.h_theta * ch.theta_sign[j][i];
            }
    }
    return out;
}

std::vector<std::size_t> chart_edge_cells(const CellComplex& c)
{
    std::vector<std::size_t> out;
    for (const auto& ch : c.charts) {
        for (std::size_t j = 1; j + 1 < ch.layers(); ++j)
            for (auto e : ch.theta_edge[j]) out.push_back(e);
        for (const auto& row : ch.t_edge)
            for (auto e : row) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace hodgelab

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hodgelab/cech_derham.hpp"
#include "hodgelab/cross_section.hpp"
#include "hodgelab/graph.hpp"

namespace hodgelab {

using IntSpMat = Eigen::SparseMatrix<int>;

enum class CellKind { Vertex, Edge };

/// Fiber label: a vertex piece, or a slab of an edge cylinder. For nodes and
/// theta-edges `slab` is the layer index; t is the t-coordinate of the cell
/// centre.
struct CellLabel {
    CellKind kind = CellKind::Vertex;
    std::size_t index = 0;
    long slab = -1;
    double t = 0.0;
};

/// Product grid on a (half-)cylinder. Layers are numbered along +t, which
/// always points from the tail vertex of the edge to the head vertex.
struct CylinderChart {
    std::size_t edge = 0;
    std::size_t half_edge = 0; ///< for star charts; unused for full cylinders
    int side = 0;              ///< 0 full cylinder, +1 tail half, -1 head half
    std::size_t n_theta = 0;
    double h_theta = 0.0;
    double tau = 0.0;
    double r = 0.0;            ///< half length of the full cylinder this chart sits in
    long offset = 0;           ///< index of layer 0 within the full cylinder
    std::size_t tail_vertex = 0;
    std::size_t head_vertex = 0;
    std::vector<double> t_layer;

    std::vector<std::vector<std::size_t>> node;       ///< [layer][i]
    std::vector<std::vector<std::size_t>> theta_edge; ///< [layer][i], i -> i+1
    std::vector<std::vector<int>> theta_sign;         ///< stored orientation vs i -> i+1
    std::vector<std::vector<std::size_t>> t_edge;     ///< [slab][i], layer j -> j+1
    std::vector<std::vector<std::size_t>> face;       ///< [slab][i]

    std::size_t layers() const { return node.size(); }
    std::size_t slabs() const { return face.size(); }
    double slab_t(std::size_t j) const { return 0.5 * (t_layer[j] + t_layer[j + 1]); }
    /// Distance from the vertex end this chart is attached to.
    double vartheta(double t) const { return r - std::abs(t); }
    /// Layer index of the open far circle, or -1 for a full cylinder.
    long far_layer() const;
};

struct CellComplex {
    std::size_t n0 = 0, n1 = 0, n2 = 0;
    IntSpMat d0; ///< n1 x n0
    IntSpMat d1; ///< n2 x n1
    Vec m0, m1, m2;
    std::vector<CellLabel> label0, label1, label2;
    std::vector<CylinderChart> charts;
    std::vector<std::vector<std::size_t>> open_circles;
    double r = 0.0;

    std::size_t size() const { return n0 + n1 + n2; }
    bool closed() const { return open_circles.empty(); }
    long euler_characteristic() const
    {
        return static_cast<long>(n0) - static_cast<long>(n1) + static_cast<long>(n2);
    }
    /// Diagonal of the full mass matrix on C0 + C1 + C2.
    Vec mass() const;
    const CylinderChart* chart_for_edge(std::size_t edge) const;
    const CylinderChart* chart_for_half_edge(std::size_t half_edge) const;

    Vec to_symmetric(const Vec& raw) const;
    Vec to_raw(const Vec& sym) const;
};

/// Incremental complex construction with find-or-create edges.
class ComplexBuilder {
public:
    std::size_t add_node(const CellLabel& label);
    /// Returns the edge index and +1 if it is stored as a -> b, -1 otherwise.
    std::pair<std::size_t, int> edge(std::size_t a, std::size_t b, const CellLabel& label);
    /// Face given as a node cycle with flat local coordinates of each node.
    std::size_t add_face(const std::vector<std::size_t>& cycle, const std::vector<Eigen::Vector2d>& coords,
                         const CellLabel& label);
    std::size_t node_count() const { return labels0_.size(); }
    const std::vector<std::size_t>& face_cycle(std::size_t f) const { return faces_[f].cycle; }

    CellComplex finalize();

    std::vector<CylinderChart> charts;
    std::vector<std::vector<std::size_t>> open_circles;

private:
    struct FaceRec {
        std::vector<std::size_t> cycle;
        std::vector<Eigen::Vector2d> coords;
        std::vector<std::pair<std::size_t, int>> edges;
    };
    std::vector<CellLabel> labels0_, labels1_, labels2_;
    std::vector<std::array<std::size_t, 2>> edges_;
    std::vector<FaceRec> faces_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_; ///< node -> (other node, edge)
};

/// Flat polygonal mesh of a vertex piece, local node numbering.
struct PieceTemplate {
    PieceKind kind = PieceKind::Cap;
    std::size_t n_nodes = 0;
    std::vector<std::vector<std::size_t>> faces;
    std::vector<std::vector<Eigen::Vector2d>> coords;
    std::vector<std::vector<std::size_t>> circles;
    /// +1 if the boundary orientation induced by the faces follows list order.
    std::vector<int> circle_traversal;
};

struct CircleSpec {
    double circumference = 0.0;
    std::size_t n_theta = 0;
};

PieceTemplate make_piece(PieceKind kind, const std::vector<CircleSpec>& circles, double h, double tube_length = 1.0);

/// A piece on its own as an open complex, boundary circles tagged.
CellComplex piece_complex(const PieceTemplate& p);

/// Scene data needed to build complexes.
struct Geometry {
    Graph graph;
    std::vector<PieceKind> kinds;
    std::vector<double> tube_lengths;
    std::vector<CircleSpec> sections; ///< per graph edge
    double h = 0.3;
};

/// Slab count used for a cylinder of half length r.
std::size_t cylinder_slabs(double r, double h);

CellComplex assemble(const Geometry& geo, double r);

/// Star of a vertex: its piece plus half-cylinders of n_slabs slabs of length
/// tau on every adjacent half-edge, in the same charts as assemble(geo, r).
CellComplex build_star(const Geometry& geo, std::size_t vertex, double r, std::size_t n_slabs);

struct GaussBonnetOperator {
    SpMat d0; ///< symmetrized
    SpMat d1;
    SpMat S;  ///< block coboundary on C0 + C1 + C2
    SpMat D;
    SpMat Delta;
};

GaussBonnetOperator operators(const CellComplex& c);

/// Cells with vartheta <= s kept, grouped by vertex.
struct Restriction {
    std::array<std::vector<std::size_t>, 3> cells;
    std::vector<std::size_t> flat; ///< indices into C0 + C1 + C2
    std::vector<std::size_t> component;
    CellComplex complex;
};

Restriction restrict_complex(const CellComplex& c, double s);

/// Cells of X^0(s) belonging to one vertex, in an order that depends only on
/// the piece and the charts, so X(r) and a star of the same r line up.
/// `sign` normalises theta-edges to the i -> i+1 direction.
struct RegionIndex {
    std::vector<std::size_t> flat;
    std::vector<int> sign;
};

RegionIndex vertex_region(const CellComplex& c, const Graph& g, std::size_t v, double s);

Vec gather(const RegionIndex& ri, const Vec& sym);

/// Keep only entries of a symmetric-coordinate vector listed in the restriction.
Vec restrict_vector(const Restriction& rs, const Vec& sym);

/// Primal k-cochain to dual (2-k)-cochain (raw values).
SpMat hodge_star(const CellComplex& c, int k);
SpMat hodge_star_inverse(const CellComplex& c, int k);
/// Star from dual (2-k)-cochains back to primal k-cochains, so that
/// dual_hodge_star(k) * hodge_star(k) = (-1)^{k(2-k)}.
SpMat dual_hodge_star(const CellComplex& c, int k);

/// Primal-to-primal star of a 1-form on cylinder charts (a dtheta + b dt ->
/// a dt - b dtheta), by averaging neighbouring values. Raw in, raw out;
/// cells outside charts are zero.
Vec cylinder_star_transfer(const CellComplex& c, const Vec& raw1);

/// Indices (into C1) of all edge cells lying on charts.
std::vector<std::size_t> chart_edge_cells(const CellComplex& c);

} // namespace hodgelab

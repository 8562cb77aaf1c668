#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hodgelab/exact.hpp"

namespace hodgelab {

struct EdgeSpec {
    std::string id;
    std::string tail;
    std::string head;
    std::string cross_section;
};

struct GraphSpec {
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
};

struct GraphEdge {
    std::string id;
    std::size_t tail = 0;
    std::size_t head = 0;
    std::string cross_section;

    bool is_loop() const { return tail == head; }
};

/// A pair (vertex, edge) with the orientation sign: +1 at the tail, -1 at the head.
struct HalfEdge {
    std::size_t vertex = 0;
    std::size_t edge = 0;
    int sign = 1;
};

/// Finite oriented graph with canonical (id-sorted) ordering of vertices and
/// edges. Self-loops and parallel edges are allowed. Immutable once built.
class Graph {
public:
    static Graph build(const GraphSpec& spec);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    /// All half-edges, grouped by edge: (tail, e, +1) then (head, e, -1).
    const std::vector<HalfEdge>& half_edges() const { return half_edges_; }

    /// Indices into half_edges() of the half-edges at vertex v, in edge order.
    const std::vector<std::size_t>& half_edges_at(std::size_t v) const { return at_vertex_[v]; }

    std::size_t half_edge_index(std::size_t edge, int sign) const { return 2 * edge + (sign > 0 ? 0 : 1); }

    std::size_t vertex_index(const std::string& id) const;
    std::size_t edge_index(const std::string& id) const;

    /// Number of connected components, by traversal.
    std::size_t component_count() const;

private:
    std::vector<std::string> vertices_;
    std::vector<GraphEdge> edges_;
    std::vector<HalfEdge> half_edges_;
    std::vector<std::vector<std::size_t>> at_vertex_;
};

/// Simplicial boundary C_1 -> C_0: column for (v, v') is e_{v'} - e_v.
IntMatrix boundary_matrix(const Graph& g);

struct GraphBetti {
    std::size_t rank_boundary = 0;
    std::size_t b0 = 0;
    std::size_t b1 = 0;
};

GraphBetti graph_betti(const Graph& g);

} // namespace hodgelab

#include "hodgelab/graph.hpp"

#include <algorithm>
#include <set>

#include "hodgelab/error.hpp"

namespace hodgelab {

const char* error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::GradeMissing: return "GradeMissing";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::InsufficientModes: return "InsufficientModes";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::BadTopology: return "BadTopology";
    case ErrorCode::GluingMismatch: return "GluingMismatch";
    case ErrorCode::OpenBoundaryLeft: return "OpenBoundaryLeft";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorCode::UnresolvedSpectrum: return "UnresolvedSpectrum";
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::EdgeNotCylindrical: return "EdgeNotCylindrical";
    case ErrorCode::MuTooLarge: return "MuTooLarge";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::CylinderTooShort: return "CylinderTooShort";
    case ErrorCode::RankDeficientInput: return "RankDeficientInput";
    case ErrorCode::ROutOfRange: return "ROutOfRange";
    case ErrorCode::TruncationTooShort: return "TruncationTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Graph Graph::build(const GraphSpec& spec)
{
    Graph g;
    g.vertices_ = spec.vertices;
    std::sort(g.vertices_.begin(), g.vertices_.end());
    if (std::adjacent_find(g.vertices_.begin(), g.vertices_.end()) != g.vertices_.end())
        throw Error(ErrorCode::DuplicateId, "vertex id repeated");

    std::vector<EdgeSpec> es = spec.edges;
    std::sort(es.begin(), es.end(), [](const EdgeSpec& a, const EdgeSpec& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < es.size(); ++i)
        if (es[i].id == es[i - 1].id) throw Error(ErrorCode::DuplicateId, "edge id '" + es[i].id + "' repeated");

    g.at_vertex_.assign(g.vertices_.size(), {});
    for (const auto& e : es) {
        auto find = [&](const std::string& v) {
            auto it = std::lower_bound(g.vertices_.begin(), g.vertices_.end(), v);
            if (it == g.vertices_.end() || *it != v)
                throw Error(ErrorCode::DanglingEndpoint, "edge '" + e.id + "' references unknown vertex '" + v + "'");
            return static_cast<std::size_t>(it - g.vertices_.begin());
        };
        GraphEdge ge{e.id, find(e.tail), find(e.head), e.cross_section};
        const std::size_t k = g.edges_.size();
        g.edges_.push_back(ge);
        g.half_edges_.push_back({ge.tail, k, +1});
        g.half_edges_.push_back({ge.head, k, -1});
        g.at_vertex_[ge.tail].push_back(2 * k);
        g.at_vertex_[ge.head].push_back(2 * k + 1);
    }
    return g;
}

std::size_t Graph::vertex_index(const std::string& id) const
{
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
    if (it == vertices_.end() || *it != id) throw Error(ErrorCode::DanglingEndpoint, "unknown vertex '" + id + "'");
    return static_cast<std::size_t>(it - vertices_.begin());
}

std::size_t Graph::edge_index(const std::string& id) const
{
    for (std::size_t k = 0; k < edges_.size(); ++k)
        if (edges_[k].id == id) return k;
    throw Error(ErrorCode::DanglingEndpoint, "unknown edge '" + id + "'");
}

std::size_t Graph::component_count() const
{
    std::vector<int> seen(vertices_.size(), 0);
    std::size_t count = 0;
    for (std::size_t s = 0; s < vertices_.size(); ++s) {
        if (seen[s]) continue;
        ++count;
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (auto h : at_vertex_[v]) {
                const auto& e = edges_[half_edges_[h].edge];
                const std::size_t w = (e.tail == v) ? e.head : e.tail;
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
    }
    return count;
}

IntMatrix boundary_matrix(const Graph& g)
{
    IntMatrix d(g.vertices().size(), g.edges().size());
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const auto& e = g.edges()[k];
        d(e.head, k) += 1;
        d(e.tail, k) -= 1;
    }
    return d;
}

GraphBetti graph_betti(const Graph& g)
{
    GraphBetti b;
    b.rank_boundary = exact_rank(boundary_matrix(g));
    b.b0 = g.vertices().size() - b.rank_boundary;
    b.b1 = g.edges().size() - b.rank_boundary;
    return b;
}

} // namespace hodgelab

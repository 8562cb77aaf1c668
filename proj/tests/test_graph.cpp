#include <algorithm>

#include "doctest.h"

#include "hodgelab/error.hpp"
#include "hodgelab/graph.hpp"

using namespace hodgelab;

namespace {

GraphSpec theta_spec()
{
    return {{"b", "a"}, {{"e2", "a", "b", "c"}, {"e0", "a", "b", "c"}, {"e1", "a", "b", "c"}}};
}

} // namespace

TEST_CASE("half-edges of a single edge")
{
    const Graph g = Graph::build({{"a", "b"}, {{"e", "a", "b", "c"}}});
    REQUIRE(g.half_edges().size() == 2);
    CHECK(g.half_edges()[0].vertex == 0);
    CHECK(g.half_edges()[0].sign == 1);
    CHECK(g.half_edges()[1].vertex == 1);
    CHECK(g.half_edges()[1].sign == -1);
}

TEST_CASE("isolated vertex has no half-edges")
{
    const Graph g = Graph::build({{"a"}, {}});
    CHECK(g.half_edges().empty());
    CHECK(g.component_count() == 1);
}

TEST_CASE("self-loop gives two opposite half-edges at one vertex")
{
    const Graph g = Graph::build({{"a"}, {{"e", "a", "a", "c"}}});
    REQUIRE(g.half_edges().size() == 2);
    CHECK(g.half_edges()[0].vertex == g.half_edges()[1].vertex);
    CHECK(g.half_edges()[0].sign == -g.half_edges()[1].sign);
    const GraphBetti b = graph_betti(g);
    CHECK(b.rank_boundary == 0);
    CHECK(b.b0 == 1);
    CHECK(b.b1 == 1);
    const IntMatrix d = boundary_matrix(g);
    CHECK(d(0, 0) == 0);
}

TEST_CASE("boundary column of an edge")
{
    const Graph g = Graph::build({{"a", "b"}, {{"e", "a", "b", "c"}}});
    const IntMatrix d = boundary_matrix(g);
    CHECK(d(0, 0) == -1);
    CHECK(d(1, 0) == 1);
}

TEST_CASE("theta graph Betti numbers")
{
    const Graph g = Graph::build(theta_spec());
    const GraphBetti b = graph_betti(g);
    CHECK(b.rank_boundary == 1);
    CHECK(b.b0 == 1);
    CHECK(b.b1 == 2);
    CHECK(g.edges()[0].id == "e0");
    CHECK(g.vertices()[0] == "a");
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(Graph::build({{"a", "a"}, {}}), Error);
    try {
        Graph::build({{"a"}, {{"e", "a", "z", "c"}}});
        FAIL("expected DanglingEndpoint");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DanglingEndpoint);
    }
    try {
        Graph::build({{"a", "b"}, {{"e", "a", "b", "c"}, {"e", "b", "a", "c"}}});
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateId);
    }
}

TEST_CASE("rank-nullity and component count on assorted graphs")
{
    const std::vector<GraphSpec> specs = {
        theta_spec(),
        {{"a", "b", "c", "d"}, {{"x", "a", "b", ""}, {"y", "c", "d", ""}, {"z", "d", "d", ""}}},
        {{"p", "q", "r"}, {{"1", "p", "q", ""}, {"2", "q", "r", ""}, {"3", "r", "p", ""}, {"4", "p", "p", ""}}},
    };
    for (const auto& s : specs) {
        const Graph g = Graph::build(s);
        const GraphBetti b = graph_betti(g);
        const QMatrix k = kernel_basis(to_rational(boundary_matrix(g)));
        CHECK(b.rank_boundary + k.cols() == g.edges().size());
        CHECK(b.b0 == g.component_count());
    }
}

TEST_CASE("reordering the input does not change the canonical layout")
{
    GraphSpec a = theta_spec();
    GraphSpec b = a;
    std::reverse(b.vertices.begin(), b.vertices.end());
    std::reverse(b.edges.begin(), b.edges.end());
    CHECK(boundary_matrix(Graph::build(a)) == boundary_matrix(Graph::build(b)));
}

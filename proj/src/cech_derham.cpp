#include "hodgelab/cech_derham.hpp"

#include "hodgelab/error.hpp"

namespace hodgelab {

void CochainSystem::validate() const
{
    const auto& g = graph;
    if (a_dims.size() != g.vertices().size() || b_dims.size() != g.edges().size()
        || l.size() != g.half_edges().size())
        throw Error(ErrorCode::ValidationError, "cochain system does not match the graph");
    for (const auto& d : a_dims)
        if (d.size() != n_grades) throw Error(ErrorCode::ValidationError, "vertex grade count mismatch");
    for (const auto& d : b_dims)
        if (d.size() != n_grades) throw Error(ErrorCode::ValidationError, "edge grade count mismatch");
    for (std::size_t h = 0; h < l.size(); ++h) {
        if (l[h].size() != n_grades)
            throw Error(ErrorCode::ValidationError, "need exactly one restriction matrix per grade");
        const auto& he = g.half_edges()[h];
        for (std::size_t q = 0; q < n_grades; ++q)
            if (l[h][q].rows() != b_dims[he.edge][q] || l[h][q].cols() != a_dims[he.vertex][q])
                throw Error(ErrorCode::ValidationError, "restriction matrix shape mismatch");
    }
}

std::size_t CochainSystem::c0_dim(std::size_t q) const
{
    std::size_t n = 0;
    for (const auto& d : a_dims) n += d[q];
    return n;
}

std::size_t CochainSystem::c1_dim(std::size_t q) const
{
    std::size_t n = 0;
    for (const auto& d : b_dims) n += d[q];
    return n;
}

QMatrix rho_matrix(const CochainSystem& sys, std::size_t grade)
{
    if (grade >= sys.n_grades) throw Error(ErrorCode::GradeMissing, "grade " + std::to_string(grade) + " not declared");
    const auto& g = sys.graph;
    std::vector<std::size_t> col0(g.vertices().size() + 1, 0), row0(g.edges().size() + 1, 0);
    for (std::size_t v = 0; v < g.vertices().size(); ++v) col0[v + 1] = col0[v] + sys.a_dims[v][grade];
    for (std::size_t e = 0; e < g.edges().size(); ++e) row0[e + 1] = row0[e] + sys.b_dims[e][grade];

    QMatrix rho(row0.back(), col0.back());
    for (std::size_t h = 0; h < g.half_edges().size(); ++h) {
        const auto& he = g.half_edges()[h];
        const QMatrix& m = sys.l[h][grade];
        // the head enters with +, the tail with -
        const int s = -he.sign;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                rho(row0[he.edge] + i, col0[he.vertex] + j) += Rational(s) * m(i, j);
    }
    return rho;
}

GradedCohomology cohomology(const CochainSystem& sys)
{
    GradedCohomology c;
    for (std::size_t q = 0; q < sys.n_grades; ++q) {
        const QMatrix rho = rho_matrix(sys, q);
        const std::size_t rk = exact_rank(rho);
        c.c0.push_back(sys.c0_dim(q));
        c.c1.push_back(sys.c1_dim(q));
        c.rank.push_back(rk);
        c.h0.push_back(c.c0.back() - rk);
        c.h1.push_back(c.c1.back() - rk);
        c.h0_basis.push_back(kernel_basis(rho));
        c.h1_reps.push_back(kernel_basis(rho.transpose()));
    }
    return c;
}

std::size_t predicted_betti(const GradedCohomology& coh, std::size_t k)
{
    if (k >= coh.h0.size()) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(k));
    return coh.h0[k] + (k > 0 ? coh.h1[k - 1] : 0);
}

std::vector<std::size_t> predicted_betti_all(const GradedCohomology& coh)
{
    std::vector<std::size_t> b;
    for (std::size_t k = 0; k < coh.h0.size(); ++k) b.push_back(predicted_betti(coh, k));
    return b;
}

SpectralTerms spectral_sequence_terms(const CochainSystem& sys)
{
    const GradedCohomology c = cohomology(sys);
    SpectralTerms t;
    t.e1 = {c.c0, c.c1};
    t.e2 = {c.h0, c.h1};
    t.total = predicted_betti_all(c);
    return t;
}

PieceKind parse_piece_kind(const std::string& name)
{
    if (name == "cap") return PieceKind::Cap;
    if (name == "tube") return PieceKind::Tube;
    if (name == "pants") return PieceKind::Pants;
    throw Error(ErrorCode::ValidationError, "unknown piece kind '" + name + "'");
}

const char* piece_kind_name(PieceKind kind)
{
    switch (kind) {
    case PieceKind::Cap: return "cap";
    case PieceKind::Tube: return "tube";
    case PieceKind::Pants: return "pants";
    }
    return "?";
}

std::size_t piece_circle_count(PieceKind kind)
{
    switch (kind) {
    case PieceKind::Cap: return 1;
    case PieceKind::Tube: return 2;
    case PieceKind::Pants: return 3;
    }
    return 0;
}

int piece_euler_characteristic(PieceKind kind) { return 2 - static_cast<int>(piece_circle_count(kind)); }

std::vector<std::size_t> piece_cohomology_dims(PieceKind kind)
{
    switch (kind) {
    case PieceKind::Cap: return {1, 0, 0};
    case PieceKind::Tube: return {1, 1, 0};
    case PieceKind::Pants: return {1, 2, 0};
    }
    return {};
}

std::vector<std::size_t> circle_cohomology_dims() { return {1, 1, 0}; }

QMatrix piece_restriction(PieceKind kind, std::size_t circle, std::size_t grade)
{
    const auto a = piece_cohomology_dims(kind);
    const auto b = circle_cohomology_dims();
    QMatrix m(b[grade], a[grade]);
    if (grade == 0) {
        m(0, 0) = 1;
    } else if (grade == 1) {
        if (kind == PieceKind::Tube) {
            m(0, 0) = 1;
        } else if (kind == PieceKind::Pants) {
            // generators dual to circles 0 and 1; circle 2 is minus their sum
            if (circle < 2) m(0, circle) = 1;
            else { m(0, 0) = -1; m(0, 1) = -1; }
        }
    }
    return m;
}

std::size_t circle_of_half_edge(const Graph& g, std::size_t half_edge)
{
    const auto& at = g.half_edges_at(g.half_edges()[half_edge].vertex);
    for (std::size_t i = 0; i < at.size(); ++i)
        if (at[i] == half_edge) return i;
    return 0;
}

CochainSystem preset_system(const Graph& g, const std::vector<PieceKind>& kinds)
{
    CochainSystem s;
    s.graph = g;
    s.n_grades = 3;
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        if (g.half_edges_at(v).size() != piece_circle_count(kinds[v]))
            throw Error(ErrorCode::BadTopology, "vertex '" + g.vertices()[v] + "' has " + std::to_string(g.half_edges_at(v).size())
                                                    + " half-edges but piece '" + piece_kind_name(kinds[v]) + "' has "
                                                    + std::to_string(piece_circle_count(kinds[v])) + " boundary circles");
        s.a_dims.push_back(piece_cohomology_dims(kinds[v]));
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) s.b_dims.push_back(circle_cohomology_dims());
    for (std::size_t h = 0; h < g.half_edges().size(); ++h) {
        const auto& he = g.half_edges()[h];
        std::vector<QMatrix> per;
        for (std::size_t q = 0; q < 3; ++q) per.push_back(piece_restriction(kinds[he.vertex], circle_of_half_edge(g, h), q));
        s.l.push_back(per);
    }
    return s;
}

} // namespace hodgelab

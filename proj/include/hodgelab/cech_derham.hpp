#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hodgelab/exact.hpp"
#include "hodgelab/graph.hpp"

namespace hodgelab {

/// Graded vertex/edge data with restriction maps l_{v,e}, one per half-edge
/// and grade. Grades run over 0..n_grades-1.
struct CochainSystem {
    Graph graph;
    std::size_t n_grades = 0;
    std::vector<std::vector<std::size_t>> a_dims; ///< [vertex][grade]
    std::vector<std::vector<std::size_t>> b_dims; ///< [edge][grade]
    std::vector<std::vector<QMatrix>> l;          ///< [half-edge][grade], b_dims x a_dims

    /// Throws ValidationError on shape mismatch.
    void validate() const;

    std::size_t c0_dim(std::size_t q) const;
    std::size_t c1_dim(std::size_t q) const;
};

struct GradedCohomology {
    std::vector<std::size_t> c0;
    std::vector<std::size_t> c1;
    std::vector<std::size_t> rank;
    std::vector<std::size_t> h0;
    std::vector<std::size_t> h1;
    std::vector<QMatrix> h0_basis; ///< columns, reduced echelon kernel basis of rho(q)
    std::vector<QMatrix> h1_reps;  ///< columns spanning the complement of im rho(q)
};

QMatrix rho_matrix(const CochainSystem& sys, std::size_t grade);

GradedCohomology cohomology(const CochainSystem& sys);

/// Predicted dim H^k of the glued manifold: h0(k) + h1(k-1).
std::size_t predicted_betti(const GradedCohomology& coh, std::size_t k);

std::vector<std::size_t> predicted_betti_all(const GradedCohomology& coh);

struct SpectralTerms {
    std::vector<std::vector<std::size_t>> e1; ///< [p][q], p in {0,1}
    std::vector<std::vector<std::size_t>> e2;
    std::vector<std::size_t> total;           ///< sum over p+q = k, with the degree shift
};

SpectralTerms spectral_sequence_terms(const CochainSystem& sys);

/// Cohomology of the standard pieces with circle cross-sections, in grades 0..2.
enum class PieceKind { Cap, Tube, Pants };

PieceKind parse_piece_kind(const std::string& name);
const char* piece_kind_name(PieceKind kind);
std::size_t piece_circle_count(PieceKind kind);
int piece_euler_characteristic(PieceKind kind);

std::vector<std::size_t> piece_cohomology_dims(PieceKind kind);
std::vector<std::size_t> circle_cohomology_dims();

/// Restriction H^q(piece) -> H^q(circle c).
QMatrix piece_restriction(PieceKind kind, std::size_t circle, std::size_t grade);

/// The circle of a piece met by half-edge h is its position among the
/// half-edges at that vertex.
std::size_t circle_of_half_edge(const Graph& g, std::size_t half_edge);

CochainSystem preset_system(const Graph& g, const std::vector<PieceKind>& kinds);

} // namespace hodgelab

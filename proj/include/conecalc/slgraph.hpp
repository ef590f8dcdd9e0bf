#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "conecalc/annulus.hpp"

namespace conecalc {

// Flat-model special-Lagrangian graph operator over R^m in C^m: the graph of
// dA is { x + i grad A(x) }, and the defect density is
//   F = Im det(I + i Hess A),
// zero exactly on special Lagrangian graphs. The symplectic condition is
// automatic for exact graphs; lagrangian_residual checks it for general
// 1-forms through the discrete exterior derivative.

struct GridScalarField {
    int m = 3;
    std::vector<double> lo, hi;   // box corners, size m
    std::vector<int> shape;       // nodes per axis, size m
    std::vector<double> values;   // row-major (last axis fastest)

    std::vector<double> spacing() const;
    std::size_t node_count() const;
    std::size_t index(const std::vector<int>& coord) const;
    void validate() const;
};

// Uniform grid over [lo, hi]^m sampled from a callable.
GridScalarField sample_grid_field(int m, const std::vector<double>& lo,
                                  const std::vector<double>& hi,
                                  const std::vector<int>& shape,
                                  const std::function<double(const std::vector<double>&)>& f);

struct GraphDefect {
    GridScalarField field;          // F values, grid-shaped
    std::vector<std::uint8_t> interior;  // 1 where every stencil is central
    double max_abs = 0.0;
    double max_abs_interior = 0.0;
};

// Per-node defect. Hessians by second-order central differences, one-sided
// second-order stencils at faces; the interior mask marks nodes free of
// one-sided stencils.
GraphDefect graph_defect(const GridScalarField& A);

// Max-norm of the discrete exterior derivative of a grid 1-form
// (components eta[0..m-1], each grid-shaped); zero iff the graph of eta is
// Lagrangian.
double lagrangian_residual(const std::vector<GridScalarField>& eta);

struct LinearizationRow {
    double t = 0.0;
    double remainder = 0.0;        // max interior |F(tA) - t * trace Hess A|
    double remainder_over_t2 = 0.0;
};

// Taylor check of the linearization: the first-order term of F(tA) is
// t * (-d*dA) with d*dA = -sum of pure second derivatives. The quadratic
// ratio remainder/t^2 stays bounded as t -> 0.
std::vector<LinearizationRow> linearization_check(const GridScalarField& A,
                                                  const std::vector<double>& t_values);

// Closed 1-form samples on a cone annulus: angular part as integrals over
// directed link edges (tail < head), radial part per vertex. Radial-major.
struct OneFormSamples {
    std::shared_ptr<const ConeAnnulus> annulus;
    std::vector<std::pair<int, int>> edges;  // canonical directed edges
    std::vector<double> angular;  // shell * E + edge
    std::vector<double> radial;   // shell * V + vertex

    void validate() const;
};

// Canonical edge list of a link mesh (i < j, sorted).
std::vector<std::pair<int, int>> link_edges(const TriMesh& mesh);

// Discrete closedness defect of the 1-form, relative to its scale:
// link part d_link(angular) per shell plus the mixed part
// d(angular)/dr - d_link(radial).
double one_form_closedness(const OneFormSamples& eta);

struct RadialPotential {
    std::vector<double> gamma_hat;  // r-independent angular remainder, per edge
    SampledField potential;         // A(sigma, r) = int_0^r radial part
    double residual = 0.0;          // max shell deviation of the remainder
    double tail_exponent = 0.0;     // fitted inner decay exponent of the radial part
};

// Primitive of a closed 1-form on the annulus by radial quadrature, with the
// inner tail extrapolated as a power law (exponent fitted from the innermost
// shells, falling back to mu_hint - 1). Non-integrable tails (exponent
// <= -1) raise a not-integrable error; non-closed input raises not-closed.
RadialPotential radial_potential(const OneFormSamples& eta, double mu_hint,
                                 double closedness_tol = 1e-3);

}  // namespace conecalc

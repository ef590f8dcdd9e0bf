#pragma once

#include <functional>
#include <vector>

#include "conecalc/spectrum.hpp"

namespace conecalc {

// Per-mode radial analysis on the cone over a link: separated harmonic
// extensions, the mode ODE in log-radius coordinates, and weighted two-point
// solves that realize the Fredholm windows one eigenvalue at a time.

// Mode equation on (r0, r1):
//   -f'' - (m-1) r^{-1} f' + lambda r^{-2} f = g(r)
// In t = log r this is constant-coefficient,
//   e^{-2t} ( -f_tt - (m-2) f_t + lambda f ) = g,
// whose characteristic exponents are exactly the indicial roots of lambda.
struct RadialBVP {
    int m = 3;
    double eigenvalue = 0.0;
    double r0 = 0.0, r1 = 0.0;  // 0 < r0 < r1
    std::function<double(double)> rhs;  // g(r)
    // Characteristic exponent selected by the Robin condition
    // f'(r_end) = (alpha / r_end) f(r_end) at each end. Canonically one of
    // the two indicial roots of `eigenvalue`; manufactured-solution callers
    // may pass any real exponent.
    double alpha_inner = 0.0;
    double alpha_outer = 0.0;
    // Normalization datum: target value of f at r1. Consulted only when the
    // Robin pair leaves a one-parameter family (ties broken in the caller's
    // favor); a uniquely solvable system wins over it.
    double outer_value = 0.0;

    void validate() const;
};

struct RadialSolution {
    std::vector<double> log_nodes;   // t = log r, uniform
    std::vector<double> values;      // f at the nodes
    double residual_norm = 0.0;      // max interior residual of the discrete ODE
    double normalization_gap = 0.0;  // |f(r1) - outer_value| after tie-breaking
    int kernel_dim = 0;              // dimension of the discrete solution family
    double alpha_inner = 0.0;
    double alpha_outer = 0.0;

    double radius(std::size_t i) const;
    // Cubic interpolation of f at radius r inside [r0, r1].
    double evaluate(double r) const;
};

// 4th-order finite differences on a uniform t-grid with `nodes` points.
// Raises a solvability error when the selected branch pair excludes every
// solution (the mode-wise cokernel obstruction).
RadialSolution mode_poisson_solve(const RadialBVP& problem, int nodes, double tol);

// Separated extension u(sigma, r) = r^alpha v(sigma) of a discrete link
// eigenfunction, with the discrete cone-Laplacian residual
//   r^{alpha-2} ( (M^{-1} K v) - alpha (alpha + m - 2) v )
// reported per sample. When alpha is an indicial root of the eigenvalue the
// residual reduces to pure FEM consistency error.
struct HarmonicExtension {
    std::vector<double> radii;
    std::vector<double> values;     // radial-major: shell * V + vertex
    std::vector<double> residuals;  // same layout
    double max_residual = 0.0;      // sup over samples
    // Mass-weighted RMS of the residual. The lumped discrete Laplacian is
    // consistent in this norm but not pointwise at irregular vertices, so
    // the sup can stay O(1) on meshes where the RMS vanishes under
    // refinement.
    double rms_residual = 0.0;
};

HarmonicExtension harmonic_extension(const TriMesh& mesh, const std::vector<double>& v,
                                     double eigenvalue, double alpha,
                                     const std::vector<double>& radii,
                                     double eigen_tol = 1e-6);

// Dimension of the space of bounded harmonic functions on an AC manifold
// asymptotic to the cone: the multiplicity of link eigenvalue 0.
int bounded_harmonic_dim(const SpectrumTable& spectrum);

}  // namespace conecalc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conecalc/mesh.hpp"

namespace conecalc {

enum class SpectrumSource { SphereAnalytic, TorusAnalytic, Fem, External };

const char* to_string(SpectrumSource s);
SpectrumSource spectrum_source_from_string(const std::string& s);

struct SpectrumEntry {
    double lambda = 0.0;  // eigenvalue of the link Laplacian, >= 0
    int mult = 1;
};

// Sorted eigenvalue/multiplicity table of the link Laplacian. Completeness
// contract: every eigenvalue <= coverage_max is present.
struct SpectrumTable {
    int link_dim = 2;  // m-1
    std::vector<SpectrumEntry> entries;
    SpectrumSource source = SpectrumSource::External;
    double coverage_max = 0.0;
    // Relative tolerance used when clustering nearby eigenvalues into one
    // entry; downstream multiplicity lookups reuse it.
    double cluster_tol = 1e-9;

    // Checks: first entry is eigenvalue 0, strictly ascending eigenvalues,
    // positive multiplicities, no two entries within the clustering tolerance.
    void validate() const;

    // Multiplicity of the 0 eigenvalue (= number of link components).
    int kernel_multiplicity() const;

    // Multiplicity of `lambda` under this table's clustering tolerance;
    // 0 when absent.
    int multiplicity_at(double lambda) const;

    // Smallest nonzero eigenvalue; error if the table holds only 0.
    double first_nonzero() const;
};

// Cluster raw eigenvalues (ascending, possibly with near-duplicates) into a
// table. Values with |lambda| <= zero_snap_abs are snapped to exactly 0.
SpectrumTable make_spectrum_table(int link_dim, std::vector<double> raw,
                                  SpectrumSource source, double coverage_max,
                                  double cluster_tol, double zero_snap_abs);

// Rank-n lattice spanning a flat torus R^n / Lambda. Rows of `basis` are the
// generators in orthonormal coordinates; gram = basis * basis^T.
struct LatticeBasis {
    int dim = 0;
    std::vector<double> basis;  // row-major n x n

    std::vector<double> gram() const;
    void validate() const;  // nonsingular, gram SPD
};

// --- analytic backends ---------------------------------------------------

// Unit sphere S^{m-1}: eigenvalues k(k+m-2) with multiplicity the dimension
// of degree-k harmonic polynomials in m variables, k = 0..degree_max.
SpectrumTable sphere_spectrum(int m, int degree_max);

// Degree-k harmonic polynomial dimension in m variables.
std::int64_t harmonic_poly_dim(int m, int k);

// All eigenvalues 4 pi^2 |mu|^2 <= lambda_max over dual-lattice vectors mu.
SpectrumTable flat_torus_spectrum(const LatticeBasis& lattice, double lambda_max);

// Lattice of the flat (m-1)-torus link of the diagonal torus cone in C^m:
// Sigma = { m^{-1/2} (e^{i th_1}, ..., e^{i th_m}) : sum th_j = 0 },
// i.e. Lambda = { th in 2 pi Z^m : sum th_j = 0 } with quadratic form
// |th|^2 / m, expressed in an orthonormal basis of the hyperplane.
LatticeBasis clifford_link_lattice(int m);

// --- FEM backend ----------------------------------------------------------

// Piecewise-linear cotangent stiffness K and lumped (diagonal) mass M.
struct CotanSystem {
    int n = 0;
    // CSR symmetric stiffness
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> values;
    std::vector<double> mass;  // lumped diagonal

    void multiply_stiffness(const double* x, double* y) const;  // y = K x
};

CotanSystem assemble_cotan(const TriMesh& mesh);

struct FemOptions {
    double tol = 1e-9;          // relative eigenpair residual target
    double cluster_tol = 1e-6;  // relative eigenvalue clustering tolerance
    std::uint64_t seed = 20240601;
    int max_basis = 0;          // 0 = automatic
};

// Smallest `count` eigenvalues of K v = lambda M v by shift-invert Lanczos
// with full reorthogonalization. Deterministic for a fixed seed.
SpectrumTable fem_spectrum(const TriMesh& mesh, int count, const FemOptions& opts = {});

// Converged eigenpairs, for callers that need the modes themselves
// (harmonic extension, Rayleigh checks).
struct EigenPairs {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> vectors;  // M-orthonormal
};

EigenPairs fem_eigenpairs(const TriMesh& mesh, int count, const FemOptions& opts = {});

}  // namespace conecalc

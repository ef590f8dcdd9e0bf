#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conecalc/spectrum.hpp"

namespace conecalc {

// Weight calculus of the cone Laplacian on weighted Sobolev spaces:
// indicial roots, exceptional weights, growth counts, Fredholm windows and
// index values, rate admissibility and improvement, rigidity certificates.

enum class RootBranch { Plus, Minus };

struct IndicialRoot {
    double alpha = 0.0;
    double eigenvalue = 0.0;  // alpha * (alpha + m - 2)
    int multiplicity = 1;
    RootBranch branch = RootBranch::Plus;
};

struct IndicialPair {
    double alpha_minus = 0.0;
    double alpha_plus = 0.0;
    bool log_possible = false;  // degenerate discriminant; never true for m > 2
};

// Both solutions of alpha (alpha + m - 2) = eigenvalue.
IndicialPair indicial_roots(double eigenvalue, int m);

// The exceptional weights of one cone over a guaranteed-complete window.
struct ExceptionalSet {
    int m = 3;
    std::vector<IndicialRoot> roots;  // ascending in alpha
    double range_lo = 0.0;
    double range_hi = 0.0;
    double spectrum_coverage_max = 0.0;

    // Multiplicity at a weight (0 when not a root).
    int multiplicity_at(double alpha) const;

    // Wall detection: |beta - alpha| <= 1e-9 (1 + |alpha|). Returns the root.
    std::optional<IndicialRoot> wall_at(double beta) const;

    void require_range(double lo, double hi, const char* what) const;
};

// All indicial roots with alpha in [lo, hi]. Refuses windows the spectrum's
// coverage cannot certify as complete.
ExceptionalSet exceptional_set(const SpectrumTable& spectrum, int m, double lo, double hi);

// Signed cumulative multiplicity count:
//   delta < 0:  -sum over roots in (delta, 0)   (both endpoints open)
//   delta >= 0:  sum over roots in [0, delta]   (both endpoints closed)
// Worked table for the round 2-sphere link (roots at the integers, with
// multiplicities 1,3,5,... going outward from the gap (-1,0)):
//   delta   : -2.5  -2   -1.5  -1   -0.5   0    0.5   1    1.5   2
//   N(delta): -4    -1   -1     0    0     1    1     4    4     9
// Monotone nondecreasing, upper semicontinuous, jumping by the root's
// multiplicity exactly at each root.
int growth_count(const ExceptionalSet& D, double delta);

struct WeightVector {
    std::vector<double> betas;
    std::vector<const ExceptionalSet*> cones;  // same length as betas
};

enum class IndexConvention { Conical, Ac };

struct IndexReport {
    bool fredholm = false;
    std::optional<long> index;
    std::vector<int> per_cone_counts;
    std::optional<std::pair<int, double>> wall;  // (cone index, alpha)
    std::vector<std::pair<double, double>> windows;  // per-cone Fredholm component
};

// Fredholm verdict, index and per-cone windows for a weight vector.
// A weight on a wall raises a fredholm-wall error (the report in the
// exception message names the offending root); it is never a silent verdict.
IndexReport fredholm_index(const WeightVector& weights, IndexConvention convention);

// True iff no root lies in (2, mu]; mu must be in the open interval (2,3).
bool rate_admissible(const ExceptionalSet& D, double mu);

// Exclusive supremum of admissible improved rates: min(3, first root in (2,3)).
double rate_sup(const ExceptionalSet& D);

// Abstract rate bootstrap: seed, then repeatedly min(3, 2 lambda - 2) until
// the cap 3 is reached. Terminates because 2^j (seed - 2) eventually >= 1.
std::vector<double> bootstrap_trace(double seed);

// Maximal root-free open interval around lam, intersected with (-inf, 2).
std::pair<double, double> rate_component(const ExceptionalSet& D, double lam);

struct RateImprovement {
    double best_rate = 0.0;
    bool exclusive = true;  // true: any rate strictly above best_rate works
};

// Best decay rate at infinity reachable from lam in [0, first positive root):
// with a trivial obstruction class the rate improves past 0 down to the
// exclusive bound max(-2, 2-m); otherwise rate 0 holds inclusively.
RateImprovement ac_rate_improve(const ExceptionalSet& D, int m, double lam, bool y_is_zero);

// Reference kernel dimensions of the weighted Laplacian on a compact
// manifold with one conical singularity modeled on this calculus: trivial
// kernel for positive weights, constants only for weights in the gap
// (2-m, 0). Bookkeeping data, not a computation; weights on a wall or
// below the gap have no single reference value and return nothing.
std::optional<int> kernel_dim_reference(double beta, int m);

struct RigidityReport {
    int m = 3;
    int mult_at_2m = 0;
    int expected = 0;
    int dim_g = 0;
    bool rigid = false;
    int deficiency = 0;  // signed: mult_at_2m - expected
};

// Rigidity certificate: the cone is rigid iff the multiplicity of the link
// eigenvalue 2m equals m^2 - 1 - dim G, G the special-unitary stabilizer.
RigidityReport rigidity_test(const SpectrumTable& spectrum, int m, int dim_g);

}  // namespace conecalc

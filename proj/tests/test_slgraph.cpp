#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "conecalc/error.hpp"
#include "conecalc/slgraph.hpp"

using namespace conecalc;

namespace {

GridScalarField diagonal_quadratic(double a, double b, double c, int n = 9) {
    return sample_grid_field(3, {-1, -1, -1}, {1, 1, 1}, {n, n, n},
                             [a, b, c](const std::vector<double>& x) {
                                 return 0.5 * (a * x[0] * x[0] + b * x[1] * x[1] +
                                               c * x[2] * x[2]);
                             });
}

GridScalarField smooth_random(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c1 = u(rng), c2 = u(rng), c3 = u(rng), c4 = u(rng);
    return sample_grid_field(3, {-1, -1, -1}, {1, 1, 1}, {n, n, n},
                             [=](const std::vector<double>& x) {
                                 return c1 * std::sin(x[0] + 2 * x[1]) +
                                        c2 * std::cos(x[2]) * x[0] +
                                        c3 * x[0] * x[1] * x[2] +
                                        c4 * std::sin(3 * x[2]) * std::cos(x[1]);
                             });
}

}  // namespace

TEST_CASE("zero potential has zero defect") {
    GridScalarField zero = diagonal_quadratic(0, 0, 0);
    GraphDefect d = graph_defect(zero);
    CHECK(d.max_abs == 0.0);
}

TEST_CASE("diagonal quadratic defect is a+b+c-abc everywhere") {
    const double a = 0.7, b = -1.3, c = 0.4;
    GraphDefect d = graph_defect(diagonal_quadratic(a, b, c));
    const double expect = a + b + c - a * b * c;
    // Quadratics are exact for second-order stencils, including the
    // one-sided face rows.
    for (double F : d.field.values) CHECK(F == doctest::Approx(expect).epsilon(1e-12));
    CHECK(d.max_abs_interior == doctest::Approx(std::fabs(expect)));
}

TEST_CASE("isotropic quadratic gives 3t - t^3") {
    for (double t : {0.3, 1.0, -0.8}) {
        GraphDefect d = graph_defect(diagonal_quadratic(t, t, t));
        CHECK(d.field.values[d.field.node_count() / 2] ==
              doctest::Approx(3.0 * t - t * t * t).epsilon(1e-12));
    }
}

TEST_CASE("defect is odd under sign flip for diagonal quadratics") {
    const double a = 0.9, b = 0.2, c = -0.6;
    GraphDefect dp = graph_defect(diagonal_quadratic(a, b, c));
    GraphDefect dn = graph_defect(diagonal_quadratic(-a, -b, -c));
    for (std::size_t i = 0; i < dp.field.values.size(); ++i)
        CHECK(dp.field.values[i] == doctest::Approx(-dn.field.values[i]).epsilon(1e-12));
}

TEST_CASE("dimension guard") {
    GridScalarField g;
    g.m = 2;
    g.lo = {0, 0};
    g.hi = {1, 1};
    g.shape = {5, 5};
    g.values.assign(25, 0.0);
    CHECK_THROWS_AS(graph_defect(g), Error);
}

TEST_CASE("higher-dimensional defect via the complex determinant") {
    // m=4 isotropic quadratic: Im (1+it)^4 = 4t - 4t^3.
    const double t = 0.5;
    GridScalarField A = sample_grid_field(4, {-1, -1, -1, -1}, {1, 1, 1, 1}, {5, 5, 5, 5},
                                          [t](const std::vector<double>& x) {
                                              double s = 0.0;
                                              for (double xi : x) s += xi * xi;
                                              return 0.5 * t * s;
                                          });
    GraphDefect d = graph_defect(A);
    const double expect = 4.0 * t - 4.0 * t * t * t;
    for (double F : d.field.values) CHECK(F == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("lagrangian residual of exact and non-exact forms") {
    std::mt19937_64 rng(31);
    GridScalarField A = smooth_random(17, rng);

    // eta = dA by central differences is closed to truncation error.
    const auto h = A.spacing();
    std::vector<GridScalarField> dA(3, A);
    const int n = A.shape[0];
    auto at = [&](const GridScalarField& g, int i, int j, int k) {
        return g.values[(static_cast<std::size_t>(i) * n + j) * n + k];
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::size_t idx = (static_cast<std::size_t>(i) * n + j) * n + k;
                auto d1 = [&](int a) {
                    int ci[3] = {i, j, k};
                    int lo[3] = {i, j, k}, hi2[3] = {i, j, k};
                    if (ci[a] == 0) {
                        hi2[a] = 1;
                        return (at(A, hi2[0], hi2[1], hi2[2]) - at(A, lo[0], lo[1], lo[2])) / h[a];
                    }
                    if (ci[a] == n - 1) {
                        lo[a] = n - 2;
                        return (at(A, hi2[0], hi2[1], hi2[2]) - at(A, lo[0], lo[1], lo[2])) / h[a];
                    }
                    lo[a] -= 1;
                    hi2[a] += 1;
                    return (at(A, hi2[0], hi2[1], hi2[2]) - at(A, lo[0], lo[1], lo[2])) /
                           (2.0 * h[a]);
                };
                dA[0].values[idx] = d1(0);
                dA[1].values[idx] = d1(1);
                dA[2].values[idx] = d1(2);
            }
    // Discrete curl of a central-difference gradient vanishes identically in
    // the interior (the stencils commute).
    CHECK(lagrangian_residual(dA) <= 1e-12);

    // eta = (x2, 0, 0): d eta has one unit coefficient.
    GridScalarField e0 = sample_grid_field(3, {-1, -1, -1}, {1, 1, 1}, {9, 9, 9},
                                           [](const std::vector<double>& x) { return x[1]; });
    GridScalarField zero = diagonal_quadratic(0, 0, 0);
    CHECK(lagrangian_residual({e0, zero, zero}) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(lagrangian_residual({zero, zero, zero}) == 0.0);
}

TEST_CASE("linearization remainder: exact cubic for diagonal quadratics") {
    const double a = 0.8, b = -0.5, c = 1.1;
    GridScalarField A = diagonal_quadratic(a, b, c);
    auto rows = linearization_check(A, {1e-1, 1e-2, 1e-3});
    for (const auto& row : rows) {
        double expect = std::fabs(row.t * row.t * row.t * a * b * c);
        CHECK(row.remainder == doctest::Approx(expect).epsilon(1e-9));
        CHECK(row.remainder_over_t2 ==
              doctest::Approx(std::fabs(row.t * a * b * c)).epsilon(1e-9));
    }
    // A == 0: identically zero remainder.
    auto zrows = linearization_check(diagonal_quadratic(0, 0, 0), {1e-2});
    CHECK(zrows[0].remainder == 0.0);
}

TEST_CASE("linearization remainder ratio is bounded with a stable cubic coefficient") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 5; ++trial) {
        GridScalarField A = smooth_random(17, rng);
        auto rows = linearization_check(A, {1e-1, 1e-2, 1e-3});
        // Quadratic-contract boundedness: remainder/t^2 decreases with t.
        CHECK(rows[1].remainder_over_t2 <= rows[0].remainder_over_t2 * (1.0 + 1e-9));
        CHECK(rows[2].remainder_over_t2 <= rows[1].remainder_over_t2 * (1.0 + 1e-9));
        // The observed cubic coefficient remainder/t^3 is stable between the
        // two smallest scales.
        double c1 = rows[1].remainder / std::pow(rows[1].t, 3);
        double c2 = rows[2].remainder / std::pow(rows[2].t, 3);
        CHECK(std::fabs(c1 - c2) <= 0.1 * std::max(c1, c2));
    }
}

TEST_CASE("radial potential of an exact power form") {
    auto an = std::make_shared<ConeAnnulus>(icosphere(2), 3, 0.05, 1.0, 65, 0.0);
    const int nv = an->vertex_count();
    const int shells = an->shell_count();
    auto edges = link_edges(an->link());
    const double mu = 2.5;

    // v(sigma): a smooth link function; eta = d(r^mu v).
    std::vector<double> v(nv);
    for (int i = 0; i < nv; ++i) v[i] = 1.0 + 0.5 * an->link().vertex(i)[0];

    OneFormSamples eta;
    eta.annulus = an;
    eta.edges = edges;
    eta.angular.resize(static_cast<std::size_t>(shells) * edges.size());
    eta.radial.resize(static_cast<std::size_t>(shells) * nv);
    for (int s = 0; s < shells; ++s) {
        double rmu = std::pow(an->radii()[s], mu);
        for (std::size_t e = 0; e < edges.size(); ++e)
            eta.angular[static_cast<std::size_t>(s) * edges.size() + e] =
                rmu * (v[edges[e].second] - v[edges[e].first]);
        double drmu = mu * std::pow(an->radii()[s], mu - 1.0);
        for (int i = 0; i < nv; ++i)
            eta.radial[static_cast<std::size_t>(s) * nv + i] = drmu * v[i];
    }

    RadialPotential rp = radial_potential(eta, mu);
    CHECK(rp.tail_exponent == doctest::Approx(mu - 1.0).epsilon(1e-6));
    for (int s = 0; s < shells; ++s) {
        double rmu = std::pow(an->radii()[s], mu);
        for (int i = 0; i < nv; ++i)
            CHECK(rp.potential.at(s, i) == doctest::Approx(rmu * v[i]).epsilon(5e-6));
    }
    for (double g : rp.gamma_hat) CHECK(std::fabs(g) <= 5e-6);
    CHECK(rp.residual <= 5e-6);
}

TEST_CASE("radial potential of a pulled-back link form") {
    auto an = std::make_shared<ConeAnnulus>(flat_torus_mesh(12), 3, 0.1, 1.0, 33, 0.0);
    auto edges = link_edges(an->link());
    const int nv = an->vertex_count();
    const int shells = an->shell_count();

    // A closed but non-exact link 1-form on the torus: the angular class
    // d(theta_x) integrated along edges of the periodic grid.
    const int n = 12;
    OneFormSamples eta;
    eta.annulus = an;
    eta.edges = edges;
    eta.angular.resize(static_cast<std::size_t>(shells) * edges.size());
    eta.radial.assign(static_cast<std::size_t>(shells) * nv, 0.0);
    std::vector<double> gamma(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        int i0 = edges[e].first / n, i1 = edges[e].second / n;
        double dx = (i1 - i0) / static_cast<double>(n);
        if (dx > 0.5) dx -= 1.0;
        if (dx < -0.5) dx += 1.0;
        gamma[e] = dx;  // integral of d(theta_x)/(2 pi) along the edge
    }
    for (int s = 0; s < shells; ++s)
        for (std::size_t e = 0; e < edges.size(); ++e)
            eta.angular[static_cast<std::size_t>(s) * edges.size() + e] = gamma[e];

    RadialPotential rp = radial_potential(eta, 2.5);
    for (std::size_t i = 0; i < rp.potential.values.size(); ++i)
        CHECK(std::fabs(rp.potential.values[i]) <= 1e-12);
    for (std::size_t e = 0; e < edges.size(); ++e)
        CHECK(rp.gamma_hat[e] == doctest::Approx(gamma[e]).epsilon(1e-12));
    CHECK(rp.residual <= 1e-12);
}

TEST_CASE("slowly decaying but integrable radial part is accepted") {
    auto an = std::make_shared<ConeAnnulus>(icosphere(1), 3, 0.05, 1.0, 65, 0.0);
    auto edges = link_edges(an->link());
    const int nv = an->vertex_count();
    const int shells = an->shell_count();

    OneFormSamples eta;
    eta.annulus = an;
    eta.edges = edges;
    eta.angular.assign(static_cast<std::size_t>(shells) * edges.size(), 0.0);
    eta.radial.resize(static_cast<std::size_t>(shells) * nv);
    for (int s = 0; s < shells; ++s)
        for (int i = 0; i < nv; ++i)
            eta.radial[static_cast<std::size_t>(s) * nv + i] = std::sqrt(an->radii()[s]);

    // eta^2 = r^{1/2} decays too slowly for the conical-rate hypotheses but
    // stays integrable: A = (2/3) r^{3/2}.
    RadialPotential rp = radial_potential(eta, 1.5);
    CHECK(rp.tail_exponent == doctest::Approx(0.5).epsilon(1e-9));
    for (int s = 0; s < shells; ++s) {
        double expect = 2.0 / 3.0 * std::pow(an->radii()[s], 1.5);
        CHECK(rp.potential.at(s, 0) == doctest::Approx(expect).epsilon(1e-5));
    }

    // A non-integrable tail r^{-1.2} is refused.
    for (int s = 0; s < shells; ++s)
        for (int i = 0; i < nv; ++i)
            eta.radial[static_cast<std::size_t>(s) * nv + i] =
                std::pow(an->radii()[s], -1.2);
    CHECK_THROWS_AS(radial_potential(eta, 1.5), Error);

    // Breaking closedness is refused too.
    for (int s = 0; s < shells; ++s)
        for (int i = 0; i < nv; ++i)
            eta.radial[static_cast<std::size_t>(s) * nv + i] = std::sqrt(an->radii()[s]);
    eta.angular[3] = 0.5;
    CHECK_THROWS_AS(radial_potential(eta, 1.5), Error);
}

TEST_CASE("potential recovery is unique up to a constant") {
    // radial_potential applied to d(A) recovers A up to one additive
    // constant per link component; with A(r0) pinned by the tail rule the
    // recovered field matches the generator exactly.
    auto an = std::make_shared<ConeAnnulus>(icosphere(1), 3, 0.02, 1.0, 129, 0.0);
    auto edges = link_edges(an->link());
    const int nv = an->vertex_count();
    const int shells = an->shell_count();
    const double mu = 2.2;

    OneFormSamples eta;
    eta.annulus = an;
    eta.edges = edges;
    eta.angular.assign(static_cast<std::size_t>(shells) * edges.size(), 0.0);
    eta.radial.resize(static_cast<std::size_t>(shells) * nv);
    for (int s = 0; s < shells; ++s)
        for (int i = 0; i < nv; ++i)
            eta.radial[static_cast<std::size_t>(s) * nv + i] =
                mu * std::pow(an->radii()[s], mu - 1.0);
    RadialPotential rp = radial_potential(eta, mu);
    for (int s = 0; s < shells; ++s)
        CHECK(rp.potential.at(s, 0) ==
              doctest::Approx(std::pow(an->radii()[s], mu)).epsilon(1e-6));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "conecalc/annulus.hpp"
#include "conecalc/error.hpp"
#include "conecalc/indicial.hpp"

using namespace conecalc;

namespace {

const double kPi = std::acos(-1.0);

std::shared_ptr<const ConeAnnulus> s2_annulus(double a, double r1 = 1.0, int shells = 129,
                                              int level = 3) {
    return std::make_shared<ConeAnnulus>(icosphere(level), 3, a, r1, shells, 4.0 * kPi);
}

// Random separable field h(r) * v(sigma) with smooth ingredients.
SampledField random_field(std::shared_ptr<const ConeAnnulus> an, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double a0 = u(rng), a1 = u(rng), p = 1.5 * u(rng);
    SampledField f;
    f.annulus = an;
    f.values.resize(an->sample_count());
    const int nv = an->vertex_count();
    for (int s = 0; s < an->shell_count(); ++s) {
        double h = a0 * std::pow(an->radii()[s], p) + a1;
        for (int v = 0; v < nv; ++v) {
            const double* x = an->link().vertex(v);
            f.values[static_cast<std::size_t>(s) * nv + v] = h * (1.0 + 0.5 * x[0] + 0.3 * x[1] * x[2]);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("radius function caps at one") {
    auto an = std::make_shared<ConeAnnulus>(icosphere(1), 3, 0.3, 2.0, 17, 4.0 * kPi);
    bool saw_inner = false, saw_cap = false;
    for (int s = 0; s < an->shell_count(); ++s) {
        double r = an->radii()[s];
        double rho = an->radius_function(s);
        if (r < 1.0) {
            CHECK(rho == doctest::Approx(r));
            saw_inner = true;
        } else {
            CHECK(rho == 1.0);
            if (r > 1.0) saw_cap = true;
        }
    }
    CHECK(saw_inner);
    CHECK(saw_cap);
}

TEST_CASE("weighted sup norms on power fields") {
    const double a = 1e-2;
    auto an = s2_annulus(a);

    // rho^beta has unit C^0_beta norm.
    for (double beta : {-1.5, 0.0, 2.0}) {
        SampledField f = make_power_field(an, beta);
        CHECK(weighted_ck_norm(f, beta, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Constants: |rho^0 * 1| = 1.
    SampledField one = make_power_field(an, 0.0);
    CHECK(weighted_ck_norm(one, 0.0, 0) == doctest::Approx(1.0));

    // f = rho with weight beta=2: sup rho^{-1} attained at the inner edge.
    SampledField rho = make_power_field(an, 1.0);
    CHECK(weighted_ck_norm(rho, 2.0, 0) == doctest::Approx(1.0 / a).epsilon(1e-12));

    // Missing stacks for k >= 1 raise an input error.
    SampledField bare = make_radial_field(an, std::vector<double>(an->shell_count(), 1.0));
    CHECK_THROWS_AS(weighted_ck_norm(bare, 0.0, 1), Error);
}

TEST_CASE("weighted Lp norms reproduce analytic annulus integrals") {
    const double a = 1e-3;
    auto an = s2_annulus(a, 1.0, 257, 3);

    // ||rho^beta||_{2,0,beta} = (4 pi ln(1/a))^{1/2} exactly on the S^2 link.
    const double logint = 4.0 * kPi * std::log(1.0 / a);
    for (double beta : {-1.0, 0.5, 2.0}) {
        SampledField f = make_power_field(an, beta);
        CHECK(weighted_lp_norm(f, 2.0, beta, 0) ==
              doctest::Approx(std::sqrt(logint)).epsilon(1e-3));
    }

    // ||1||_{1,0,0} = 4 pi ln(1/a).
    SampledField one = make_power_field(an, 0.0);
    CHECK(weighted_lp_norm(one, 1.0, 0.0, 0) == doctest::Approx(logint).epsilon(1e-3));

    // Zero field.
    SampledField zero = make_radial_field(an, std::vector<double>(an->shell_count(), 0.0));
    CHECK(weighted_lp_norm(zero, 2.0, 1.0, 0) == 0.0);

    // Weight -m/2 at p=2 makes the rho power trivial: plain unweighted L^2.
    SampledField f = make_power_field(an, 1.0);
    double direct = 0.0;
    const auto& w = an->volume_weights();
    for (std::size_t i = 0; i < w.size(); ++i) direct += w[i] * f.values[i] * f.values[i];
    CHECK(weighted_lp_norm(f, 2.0, -1.5, 0) == doctest::Approx(std::sqrt(direct)).epsilon(1e-12));
}

TEST_CASE("gradient and hessian stacks against power-law formulas") {
    auto an = s2_annulus(0.05, 1.0, 65, 3);
    const double beta = 1.7;
    SampledField exact = make_power_field(an, beta);

    SampledField fd = make_radial_field(an, [&] {
        std::vector<double> prof(an->shell_count());
        for (int s = 0; s < an->shell_count(); ++s)
            prof[s] = std::pow(an->radii()[s], beta);
        return prof;
    }());
    attach_gradient(fd);
    attach_hessian_radial(fd);
    for (std::size_t i = 0; i < fd.values.size(); ++i) {
        CHECK(fd.grad_mag[i] == doctest::Approx(exact.grad_mag[i]).epsilon(1e-6));
        CHECK(fd.hess_mag[i] == doctest::Approx(exact.hess_mag[i]).epsilon(1e-4));
    }

    // C^k norms of rho^beta on r <= 1: sup rho^{-beta+j} |d^j rho^beta|.
    double n0 = weighted_ck_norm(exact, beta, 0);
    double n1 = weighted_ck_norm(exact, beta, 1);
    CHECK(n0 == doctest::Approx(1.0));
    CHECK(n1 == doctest::Approx(1.0 + std::fabs(beta)).epsilon(1e-10));
}

TEST_CASE("capped radius function in the Lp quadrature") {
    // Annulus reaching past r = 1: rho freezes at 1 outside the unit ball,
    // so for f = 1, beta = 0, p = 1:
    //   int rho^{-m} dV = vol(S^2) ( int_{1/2}^1 dr/r + int_1^2 r^{m-1} dr )
    //                   = 4 pi ( ln 2 + 7/3 )  for m = 3.
    auto an = std::make_shared<ConeAnnulus>(icosphere(3), 3, 0.5, 2.0, 257, 4.0 * kPi);
    SampledField one = make_radial_field(an, std::vector<double>(an->shell_count(), 1.0));
    double expect = 4.0 * kPi * (std::log(2.0) + 7.0 / 3.0);
    CHECK(weighted_lp_norm(one, 1.0, 0.0, 0) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("norm monotonicity in the weight") {
    auto an = s2_annulus(1e-2);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        SampledField f = random_field(an, rng);
        double beta = -2.0 + 0.17 * trial;
        double gamma = beta - 0.9;
        // rho <= 1 so rho^{-gamma} <= rho^{-beta}: gamma-norm dominated.
        CHECK(weighted_ck_norm(f, gamma, 0) <= weighted_ck_norm(f, beta, 0) * (1.0 + 1e-12));
        CHECK(weighted_lp_norm(f, 2.0, gamma, 0) <=
              weighted_lp_norm(f, 2.0, beta, 0) * (1.0 + 1e-12));
    }
}

TEST_CASE("norms are absolutely homogeneous and satisfy the triangle inequality") {
    auto an = s2_annulus(1e-2, 1.0, 65, 2);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        SampledField f = random_field(an, rng);
        SampledField g = random_field(an, rng);
        SampledField sum = f;
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
        double beta = -1.0 + 0.05 * trial;

        SampledField scaled = f;
        for (double& v : scaled.values) v *= -2.5;
        CHECK(weighted_lp_norm(scaled, 2.0, beta, 0) ==
              doctest::Approx(2.5 * weighted_lp_norm(f, 2.0, beta, 0)).epsilon(1e-12));
        CHECK(weighted_ck_norm(scaled, beta, 0) ==
              doctest::Approx(2.5 * weighted_ck_norm(f, beta, 0)).epsilon(1e-12));

        CHECK(weighted_lp_norm(sum, 2.0, beta, 0) <=
              weighted_lp_norm(f, 2.0, beta, 0) + weighted_lp_norm(g, 2.0, beta, 0) + 1e-12);
        CHECK(weighted_ck_norm(sum, beta, 0) <=
              weighted_ck_norm(f, beta, 0) + weighted_ck_norm(g, beta, 0) + 1e-12);
    }
}

TEST_CASE("dual pairing: equality case and random inequality") {
    const double a = 1e-3;
    auto an = s2_annulus(a, 1.0, 257, 3);
    const double beta = 0.75;

    SampledField u = make_power_field(an, beta);
    SampledField v = make_power_field(an, -beta - 3.0);
    PairingResult pr = dual_pairing(u, v, 2.0, 2.0, beta);
    const double logint = 4.0 * kPi * std::log(1.0 / a);
    // Quadrature consistency makes this exact to rounding, not just 0.1%.
    CHECK(pr.pairing == doctest::Approx(pr.holder_bound).epsilon(1e-10));
    CHECK(pr.pairing == doctest::Approx(logint).epsilon(1e-3));

    CHECK_THROWS_AS(dual_pairing(u, v, 2.0, 3.0, beta), Error);

    SampledField zero = make_radial_field(an, std::vector<double>(an->shell_count(), 0.0));
    PairingResult zr = dual_pairing(zero, v, 2.0, 2.0, beta);
    CHECK(zr.pairing == 0.0);
    CHECK(zr.holder_bound >= 0.0);

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        SampledField x = random_field(an, rng);
        SampledField y = random_field(an, rng);
        double b = -1.5 + 0.01 * trial;
        PairingResult r = dual_pairing(x, y, 2.0, 2.0, b);
        CHECK(std::fabs(r.pairing) <= r.holder_bound * (1.0 + 1e-12));
    }
}

TEST_CASE("poincare constant from the link spectrum") {
    CHECK(poincare_constant(sphere_spectrum(3, 2)) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const double tau = 2.0 * kPi;
    LatticeBasis unit;
    unit.dim = 2;
    unit.basis = {1.0, 0.0, 0.0, 1.0};
    CHECK(poincare_constant(flat_torus_spectrum(unit, 50.0)) ==
          doctest::Approx(1.0 / tau).epsilon(1e-12));

    // Disconnected links are refused.
    SpectrumTable two = make_spectrum_table(2, {0.0, 0.0, 2.0}, SpectrumSource::External,
                                            3.0, 1e-9, 1e-12);
    CHECK_THROWS_AS(poincare_constant(two), Error);
}

// Acceptance suite: one line per criterion, PASS/FAIL, exit = #failures.
// Tolerances are pinned here, next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "conecalc/annulus.hpp"
#include "conecalc/decay.hpp"
#include "conecalc/error.hpp"
#include "conecalc/indicial.hpp"
#include "conecalc/radial.hpp"
#include "conecalc/simd.hpp"
#include "conecalc/slgraph.hpp"
#include "conecalc/spectrum.hpp"

using namespace conecalc;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

const double kPi = std::acos(-1.0);

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

// --- 1: FEM sphere spectrum at subdivision level 5 -------------------------
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    TriMesh mesh = icosphere(5);
    FemOptions opts;
    opts.tol = 1e-9;
    opts.cluster_tol = 1e-3;  // merges the FEM splitting (~4e-5 relative), well under the gaps
    SpectrumTable s = fem_spectrum(mesh, 16, opts);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<std::pair<double, int>> expect = {{0.0, 1}, {2.0, 3}, {6.0, 5}, {12.0, 7}};
    bool pass = true;
    std::string detail;
    std::size_t at = 0;
    for (auto [lam, mult] : expect) {
        if (at >= s.entries.size()) { pass = false; break; }
        const auto& e = s.entries[at++];
        if (e.mult != mult) pass = false;
        if (std::fabs(e.lambda - lam) > 0.02 * (lam > 0 ? lam : 1.0)) pass = false;
        detail += (detail.empty() ? "" : ", ") + std::to_string(e.lambda).substr(0, 7) + "x" +
                  std::to_string(e.mult);
    }
    if (seconds >= 30.0) pass = false;
    detail += ", " + std::to_string(seconds).substr(0, 5) + "s";
    report(1, "FEM icosphere-5 spectrum vs analytic, 2% + exact multiplicities", pass, detail);
}

// --- 2: exceptional-set gap (2-m, 0) ---------------------------------------
void criterion_2() {
    bool pass = true;
    std::string detail;
    for (int m : {3, 4, 5}) {
        const double lo = 2.0 - m - 3.0, hi = 3.0;
        std::vector<ExceptionalSet> sets;
        sets.push_back(exceptional_set(sphere_spectrum(m, 6), m, lo, hi));
        sets.push_back(exceptional_set(
            flat_torus_spectrum(clifford_link_lattice(m), 3.0 * (m + 1) + 1.0), m, lo, hi));
        for (const auto& D : sets) {
            for (const auto& r : D.roots) {
                if (r.alpha > 2.0 - m + 1e-9 && r.alpha < -1e-9) pass = false;
                double viol = std::fabs(r.alpha * (r.alpha + m - 2) - r.eigenvalue);
                if (viol > 1e-9 * (1.0 + r.eigenvalue)) pass = false;
            }
        }
        detail += (detail.empty() ? "m=" : ",") + std::to_string(m);
    }
    report(2, "no indicial root inside (2-m,0), sphere+torus links", pass, detail);
}

// --- 3: index formula and wall jumps ----------------------------------------
void criterion_3() {
    ExceptionalSet D = exceptional_set(sphere_spectrum(3, 8), 3, -4.5, 3.5);
    bool pass = true;

    // Direct multiplicity table for the oracle: alpha = k and -1-k carry
    // dim(harmonic_k) = 2k+1 on the 2-sphere link.
    auto oracle_N = [](double delta) {
        long total = 0;
        if (delta < 0.0) {
            for (int k = 0;; ++k) {
                double alpha = -1.0 - k;
                if (alpha <= delta) break;
                total -= 2 * k + 1;
            }
            return total;
        }
        for (int k = 0;; ++k) {
            if (k > delta) break;
            total += 2 * k + 1;
        }
        return total;
    };

    WeightVector w;
    w.cones = {&D};
    w.betas = {0.5 * (2.0 - 3.0)};
    if (*fredholm_index(w, IndexConvention::Conical).index != 0) pass = false;

    int walls_checked = 0;
    for (const auto& r : D.roots) {
        if (r.alpha < -4.0 - 1e-9 || r.alpha > 3.0 + 1e-9) continue;
        double lo_beta = r.alpha - 0.5, hi_beta = r.alpha + 0.5;
        if (lo_beta < D.range_lo || hi_beta > D.range_hi) continue;
        w.betas = {lo_beta};
        long below = *fredholm_index(w, IndexConvention::Conical).index;
        long below_ac = *fredholm_index(w, IndexConvention::Ac).index;
        w.betas = {hi_beta};
        long above = *fredholm_index(w, IndexConvention::Conical).index;
        long above_ac = *fredholm_index(w, IndexConvention::Ac).index;
        if (below - above != r.multiplicity) pass = false;
        if (above_ac - below_ac != r.multiplicity) pass = false;
        if (above != -oracle_N(hi_beta) || below != -oracle_N(lo_beta)) pass = false;
        ++walls_checked;
    }
    if (walls_checked < 7) pass = false;
    report(3, "index 0 at (2-m)/2; wall jumps = -+multiplicity vs direct oracle", pass,
           std::to_string(walls_checked) + " walls");
}

// --- 4: rigidity certificates ------------------------------------------------
void criterion_4() {
    bool pass = true;
    std::string detail;
    for (int m : {3, 4, 5}) {
        RigidityReport rep = rigidity_test(sphere_spectrum(m, 3), m, m * (m - 1) / 2);
        // Oracle: harmonic polynomial dimension count.
        long h2 = harmonic_poly_dim(m, 2);
        if (!rep.rigid || rep.mult_at_2m != h2) pass = false;
        detail += (detail.empty() ? "S^" : ",S^") + std::to_string(m - 1);
    }
    RigidityReport cl = rigidity_test(
        flat_torus_spectrum(clifford_link_lattice(3), 7.0), 3, 2);
    if (!(cl.mult_at_2m == 6 && cl.expected == 6 && cl.rigid)) pass = false;
    detail += ",T^2(6=9-1-2)";
    report(4, "rigidity: round spheres and the diagonal torus link", pass, detail);
}

// --- 5: indicial root identity sweep ----------------------------------------
void criterion_5() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lam_dist(0.0, 1e6);
    std::uniform_int_distribution<int> m_dist(3, 8);
    bool pass = true;
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double lam = lam_dist(rng);
        int m = m_dist(rng);
        IndicialPair p = indicial_roots(lam, m);
        if (p.log_possible) pass = false;
        for (double a : {p.alpha_minus, p.alpha_plus}) {
            double rel = std::fabs(a * (a + m - 2) - lam) / (1.0 + lam);
            worst = std::max(worst, rel);
            if (rel > 1e-12) pass = false;
        }
    }
    report(5, "10^5 random modes: no log pair, root identity to 1e-12", pass,
           "worst rel err " + sci(worst));
}

// --- 6: radial solver --------------------------------------------------------
void criterion_6() {
    bool pass = true;
    std::string detail;

    auto manufactured = [](int m, double lambda, double mu, int nodes) {
        RadialBVP p;
        p.m = m;
        p.eigenvalue = lambda;
        p.r0 = 0.5;
        p.r1 = 2.0;
        double c = lambda - mu * (mu + m - 2.0);
        p.rhs = [c, mu](double r) { return c * std::pow(r, mu - 2.0); };
        p.alpha_inner = mu;
        p.alpha_outer = mu;
        p.outer_value = std::pow(2.0, mu);
        RadialSolution sol = mode_poisson_solve(p, nodes, 1e-5);
        double err = 0.0;
        for (std::size_t i = 0; i < sol.values.size(); ++i)
            err = std::max(err, std::fabs(sol.values[i] - std::pow(sol.radius(i), mu)));
        return err;
    };

    double e200a = manufactured(3, 2.0, 2.5, 200);
    double e200b = manufactured(4, 0.0, 1.75, 200);
    if (e200a > 1e-8 || e200b > 1e-8) pass = false;
    detail = "maxerr " + sci(e200a);

    double e50 = manufactured(3, 2.0, 2.5, 50);
    double e100 = manufactured(3, 2.0, 2.5, 100);
    double order = std::log2(e50 / e100);
    double order2 = std::log2(e100 / e200a);
    if (order < 3.7 || order2 < 3.7) pass = false;
    detail += ", order " + std::to_string(order2).substr(0, 4);

    // Double decaying branch must raise the solvability error; the dense
    // rank check inside the solver is the oracle.
    bool raised = false;
    try {
        RadialBVP p;
        p.m = 3;
        p.eigenvalue = 0.0;
        p.r0 = 0.5;
        p.r1 = 2.0;
        p.rhs = [](double) { return -6.0; };
        p.alpha_inner = -1.0;
        p.alpha_outer = -1.0;
        p.outer_value = 4.0;
        mode_poisson_solve(p, 120, 1e-8);
    } catch (const Error& e) {
        raised = (e.code() == ErrorCode::Solvability);
    }
    if (!raised) pass = false;
    report(6, "radial solver: 1e-8 at 200 nodes, order >= 3.7, cokernel obstruction", pass,
           detail);
}

// --- 7: weighted norms -------------------------------------------------------
void criterion_7() {
    const double a = 1e-3;
    auto an = std::make_shared<ConeAnnulus>(icosphere(4), 3, a, 1.0, 257, 4.0 * kPi);
    bool pass = true;

    const double logint = 4.0 * kPi * std::log(1.0 / a);
    SampledField one = make_power_field(an, 0.0);
    double l1 = weighted_lp_norm(one, 1.0, 0.0, 0);
    if (std::fabs(l1 - logint) > 1e-3 * logint) pass = false;
    SampledField pw = make_power_field(an, 0.8);
    double l2 = weighted_lp_norm(pw, 2.0, 0.8, 0);
    if (std::fabs(l2 - std::sqrt(logint)) > 1e-3 * std::sqrt(logint)) pass = false;

    // Hoelder equality case to 1e-10 relative.
    SampledField u = make_power_field(an, 0.8);
    SampledField v = make_power_field(an, -0.8 - 3.0);
    PairingResult pr = dual_pairing(u, v, 2.0, 2.0, 0.8);
    if (std::fabs(pr.pairing - pr.holder_bound) > 1e-10 * pr.holder_bound) pass = false;

    // 1000 random pairs keep the inequality.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    auto anc = std::make_shared<ConeAnnulus>(icosphere(2), 3, 1e-2, 1.0, 65, 4.0 * kPi);
    const int nv = anc->vertex_count();
    int holds = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SampledField x, y;
        x.annulus = anc;
        y.annulus = anc;
        x.values.resize(anc->sample_count());
        y.values.resize(anc->sample_count());
        double p1 = 1.5 * coef(rng), p2 = 1.5 * coef(rng);
        double c1 = coef(rng), c2 = coef(rng);
        for (int s = 0; s < anc->shell_count(); ++s) {
            double r = anc->radii()[s];
            for (int vi = 0; vi < nv; ++vi) {
                const double* pt = anc->link().vertex(vi);
                x.values[(std::size_t)s * nv + vi] =
                    std::pow(r, p1) * (1.0 + c1 * pt[0]) + c2;
                y.values[(std::size_t)s * nv + vi] =
                    std::pow(r, p2) * (1.0 + c2 * pt[1]) - c1;
            }
        }
        double beta = 1.2 * coef(rng);
        PairingResult r2 = dual_pairing(x, y, 2.0, 2.0, beta);
        if (std::fabs(r2.pairing) <= r2.holder_bound * (1.0 + 1e-12)) ++holds;
    }
    if (holds != 1000) pass = false;
    report(7, "annulus quadrature 0.1%, Hoelder equality 1e-10, 1000 random pairs", pass,
           "pairs holding: " + std::to_string(holds));
}

// --- 8: discrete Poincare chain ----------------------------------------------
void criterion_8() {
    TriMesh mesh = icosphere(3);
    CotanSystem sys = assemble_cotan(mesh);
    FemOptions opts;
    opts.cluster_tol = 1e-3;
    EigenPairs pairs = fem_eigenpairs(mesh, 4, opts);
    const double lam1 = pairs.lambdas[1];
    const int n = sys.n;
    bool pass = true;

    double mass_total = 0.0;
    for (double mi : sys.mass) mass_total += mi;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g;
    std::vector<double> u(n), ku(n);
    int holds = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        for (double& x : u) x = g(rng);
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += sys.mass[i] * u[i];
        mean /= mass_total;
        for (double& x : u) x -= mean;
        sys.multiply_stiffness(u.data(), ku.data());
        double umu = simd::weighted_sq_sum(sys.mass.data(), u.data(), n);
        double uku = simd::dot(u.data(), ku.data(), n);
        if (umu <= uku / lam1 * (1.0 + 1e-10)) ++holds;
    }
    if (holds != 1000) pass = false;

    // Equality within 1e-8 on the first nonzero eigenvector.
    const std::vector<double>& v1 = pairs.vectors[1];
    sys.multiply_stiffness(v1.data(), ku.data());
    double vmv = simd::weighted_sq_sum(sys.mass.data(), v1.data(), n);
    double vkv = simd::dot(v1.data(), ku.data(), n);
    double gap = std::fabs(vmv - vkv / lam1) / vmv;
    if (gap > 1e-8) pass = false;
    report(8, "u^T M u <= lambda_1^{-1} u^T K u, equality on the eigenvector", pass,
           "holds " + std::to_string(holds) + "/1000, eigvec gap " + sci(gap));
}

// --- 9: SL-graph linearization -------------------------------------------------
void criterion_9() {
    bool pass = true;
    const double a = 0.7, b = -1.1, c = 0.5;
    GridScalarField A = sample_grid_field(
        3, {-1, -1, -1}, {1, 1, 1}, {9, 9, 9}, [&](const std::vector<double>& x) {
            return 0.5 * (a * x[0] * x[0] + b * x[1] * x[1] + c * x[2] * x[2]);
        });
    GraphDefect d = graph_defect(A);
    const double expect = a + b + c - a * b * c;
    for (double F : d.field.values)
        if (std::fabs(F - expect) > 1e-10) pass = false;

    auto rows = linearization_check(A, {1e-1, 1e-2, 1e-3});
    for (const auto& row : rows) {
        double want = std::fabs(row.t * a * b * c);
        if (std::fabs(row.remainder_over_t2 - want) > 1e-9 * (1.0 + want)) pass = false;
    }

    // 20 random smooth potentials on a 33^3 grid. The flat-model remainder
    // is cubic (the quadratic term of Im det vanishes identically), so the
    // bounded-ratio contract is checked together with stability of the
    // observed cubic coefficient between the two smallest scales.
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int stable = 0;
    for (int trial = 0; trial < 20; ++trial) {
        double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
        GridScalarField R = sample_grid_field(
            3, {-1, -1, -1}, {1, 1, 1}, {33, 33, 33}, [&](const std::vector<double>& x) {
                return c1 * std::sin(x[0] + 2.0 * x[1]) + c2 * std::cos(x[2]) * x[0] +
                       c3 * std::sin(2.0 * x[2]) * x[1];
            });
        auto rr = linearization_check(R, {1e-2, 1e-3});
        bool bounded = rr[1].remainder_over_t2 <= rr[0].remainder_over_t2 * (1.0 + 1e-9);
        double k1 = rr[0].remainder / std::pow(rr[0].t, 3);
        double k2 = rr[1].remainder / std::pow(rr[1].t, 3);
        bool tight = std::fabs(k1 - k2) <= 0.10 * std::max(k1, k2);
        if (bounded && tight) ++stable;
    }
    if (stable != 20) pass = false;
    report(9, "graph defect exact on quadratics; remainder ratio bounded, cubic stable", pass,
           "stable " + std::to_string(stable) + "/20");
}

// --- 10: decay classification ---------------------------------------------------
void criterion_10() {
    bool pass = true;
    DecaySeries power_data, log_data;
    for (int i = 0; i < 60; ++i) {
        double r = std::pow(10.0, -1.0 - 5.0 * i / 59.0);
        power_data.samples.emplace_back(r, std::pow(r, 1.5));
        log_data.samples.emplace_back(r, r / std::fabs(std::log(r)));
    }
    ExceptionalSet D = exceptional_set(sphere_spectrum(3, 6), 3, -4.0, 3.5);

    DecayClassification cp = classify_decay(power_data, &D);
    if (!(cp.model == DecayModel::Power && cp.margin > 2.0)) pass = false;
    if (std::fabs(cp.parameter - 2.5) > 1e-3) pass = false;
    if (cp.verdict != DecayVerdict::Conical) pass = false;
    if (!rate_admissible(D, cp.parameter)) pass = false;

    DecayClassification cl = classify_decay(log_data, &D);
    if (!(cl.model == DecayModel::LogPower && cl.margin > 2.0)) pass = false;
    if (std::fabs(cl.parameter - 1.0) > 0.05) pass = false;
    if (cl.verdict != DecayVerdict::NotConicalLog) pass = false;

    report(10, "synthetic decay data classified, parameters recovered, pipeline verdict", pass,
           "mu=" + std::to_string(cp.parameter) + ", alpha=" + std::to_string(cl.parameter) +
               ", margins " + std::to_string(cp.margin).substr(0, 6) + "/" +
               std::to_string(cl.margin).substr(0, 6));
}

// --- 11: rate calculus -----------------------------------------------------------
void criterion_11() {
    bool pass = true;
    ExceptionalSet D = exceptional_set(sphere_spectrum(3, 6), 3, -4.0, 3.5);
    if (rate_sup(D) != 3.0) pass = false;

    auto trace = bootstrap_trace(2.2);
    if (!(trace.size() <= 5 && trace.back() == 3.0)) pass = false;
    std::vector<double> want = {2.2, 2.4, 2.8, 3.0};
    if (trace.size() != want.size()) pass = false;
    else
        for (std::size_t i = 0; i < want.size(); ++i)
            if (std::fabs(trace[i] - want[i]) > 1e-12) pass = false;

    auto i1 = ac_rate_improve(D, 3, 0.5, true);
    if (!(std::fabs(i1.best_rate + 1.0) < 1e-12 && i1.exclusive)) pass = false;
    ExceptionalSet D5 = exceptional_set(sphere_spectrum(5, 4), 5, -6.5, 3.5);
    auto i2 = ac_rate_improve(D5, 5, 0.0, true);
    if (!(std::fabs(i2.best_rate + 2.0) < 1e-12 && i2.exclusive)) pass = false;
    auto i3 = ac_rate_improve(D, 3, 0.5, false);
    if (!(i3.best_rate == 0.0 && !i3.exclusive)) pass = false;

    report(11, "rate sup 3 (exclusive), bootstrap 2.2->cap in <=4 steps, 3 AC branches", pass,
           "trace len " + std::to_string(trace.size()));
}

}  // namespace

int main() {
    std::printf("conecalc acceptance suite (simd backend: %s)\n", simd::backend_name());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0)
        std::printf("all 11 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}

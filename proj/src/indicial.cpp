#include "conecalc/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conecalc/error.hpp"

namespace conecalc {

namespace {

constexpr double kWallRelTol = 1e-9;

void require_m(int m) {
    // The index formula is proved for cone dimension > 2 only; in dimension 2
    // log-type harmonics exist and the whole calculus changes. Hard error,
    // no guessing.
    if (m < 3)
        throw Error(ErrorCode::InvalidDimension, "cone dimension m must be >= 3");
}

}  // namespace

IndicialPair indicial_roots(double eigenvalue, int m) {
    require_m(m);
    if (eigenvalue < 0.0)
        throw Error(ErrorCode::InvalidSpectrum, "link eigenvalue must be nonnegative");
    const double p = static_cast<double>(m) - 2.0;
    const double disc = p * p + 4.0 * eigenvalue;
    IndicialPair out;
    out.log_possible = (disc == 0.0);  // impossible for m > 2, lambda >= 0
    const double sq = std::sqrt(disc);
    out.alpha_minus = (-p - sq) / 2.0;
    out.alpha_plus = (-p + sq) / 2.0;
    return out;
}

int ExceptionalSet::multiplicity_at(double alpha) const {
    for (const auto& r : roots)
        if (std::fabs(r.alpha - alpha) <= kWallRelTol * (1.0 + std::fabs(alpha)))
            return r.multiplicity;
    return 0;
}

std::optional<IndicialRoot> ExceptionalSet::wall_at(double beta) const {
    for (const auto& r : roots)
        if (std::fabs(beta - r.alpha) <= kWallRelTol * (1.0 + std::fabs(r.alpha)))
            return r;
    return std::nullopt;
}

void ExceptionalSet::require_range(double lo, double hi, const char* what) const {
    if (lo < range_lo - 1e-12 || hi > range_hi + 1e-12) {
        std::ostringstream os;
        os << what << " needs exceptional-set coverage of [" << lo << ", " << hi
           << "] but the certified window is [" << range_lo << ", " << range_hi << "]";
        throw Error(ErrorCode::Coverage, os.str());
    }
}

ExceptionalSet exceptional_set(const SpectrumTable& spectrum, int m, double lo, double hi) {
    require_m(m);
    spectrum.validate();
    if (!(lo < hi))
        throw Error(ErrorCode::InvalidInput, "exceptional-set window needs lo < hi");

    // Coverage certificate: completeness on [lo, hi] needs every eigenvalue
    // up to max over window endpoints of alpha(alpha+m-2), taken over
    // endpoints outside the root-free gap (2-m, 0).
    auto lambda_of = [m](double a) { return a * (a + static_cast<double>(m) - 2.0); };
    double required = 0.0;
    for (double a : {lo, hi})
        if (!(a > 2.0 - m && a < 0.0)) required = std::max(required, lambda_of(a));
    if (spectrum.coverage_max < required - 1e-9 * (1.0 + required)) {
        std::ostringstream os;
        os << "spectrum coverage " << spectrum.coverage_max
           << " cannot certify the window [" << lo << ", " << hi
           << "]; eigenvalues up to " << required << " are needed";
        throw Error(ErrorCode::Coverage, os.str());
    }

    ExceptionalSet out;
    out.m = m;
    out.range_lo = lo;
    out.range_hi = hi;
    out.spectrum_coverage_max = spectrum.coverage_max;
    for (const auto& e : spectrum.entries) {
        IndicialPair pair = indicial_roots(e.lambda, m);
        if (pair.alpha_minus >= lo && pair.alpha_minus <= hi)
            out.roots.push_back({pair.alpha_minus, e.lambda, e.mult, RootBranch::Minus});
        // lambda = 0 has alpha_plus == 0 and alpha_minus == 2-m, distinct
        // roots for every lambda >= 0 and m > 2.
        if (pair.alpha_plus >= lo && pair.alpha_plus <= hi)
            out.roots.push_back({pair.alpha_plus, e.lambda, e.mult, RootBranch::Plus});
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const IndicialRoot& a, const IndicialRoot& b) { return a.alpha < b.alpha; });
    return out;
}

int growth_count(const ExceptionalSet& D, double delta) {
    if (delta < D.range_lo - 1e-12 || delta > D.range_hi + 1e-12) {
        std::ostringstream os;
        os << "growth count at " << delta << " lies outside the certified window ["
           << D.range_lo << ", " << D.range_hi << "]";
        throw Error(ErrorCode::Coverage, os.str());
    }
    long total = 0;
    if (delta < 0.0) {
        for (const auto& r : D.roots)
            if (r.alpha > delta && r.alpha < 0.0) total += r.multiplicity;
        total = -total;
    } else {
        for (const auto& r : D.roots)
            if (r.alpha >= 0.0 && r.alpha <= delta) total += r.multiplicity;
    }
    return static_cast<int>(total);
}

IndexReport fredholm_index(const WeightVector& weights, IndexConvention convention) {
    const std::size_t n = weights.betas.size();
    if (n == 0 || weights.cones.size() != n)
        throw Error(ErrorCode::InvalidInput, "weight vector needs one exceptional set per weight");
    if (convention == IndexConvention::Ac && n != 1)
        throw Error(ErrorCode::InvalidInput,
                    "the asymptotically conical convention applies to a single cone at infinity");

    IndexReport report;
    report.per_cone_counts.reserve(n);
    report.windows.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const ExceptionalSet& D = *weights.cones[i];
        const double beta = weights.betas[i];
        D.require_range(beta, beta, "index");
        if (auto wall = D.wall_at(beta)) {
            report.fredholm = false;
            report.wall = {static_cast<int>(i), wall->alpha};
            std::ostringstream os;
            os << "weight " << beta << " on cone " << i << " sits on the Fredholm wall at alpha="
               << wall->alpha << " (multiplicity " << wall->multiplicity << ")";
            throw Error(ErrorCode::FredholmWall, os.str());
        }
        report.per_cone_counts.push_back(growth_count(D, beta));

        double win_lo = D.range_lo, win_hi = D.range_hi;
        for (const auto& r : D.roots) {
            if (r.alpha < beta) win_lo = std::max(win_lo, r.alpha);
            if (r.alpha > beta) {
                win_hi = std::min(win_hi, r.alpha);
                break;
            }
        }
        report.windows.emplace_back(win_lo, win_hi);
    }

    report.fredholm = true;
    long sum = 0;
    for (int c : report.per_cone_counts) sum += c;
    report.index = (convention == IndexConvention::Conical) ? -sum : sum;
    return report;
}

bool rate_admissible(const ExceptionalSet& D, double mu) {
    if (!(mu > 2.0 && mu < 3.0))
        throw Error(ErrorCode::InvalidRate,
                    "conical rates live in the open interval (2,3); 3 itself is excluded");
    D.require_range(2.0, 3.0, "rate admissibility");
    for (const auto& r : D.roots)
        if (r.alpha > 2.0 && r.alpha <= mu) return false;
    return true;
}

double rate_sup(const ExceptionalSet& D) {
    D.require_range(2.0, 3.0, "rate supremum");
    double sup = 3.0;
    for (const auto& r : D.roots)
        if (r.alpha > 2.0 && r.alpha < 3.0) {
            sup = r.alpha;
            break;
        }
    return sup;
}

std::vector<double> bootstrap_trace(double seed) {
    if (!(seed > 2.0 && seed < 3.0))
        throw Error(ErrorCode::InvalidRate, "bootstrap seed must lie in (2,3)");
    std::vector<double> trace{seed};
    double lam = seed;
    while (lam < 3.0) {
        lam = std::min(3.0, 2.0 * lam - 2.0);
        trace.push_back(lam);
    }
    return trace;
}

std::pair<double, double> rate_component(const ExceptionalSet& D, double lam) {
    if (!(lam < 2.0))
        throw Error(ErrorCode::InvalidRate, "asymptotically conical rates require lambda < 2");
    D.require_range(lam, lam, "rate component");
    if (auto wall = D.wall_at(lam)) {
        std::ostringstream os;
        os << "rate " << lam << " sits on the wall at alpha=" << wall->alpha;
        throw Error(ErrorCode::FredholmWall, os.str());
    }
    double lo = D.range_lo, hi = D.range_hi;
    for (const auto& r : D.roots) {
        if (r.alpha < lam) lo = std::max(lo, r.alpha);
        if (r.alpha > lam) {
            hi = std::min(hi, r.alpha);
            break;
        }
    }
    return {lo, std::min(hi, 2.0)};
}

RateImprovement ac_rate_improve(const ExceptionalSet& D, int m, double lam, bool y_is_zero) {
    require_m(m);
    double first_positive = std::numeric_limits<double>::infinity();
    for (const auto& r : D.roots)
        if (r.alpha > 1e-14) {
            first_positive = r.alpha;
            break;
        }
    if (!(lam >= 0.0) || !(lam < first_positive))
        throw Error(ErrorCode::InvalidInput,
                    "rate improvement needs 0 <= lambda below the first positive root");
    if (y_is_zero)
        return {std::max(-2.0, 2.0 - static_cast<double>(m)), /*exclusive=*/true};
    return {0.0, /*exclusive=*/false};
}

std::optional<int> kernel_dim_reference(double beta, int m) {
    require_m(m);
    if (beta > 0.0) return 0;
    if (beta > 2.0 - m && beta < 0.0) return 1;  // constants
    return std::nullopt;
}

RigidityReport rigidity_test(const SpectrumTable& spectrum, int m, int dim_g) {
    require_m(m);
    spectrum.validate();
    if (dim_g < 0 || dim_g > m * m - 1)
        throw Error(ErrorCode::InvalidInput, "stabilizer dimension must lie in [0, m^2-1]");
    const double target = 2.0 * m;
    if (spectrum.coverage_max < target - 1e-9 * (1.0 + target)) {
        std::ostringstream os;
        os << "rigidity needs spectrum coverage up to " << target << ", have "
           << spectrum.coverage_max;
        throw Error(ErrorCode::Coverage, os.str());
    }
    RigidityReport report;
    report.m = m;
    report.dim_g = dim_g;
    report.mult_at_2m = spectrum.multiplicity_at(target);
    report.expected = m * m - 1 - dim_g;
    report.deficiency = report.mult_at_2m - report.expected;
    report.rigid = (report.deficiency == 0);
    return report;
}

}  // namespace conecalc

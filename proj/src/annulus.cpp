#include "conecalc/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conecalc/error.hpp"
#include "conecalc/fd_weights.hpp"
#include "conecalc/parallel.hpp"
#include "conecalc/simd.hpp"

namespace conecalc {

namespace {

std::vector<double> simpson_weights(int n, double h) {
    // Composite Simpson needs an odd node count; enforced by the constructor.
    std::vector<double> w(n, 0.0);
    for (int i = 0; i + 2 < n; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

}  // namespace

ConeAnnulus::ConeAnnulus(TriMesh link, int m, double r0, double r1, int shells,
                         double exact_link_volume)
    : link_(std::move(link)), m_(m), r0_(r0), r1_(r1) {
    if (m < 3) throw Error(ErrorCode::InvalidDimension, "cone dimension m must be >= 3");
    if (!(0.0 < r0 && r0 < r1))
        throw Error(ErrorCode::InvalidInput, "annulus needs 0 < r0 < r1");
    if (shells < 3) throw Error(ErrorCode::InvalidInput, "need at least 3 radial shells");
    if (shells % 2 == 0) ++shells;  // Simpson wants an odd node count
    link_.validate(/*require_closed=*/true);

    const double t0 = std::log(r0), t1 = std::log(r1);
    const double h = (t1 - t0) / (shells - 1);
    radii_.resize(shells);
    for (int i = 0; i < shells; ++i) radii_[i] = std::exp(t0 + h * i);
    radial_weights_ = simpson_weights(shells, h);

    const int nv = link_.vertex_count();
    link_weights_.assign(nv, 0.0);
    for (int t = 0; t < static_cast<int>(link_.triangles.size()); ++t) {
        double third = link_.triangle_area(t) / 3.0;
        for (int k = 0; k < 3; ++k) link_weights_[link_.triangles[t][k]] += third;
    }
    link_volume_ = 0.0;
    for (double w : link_weights_) link_volume_ += w;
    if (exact_link_volume > 0.0) {
        double scale = exact_link_volume / link_volume_;
        for (double& w : link_weights_) w *= scale;
        link_volume_ = exact_link_volume;
    }

    volume_weights_.resize(sample_count());
    for (int s = 0; s < shells; ++s) {
        // dV = r^{m-1} dr dSigma and dr = r dt on the log grid.
        double radial = std::pow(radii_[s], m_) * radial_weights_[s];
        for (int v = 0; v < nv; ++v)
            volume_weights_[static_cast<std::size_t>(s) * nv + v] = radial * link_weights_[v];
    }
}

double ConeAnnulus::radius_function(int shell) const {
    return std::min(radii_[shell], 1.0);
}

double& SampledField::at(int shell, int vertex) {
    return values[static_cast<std::size_t>(shell) * annulus->vertex_count() + vertex];
}

double SampledField::at(int shell, int vertex) const {
    return values[static_cast<std::size_t>(shell) * annulus->vertex_count() + vertex];
}

SampledField make_radial_field(std::shared_ptr<const ConeAnnulus> annulus,
                               const std::vector<double>& shell_values) {
    if (static_cast<int>(shell_values.size()) != annulus->shell_count())
        throw Error(ErrorCode::InvalidInput, "profile length must match the shell count");
    SampledField f;
    f.annulus = annulus;
    f.values.resize(annulus->sample_count());
    const int nv = annulus->vertex_count();
    for (int s = 0; s < annulus->shell_count(); ++s)
        for (int v = 0; v < nv; ++v)
            f.values[static_cast<std::size_t>(s) * nv + v] = shell_values[s];
    return f;
}

SampledField make_power_field(std::shared_ptr<const ConeAnnulus> annulus, double beta) {
    const int shells = annulus->shell_count();
    const int nv = annulus->vertex_count();
    const int m = annulus->m();
    std::vector<double> prof(shells);
    for (int s = 0; s < shells; ++s) prof[s] = std::pow(annulus->radii()[s], beta);
    SampledField f = make_radial_field(annulus, prof);
    f.grad_mag.resize(f.values.size());
    f.hess_mag.resize(f.values.size());
    for (int s = 0; s < shells; ++s) {
        const double r = annulus->radii()[s];
        double d1 = beta * std::pow(r, beta - 1.0);
        double d2 = beta * (beta - 1.0) * std::pow(r, beta - 2.0);
        // Cone-metric Hessian of a radial profile: h'' dr^2 + r h' g_link.
        double hess = std::sqrt(d2 * d2 + (m - 1) * (d1 / r) * (d1 / r));
        for (int v = 0; v < nv; ++v) {
            f.grad_mag[static_cast<std::size_t>(s) * nv + v] = std::fabs(d1);
            f.hess_mag[static_cast<std::size_t>(s) * nv + v] = hess;
        }
    }
    return f;
}

void attach_gradient(SampledField& field) {
    const ConeAnnulus& an = *field.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    if (shells < 6)
        throw Error(ErrorCode::InvalidInput, "gradient stencils need at least 6 shells");
    field.grad_mag.assign(field.values.size(), 0.0);

    // Radial part: df/dr = (1/r) df/dt on the log grid, 6-node 4th order.
    std::vector<double> t(shells);
    for (int s = 0; s < shells; ++s) t[s] = std::log(an.radii()[s]);
    for (int s = 0; s < shells; ++s) {
        int lo = std::clamp(s - 2, 0, shells - 6);
        std::vector<double> window(t.begin() + lo, t.begin() + lo + 6);
        auto w1 = fd_weights(t[s], window, 1);
        for (int v = 0; v < nv; ++v) {
            double ft = 0.0;
            for (int k = 0; k < 6; ++k)
                ft += w1[k] * field.values[static_cast<std::size_t>(lo + k) * nv + v];
            double fr = ft / an.radii()[s];
            field.grad_mag[static_cast<std::size_t>(s) * nv + v] = fr * fr;
        }
    }

    // Tangential part per shell: P1 element gradients on the link scaled by
    // 1/r, squared magnitudes area-averaged to vertices.
    const TriMesh& link = an.link();
    const int d = link.ambient_dim;
    std::vector<double> vert_area(nv, 0.0);
    for (int tr = 0; tr < static_cast<int>(link.triangles.size()); ++tr) {
        double third = link.triangle_area(tr) / 3.0;
        for (int k = 0; k < 3; ++k) vert_area[link.triangles[tr][k]] += third;
    }
    std::vector<double> e1(d), e2(d);
    for (int s = 0; s < shells; ++s) {
        std::vector<double> acc(nv, 0.0);
        for (const auto& tri : link.triangles) {
            const double* p0 = link.vertex(tri[0]);
            const double* p1 = link.vertex(tri[1]);
            const double* p2 = link.vertex(tri[2]);
            double g11 = 0.0, g22 = 0.0, g12 = 0.0;
            for (int c = 0; c < d; ++c) {
                e1[c] = p1[c] - p0[c];
                e2[c] = p2[c] - p0[c];
                g11 += e1[c] * e1[c];
                g22 += e2[c] * e2[c];
                g12 += e1[c] * e2[c];
            }
            double det = g11 * g22 - g12 * g12;
            double f0 = field.at(s, tri[0]);
            double d1 = field.at(s, tri[1]) - f0;
            double d2 = field.at(s, tri[2]) - f0;
            // |grad|^2 in the intrinsic metric of the element.
            double gsq = (g22 * d1 * d1 - 2.0 * g12 * d1 * d2 + g11 * d2 * d2) / det;
            double area = 0.5 * std::sqrt(std::max(det, 0.0));
            for (int k = 0; k < 3; ++k) acc[tri[k]] += gsq * area / 3.0;
        }
        const double r = an.radii()[s];
        for (int v = 0; v < nv; ++v) {
            double tang = acc[v] / vert_area[v] / (r * r);
            std::size_t idx = static_cast<std::size_t>(s) * nv + v;
            field.grad_mag[idx] = std::sqrt(field.grad_mag[idx] + tang);
        }
    }
}

void attach_hessian_radial(SampledField& field) {
    const ConeAnnulus& an = *field.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    if (shells < 6)
        throw Error(ErrorCode::InvalidInput, "hessian stencils need at least 6 shells");
    // Shell-constancy check: this path covers radial profiles only.
    for (int s = 0; s < shells; ++s) {
        double ref = field.at(s, 0);
        double scale = std::max(std::fabs(ref), 1e-300);
        for (int v = 1; v < nv; ++v)
            if (std::fabs(field.at(s, v) - ref) > 1e-10 * scale)
                throw Error(ErrorCode::InvalidInput,
                            "hessian stack is implemented for radial fields only");
    }
    field.hess_mag.assign(field.values.size(), 0.0);
    std::vector<double> t(shells);
    for (int s = 0; s < shells; ++s) t[s] = std::log(an.radii()[s]);
    const int m = an.m();
    for (int s = 0; s < shells; ++s) {
        int lo = std::clamp(s - 2, 0, shells - 6);
        std::vector<double> window(t.begin() + lo, t.begin() + lo + 6);
        auto w1 = fd_weights(t[s], window, 1);
        auto w2 = fd_weights(t[s], window, 2);
        double ft = 0.0, ftt = 0.0;
        for (int k = 0; k < 6; ++k) {
            ft += w1[k] * field.at(lo + k, 0);
            ftt += w2[k] * field.at(lo + k, 0);
        }
        const double r = an.radii()[s];
        double hr = ft / r;                       // h'
        double hrr = (ftt - ft) / (r * r);        // h''
        double mag = std::sqrt(hrr * hrr + (m - 1) * (hr / r) * (hr / r));
        for (int v = 0; v < nv; ++v) field.hess_mag[static_cast<std::size_t>(s) * nv + v] = mag;
    }
}

namespace {

const std::vector<double>& stack_of(const SampledField& f, int j) {
    if (j == 0) return f.values;
    if (j == 1) {
        if (f.grad_mag.empty())
            throw Error(ErrorCode::InvalidInput, "field has no gradient stack attached");
        return f.grad_mag;
    }
    if (f.hess_mag.empty())
        throw Error(ErrorCode::InvalidInput, "field has no hessian stack attached");
    return f.hess_mag;
}

}  // namespace

double weighted_ck_norm(const SampledField& f, double beta, int k) {
    if (k < 0 || k > 2)
        throw Error(ErrorCode::InvalidInput, "derivative stacks cover k in {0,1,2}");
    const ConeAnnulus& an = *f.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    double total = 0.0;
    std::vector<double> rho_pow(nv);
    for (int j = 0; j <= k; ++j) {
        const auto& stack = stack_of(f, j);
        double level = 0.0;
        for (int s = 0; s < shells; ++s) {
            double w = std::pow(an.radius_function(s), -beta + j);
            std::fill(rho_pow.begin(), rho_pow.end(), w);
            double shell_max = simd::max_abs_scaled(
                rho_pow.data(), stack.data() + static_cast<std::size_t>(s) * nv, nv);
            level = std::max(level, shell_max);
        }
        total += level;
    }
    return total;
}

double weighted_lp_norm(const SampledField& f, double p, double beta, int k) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidInput, "p must be >= 1");
    if (k < 0 || k > 2)
        throw Error(ErrorCode::InvalidInput, "derivative stacks cover k in {0,1,2}");
    const ConeAnnulus& an = *f.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    const auto& volw = an.volume_weights();
    double total = 0.0;
    for (int j = 0; j <= k; ++j) {
        const auto& stack = stack_of(f, j);
        // Shells are the parallel axis; per-shell partial sums fold in shell
        // order so the result is thread-count independent.
        std::vector<double> partial(shells, 0.0);
        parallel_chunks(shells, [&](int s) {
            const double rho = an.radius_function(s);
            const double rw = std::pow(rho, (-beta + j) * p - an.m());
            const std::size_t off = static_cast<std::size_t>(s) * nv;
            if (p == 2.0) {
                std::vector<double> w(nv);
                for (int v = 0; v < nv; ++v) w[v] = rw * volw[off + v];
                partial[s] = simd::weighted_sq_sum(w.data(), stack.data() + off, nv);
            } else {
                double acc = 0.0;
                for (int v = 0; v < nv; ++v)
                    acc += volw[off + v] * std::pow(std::fabs(stack[off + v]), p);
                partial[s] = rw * acc;
            }
        });
        for (int s = 0; s < shells; ++s) total += partial[s];
    }
    return std::pow(total, 1.0 / p);
}

PairingResult dual_pairing(const SampledField& u, const SampledField& v,
                           double p, double q, double beta) {
    if (u.annulus != v.annulus)
        throw Error(ErrorCode::InvalidInput, "pairing requires fields on the same annulus");
    if (std::fabs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
        throw Error(ErrorCode::ExponentMismatch, "dual pairing needs 1/p + 1/q = 1");
    const ConeAnnulus& an = *u.annulus;
    PairingResult out;
    out.pairing = simd::weighted_dot(an.volume_weights().data(), u.values.data(),
                                     v.values.data(), an.sample_count());
    out.holder_bound = weighted_lp_norm(u, p, beta, 0) *
                       weighted_lp_norm(v, q, -beta - an.m(), 0);
    if (std::fabs(out.pairing) > out.holder_bound * (1.0 + 1e-12))
        throw Error(ErrorCode::NumericalFailure,
                    "pairing exceeded its Hoelder bound; quadrature is inconsistent");
    return out;
}

double poincare_constant(const SpectrumTable& spectrum) {
    spectrum.validate();
    if (spectrum.kernel_multiplicity() != 1)
        throw Error(ErrorCode::InvalidSpectrum,
                    "Poincare constant requires a connected link (kernel multiplicity 1)");
    return 1.0 / std::sqrt(spectrum.first_nonzero());
}

}  // namespace conecalc

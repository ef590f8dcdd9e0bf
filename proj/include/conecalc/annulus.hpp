#pragma once

#include <memory>
#include <vector>

#include "conecalc/mesh.hpp"
#include "conecalc/spectrum.hpp"

namespace conecalc {

// Product quadrature grid on a cone annulus link x [r0, r1] with the cone
// metric dr^2 + r^2 g_link. Radial nodes are log-spaced and carry composite
// Simpson weights in t = log r, because the integrands of interest are power
// laws in r. Link vertices carry lumped-mass weights; for analytic links the
// weights are rescaled so constants integrate exactly.
class ConeAnnulus {
  public:
    // `exact_link_volume` > 0 rescales the lumped weights to that total
    // (e.g. 4 pi for the round S^2 link).
    ConeAnnulus(TriMesh link, int m, double r0, double r1, int shells,
                double exact_link_volume = 0.0);

    int m() const { return m_; }
    const TriMesh& link() const { return link_; }
    int vertex_count() const { return static_cast<int>(link_weights_.size()); }
    int shell_count() const { return static_cast<int>(radii_.size()); }
    std::size_t sample_count() const { return radii_.size() * link_weights_.size(); }

    double r0() const { return r0_; }
    double r1() const { return r1_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& link_weights() const { return link_weights_; }
    const std::vector<double>& radial_weights() const { return radial_weights_; }
    double link_volume() const { return link_volume_; }

    // Radius function: distance to the cone tip capped at 1.
    double radius_function(int shell) const;

    // Quadrature weight so that sum_i w_i F_i approximates the metric
    // integral of F over the annulus: w = (link weight) * r^{m-1} * (r * W_t).
    // Radial-major sample layout: shell * V + vertex.
    const std::vector<double>& volume_weights() const { return volume_weights_; }

  private:
    TriMesh link_;
    int m_;
    double r0_, r1_;
    std::vector<double> radii_;
    std::vector<double> link_weights_;
    std::vector<double> radial_weights_;  // Simpson weights in t = log r
    std::vector<double> volume_weights_;
    double link_volume_ = 0.0;
};

// Scalar samples over the annulus grid, radial-major, with optional
// derivative-magnitude stacks |grad f| and |hess f| in the cone metric.
struct SampledField {
    std::shared_ptr<const ConeAnnulus> annulus;
    std::vector<double> values;
    std::vector<double> grad_mag;  // empty until attached
    std::vector<double> hess_mag;

    double& at(int shell, int vertex);
    double at(int shell, int vertex) const;
};

// f(sigma, r) = h(r), h given per shell. Separable caller-supplied profiles.
SampledField make_radial_field(std::shared_ptr<const ConeAnnulus> annulus,
                               const std::vector<double>& shell_values);

// f = rho^beta with exact derivative stacks
//   |grad f| = |beta| rho^{beta-1},  |hess f|^2 = h''^2 + (m-1) (h'/r)^2.
SampledField make_power_field(std::shared_ptr<const ConeAnnulus> annulus, double beta);

// Gradient magnitude for arbitrary samples: 4th-order finite differences
// radially, piecewise-linear element gradients tangentially,
//   |grad f|^2 = f_r^2 + r^{-2} |grad_link f|^2.
void attach_gradient(SampledField& field);

// Hessian magnitude for radial (shell-constant) fields; errors otherwise.
void attach_hessian_radial(SampledField& field);

// Weighted C^k norm: sum_{j<=k} sup |rho^{-beta+j} (j-th derivative)|.
double weighted_ck_norm(const SampledField& f, double beta, int k);

// Weighted L^p norm:
//   ( sum_{j<=k} int |rho^{-beta+j} (j-th derivative)|^p rho^{-m} dV )^{1/p}.
double weighted_lp_norm(const SampledField& f, double p, double beta, int k);

struct PairingResult {
    double pairing = 0.0;      // int u v dV
    double holder_bound = 0.0; // ||u||_{p,0,beta} ||v||_{q,0,-beta-m}
};

// Dual pairing with its Hoelder certificate; requires 1/p + 1/q = 1 and
// verifies |pairing| <= bound (1 + 1e-12).
PairingResult dual_pairing(const SampledField& u, const SampledField& v,
                           double p, double q, double beta);

// C with ||u||_2 <= C ||du||_2 for mean-zero u at the link level:
// C = lambda_1^{-1/2}, lambda_1 the smallest nonzero eigenvalue.
double poincare_constant(const SpectrumTable& spectrum);

}  // namespace conecalc

#include "conecalc/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "conecalc/error.hpp"
#include "conecalc/fd_weights.hpp"

namespace conecalc {

void RadialBVP::validate() const {
    if (m < 3) throw Error(ErrorCode::InvalidDimension, "cone dimension m must be >= 3");
    if (eigenvalue < 0.0)
        throw Error(ErrorCode::InvalidSpectrum, "mode eigenvalue must be nonnegative");
    if (!(0.0 < r0 && r0 < r1))
        throw Error(ErrorCode::InvalidInput, "radial interval needs 0 < r0 < r1");
    if (!rhs) throw Error(ErrorCode::InvalidInput, "missing right-hand side");
    if (!std::isfinite(alpha_inner) || !std::isfinite(alpha_outer))
        throw Error(ErrorCode::InvalidInput, "branch exponents must be finite");
}

double RadialSolution::radius(std::size_t i) const { return std::exp(log_nodes[i]); }

double RadialSolution::evaluate(double r) const {
    const double t = std::log(r);
    const std::size_t n = log_nodes.size();
    if (t < log_nodes.front() - 1e-12 || t > log_nodes.back() + 1e-12)
        throw Error(ErrorCode::InvalidInput, "evaluation point outside the solved interval");
    const double h = log_nodes[1] - log_nodes[0];
    long i = std::lround(std::floor((t - log_nodes[0]) / h));
    i = std::clamp<long>(i - 1, 0, static_cast<long>(n) - 4);
    // Local cubic through 4 neighboring nodes.
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b)
            if (a != b)
                l *= (t - log_nodes[i + b]) / (log_nodes[i + a] - log_nodes[i + b]);
        acc += l * values[i + a];
    }
    return acc;
}

RadialSolution mode_poisson_solve(const RadialBVP& problem, int nodes, double tol) {
    problem.validate();
    if (nodes < 8) throw Error(ErrorCode::InvalidInput, "need at least 8 grid nodes");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");

    const int n = nodes;
    const double t0 = std::log(problem.r0);
    const double t1 = std::log(problem.r1);
    const double h = (t1 - t0) / (n - 1);
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = t0 + h * i;

    const double mcoef = static_cast<double>(problem.m) - 2.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

    // Interior collocation, 6-node windows for uniform 4th order including
    // the skewed rows next to the ends:
    //   -f_tt - (m-2) f_t + lambda f = e^{2t} g(e^t)
    for (int i = 1; i < n - 1; ++i) {
        int lo = std::clamp(i - 2, 0, n - 6);
        std::vector<double> window(t.begin() + lo, t.begin() + lo + 6);
        auto w2 = fd_weights(t[i], window, 2);
        auto w1 = fd_weights(t[i], window, 1);
        for (int k = 0; k < 6; ++k)
            A(i, lo + k) += -w2[k] - mcoef * w1[k];
        A(i, i) += problem.eigenvalue;
        const double r = std::exp(t[i]);
        b[i] = r * r * problem.rhs(r);
    }

    // Robin branch selectors, one-sided 4th-order first derivatives:
    //   f_t(t_end) = alpha_end f(t_end)
    {
        std::vector<double> window(t.begin(), t.begin() + 6);
        auto w1 = fd_weights(t[0], window, 1);
        for (int k = 0; k < 6; ++k) A(0, k) += w1[k];
        A(0, 0) -= problem.alpha_inner;
    }
    {
        std::vector<double> window(t.end() - 6, t.end());
        auto w1 = fd_weights(t[n - 1], window, 1);
        for (int k = 0; k < 6; ++k) A(n - 1, n - 6 + k) += w1[k];
        A(n - 1, n - 1) -= problem.alpha_outer;
    }

    // Rank-revealing solve. The square system is singular exactly when the
    // Robin pair leaves a homogeneous branch alive; inconsistency is the
    // mode-wise cokernel obstruction.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);  // relative to the largest singular value
    const int rank = static_cast<int>(svd.rank());
    const int kernel_dim = n - rank;

    Eigen::VectorXd f = svd.solve(b);  // minimum-norm least squares within the numerical rank
    // Residuals are measured against the row scale of the collocation
    // system; |A f| itself is noise-level for homogeneous solutions.
    const double row_scale = A.cwiseAbs().rowwise().sum().maxCoeff();
    auto rel_scale = [&](const Eigen::VectorXd& x) {
        return std::max({b.cwiseAbs().maxCoeff(), row_scale * x.cwiseAbs().maxCoeff(), 1e-300});
    };
    const double ls_resid = (A * f - b).cwiseAbs().maxCoeff() / rel_scale(f);
    if (ls_resid > std::max(tol, 1e-8)) {
        std::ostringstream os;
        os << "branch pair (alpha_in=" << problem.alpha_inner << ", alpha_out="
           << problem.alpha_outer << ") excludes all solutions of this mode; "
           << "relative defect " << ls_resid << " (kernel dimension " << kernel_dim << ")";
        throw Error(ErrorCode::Solvability, os.str());
    }

    if (kernel_dim > 0) {
        // Homogeneous family survives the Robin pair; spend it on the
        // caller's outer-end datum.
        Eigen::MatrixXd kernel = svd.matrixV().rightCols(kernel_dim);
        Eigen::VectorXd k_at_end = kernel.row(n - 1).transpose();
        double gap = problem.outer_value - f[n - 1];
        double denom = k_at_end.squaredNorm();
        if (denom > 1e-24) {
            Eigen::VectorXd coef = k_at_end * (gap / denom);
            f += kernel * coef;
        }
    }

    RadialSolution sol;
    sol.log_nodes = std::move(t);
    sol.values.assign(f.data(), f.data() + n);
    sol.kernel_dim = kernel_dim;
    sol.alpha_inner = problem.alpha_inner;
    sol.alpha_outer = problem.alpha_outer;
    sol.normalization_gap = std::fabs(f[n - 1] - problem.outer_value);

    double resid = 0.0;
    Eigen::VectorXd r_vec = A * f - b;
    for (int i = 1; i < n - 1; ++i) resid = std::max(resid, std::fabs(r_vec[i]));
    sol.residual_norm = resid / rel_scale(f);
    if (sol.residual_norm > tol) {
        std::ostringstream os;
        os << "discrete interior residual " << sol.residual_norm << " exceeds tolerance " << tol;
        throw Error(ErrorCode::NumericalFailure, os.str());
    }
    return sol;
}

HarmonicExtension harmonic_extension(const TriMesh& mesh, const std::vector<double>& v,
                                     double eigenvalue, double alpha,
                                     const std::vector<double>& radii, double eigen_tol) {
    const CotanSystem sys = assemble_cotan(mesh);
    const int n = sys.n;
    if (static_cast<int>(v.size()) != n)
        throw Error(ErrorCode::InvalidInput, "mode vector size does not match the mesh");
    if (radii.empty()) throw Error(ErrorCode::InvalidInput, "need at least one radius");
    for (double r : radii)
        if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "radii must be positive");
    const int m = 3;  // meshed links are surfaces; the cone over them is 3-dimensional

    // Eigenfunction certificate: || K v - lambda M v || <= tol, relative.
    std::vector<double> kv(n), lap(n);
    sys.multiply_stiffness(v.data(), kv.data());
    double rnum = 0.0, vnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        double ri = kv[i] - eigenvalue * sys.mass[i] * v[i];
        rnum += ri * ri;
        vnorm += sys.mass[i] * v[i] * sys.mass[i] * v[i];
        lap[i] = kv[i] / sys.mass[i];  // discrete link Laplacian of v
    }
    if (std::sqrt(rnum) > eigen_tol * (1.0 + eigenvalue) * std::sqrt(std::max(vnorm, 1e-300))) {
        std::ostringstream os;
        os << "input is not a discrete eigenfunction for eigenvalue " << eigenvalue
           << " within tolerance " << eigen_tol;
        throw Error(ErrorCode::InvalidMode, os.str());
    }

    HarmonicExtension out;
    out.radii = radii;
    out.values.resize(radii.size() * n);
    out.residuals.resize(radii.size() * n);
    const double alaw = alpha * (alpha + m - 2.0);
    double wsum = 0.0, racc = 0.0;
    for (std::size_t s = 0; s < radii.size(); ++s) {
        const double r = radii[s];
        const double ra = std::pow(r, alpha);
        const double ram2 = std::pow(r, alpha - 2.0);
        for (int i = 0; i < n; ++i) {
            double resid = ram2 * (lap[i] - alaw * v[i]);
            out.values[s * n + i] = ra * v[i];
            out.residuals[s * n + i] = resid;
            out.max_residual = std::max(out.max_residual, std::fabs(resid));
            racc += sys.mass[i] * resid * resid;
            wsum += sys.mass[i];
        }
    }
    out.rms_residual = std::sqrt(racc / wsum);
    return out;
}

int bounded_harmonic_dim(const SpectrumTable& spectrum) {
    spectrum.validate();
    return spectrum.kernel_multiplicity();
}

}  // namespace conecalc

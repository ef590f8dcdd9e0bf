#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "conecalc/error.hpp"
#include "conecalc/simd.hpp"
#include "conecalc/spectrum.hpp"

namespace conecalc {

namespace {

double dot_d(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

CotanSystem assemble_cotan(const TriMesh& mesh) {
    mesh.validate(/*require_closed=*/true);
    const int n = mesh.vertex_count();
    const int d = mesh.ambient_dim;

    CotanSystem sys;
    sys.n = n;
    sys.mass.assign(n, 0.0);

    std::vector<std::map<int, double>> rows(n);
    std::vector<double> u(d), w(d);
    for (const auto& tri : mesh.triangles) {
        const double* p[3] = {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
        for (int k = 0; k < d; ++k) {
            u[k] = p[1][k] - p[0][k];
            w[k] = p[2][k] - p[0][k];
        }
        double uu = dot_d(u.data(), u.data(), d);
        double ww = dot_d(w.data(), w.data(), d);
        double uw = dot_d(u.data(), w.data(), d);
        double area = 0.5 * std::sqrt(std::max(uu * ww - uw * uw, 0.0));
        if (area <= 0.0)
            throw Error(ErrorCode::InvalidMesh, "zero-area triangle in assembly");

        for (int k = 0; k < 3; ++k) sys.mass[tri[k]] += area / 3.0;

        // Half-cotangent of the angle opposite each edge.
        for (int k = 0; k < 3; ++k) {
            int i = tri[k], j = tri[(k + 1) % 3], o = tri[(k + 2) % 3];
            const double* pi = mesh.vertex(i);
            const double* pj = mesh.vertex(j);
            const double* po = mesh.vertex(o);
            double ab = 0.0;
            for (int c = 0; c < d; ++c)
                ab += (pi[c] - po[c]) * (pj[c] - po[c]);
            // cot(angle at o) = (ea . eb) / (2 area)
            double half = 0.5 * ab / (2.0 * area);
            rows[i][j] -= half;
            rows[j][i] -= half;
            rows[i][i] += half;
            rows[j][j] += half;
        }
    }

    sys.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) sys.row_ptr[i + 1] = sys.row_ptr[i] + static_cast<int>(rows[i].size());
    sys.col_idx.resize(sys.row_ptr[n]);
    sys.values.resize(sys.row_ptr[n]);
    for (int i = 0; i < n; ++i) {
        int at = sys.row_ptr[i];
        for (const auto& [j, v] : rows[i]) {
            sys.col_idx[at] = j;
            sys.values[at] = v;
            ++at;
        }
    }
    return sys;
}

void CotanSystem::multiply_stiffness(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            s += values[k] * x[col_idx[k]];
        y[i] = s;
    }
}

namespace {

// Shift-invert Lanczos on Op = (K + c M)^{-1} M, self-adjoint in the
// M-inner product. Largest Ritz values of Op are the smallest generalized
// eigenvalues lambda = 1/theta - c of K v = lambda M v.
//
// A single Krylov run finds each distinct eigenvalue once, so degenerate
// multiplicities are recovered by deflated restarts: every new run is kept
// M-orthogonal to the pairs already accepted and re-finds the remaining
// copies of each cluster. Runs repeat until the bottom of the collected
// spectrum saturates.
class ShiftInvertLanczos {
  public:
    ShiftInvertLanczos(const CotanSystem& sys, const FemOptions& opts)
        : sys_(sys), n_(sys.n), opts_(opts) {
        double ktrace = 0.0, mtrace = 0.0;
        for (int i = 0; i < n_; ++i) {
            for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
                if (sys.col_idx[k] == i) ktrace += sys.values[k];
            mtrace += sys.mass[i];
        }
        // Positive shift keeps the factorization SPD despite the stiffness
        // kernel (constants).
        shift_ = 1e-3 * std::max(ktrace / mtrace, 1e-12);

        Eigen::SparseMatrix<double> A(n_, n_);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(sys.values.size() + n_);
        for (int i = 0; i < n_; ++i)
            for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
                trips.emplace_back(i, sys.col_idx[k], sys.values[k]);
        for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, shift_ * sys.mass[i]);
        A.setFromTriplets(trips.begin(), trips.end());
        solver_.compute(A);
        if (solver_.info() != Eigen::Success)
            throw Error(ErrorCode::NumericalFailure, "shifted stiffness factorization failed");
    }

    EigenPairs smallest(int count) {
        if (count < 1 || count > n_ - 1)
            throw Error(ErrorCode::InvalidInput, "eigenvalue count must be in [1, n-1]");

        const int max_runs = count + 8;
        int stagnant_runs = 0;
        bool saturated = false;
        for (int run = 0; run < max_runs; ++run) {
            int added_below = one_run(count, run);
            if (added_below == kSpaceExhausted) {
                // Every direction is accounted for; completeness is trivial.
                saturated = static_cast<int>(lambdas_.size()) >= count;
                break;
            }
            if (added_below < 0) {
                if (++stagnant_runs >= 2) break;
                continue;
            }
            stagnant_runs = 0;
            // Saturation: the run contributed nothing at or below the
            // current count-th smallest value, so every copy down there
            // has been found.
            if (static_cast<int>(lambdas_.size()) >= count && added_below == 0) {
                saturated = true;
                break;
            }
        }
        if (static_cast<int>(lambdas_.size()) < count || !saturated) {
            std::ostringstream os;
            os << "eigensolver could not certify the smallest " << count
               << " eigenvalues (verified " << lambdas_.size()
               << " pairs at residual " << opts_.tol << ")";
            throw Error(ErrorCode::NumericalFailure, os.str());
        }

        std::vector<int> order(lambdas_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return lambdas_[a] < lambdas_[b]; });
        // When the requested count cuts inside a degenerate cluster, keep
        // the whole cluster: the saturation loop has already verified every
        // copy, and the completeness contract of the spectrum table
        // ("everything up to the largest returned eigenvalue is present")
        // would otherwise be broken.
        int take = count;
        const double head = lambdas_[order[count - 1]];
        while (take < static_cast<int>(order.size()) &&
               lambdas_[order[take]] - head <= opts_.cluster_tol * (1.0 + lambdas_[order[take]]))
            ++take;
        EigenPairs out;
        out.lambdas.reserve(take);
        out.vectors.reserve(take);
        for (int i = 0; i < take; ++i) {
            out.lambdas.push_back(lambdas_[order[i]]);
            out.vectors.push_back(std::move(vectors_[order[i]]));
        }
        return out;
    }

  private:
    void m_mult(const double* x, double* y) const {
        for (int i = 0; i < n_; ++i) y[i] = sys_.mass[i] * x[i];
    }
    double m_norm(const double* x) const {
        return std::sqrt(simd::weighted_sq_sum(sys_.mass.data(), x, n_));
    }

    // Remove the components of w along every accepted eigenvector.
    void deflate(std::vector<double>& w, std::vector<double>& scratch) const {
        if (vectors_.empty()) return;
        m_mult(w.data(), scratch.data());
        for (const auto& v : vectors_) {
            double proj = simd::dot(scratch.data(), v.data(), n_);
            simd::axpy(-proj, v.data(), w.data(), n_);
        }
    }

    // Pencil residual in the metric of M^{-1}K:
    // || M^{-1}(K x - lambda M x) ||_M / (1 + |lambda|), with x M-normalized.
    double explicit_residual(const std::vector<double>& x, double lambda,
                             std::vector<double>& kx) const {
        sys_.multiply_stiffness(x.data(), kx.data());
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            double r = kx[i] - lambda * sys_.mass[i] * x[i];
            acc += r * r / sys_.mass[i];
        }
        return std::sqrt(acc) / (1.0 + std::fabs(lambda));
    }

    static constexpr int kRunStagnant = -1;
    static constexpr int kSpaceExhausted = -2;

    // One deflated Lanczos run. Returns the number of accepted pairs lying
    // at or below the current count-th smallest value (0 means the bottom is
    // saturated), kRunStagnant if the run accepted nothing, or
    // kSpaceExhausted when deflation leaves no directions to search.
    int one_run(int count, int run_index) {
        // Aim for at least one new pair even when the head count is already
        // met; the extra pairs are what saturates degenerate clusters.
        const int goal =
            std::max(count - static_cast<int>(lambdas_.size()), 1);
        const int max_basis = opts_.max_basis > 0
                                  ? std::min(opts_.max_basis, n_)
                                  : std::min(n_, std::max(4 * goal + 80, 120));

        std::mt19937_64 rng(opts_.seed + 1000003ULL * static_cast<std::uint64_t>(run_index));
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::vector<double> q(n_), mq(n_), v(n_), kx(n_);
        for (double& x : q) x = gauss(rng);
        deflate(q, mq);
        double nrm = m_norm(q.data());
        if (nrm < 1e-10) return kSpaceExhausted;
        simd::scale(1.0 / nrm, q.data(), n_);

        std::vector<std::vector<double>> basis;
        std::vector<double> alphas, betas;
        Eigen::VectorXd rhs(n_), sol(n_);
        double beta_prev = 0.0;

        int prev_verified = -1, stagnant_checks = 0;
        std::vector<double> run_lams;
        std::vector<std::vector<double>> run_vecs;

        for (int j = 0; j < max_basis; ++j) {
            basis.push_back(q);
            m_mult(q.data(), mq.data());
            for (int i = 0; i < n_; ++i) rhs[i] = mq[i];
            sol = solver_.solve(rhs);
            for (int i = 0; i < n_; ++i) v[i] = sol[i];

            m_mult(v.data(), mq.data());
            double alpha = simd::dot(mq.data(), q.data(), n_);
            alphas.push_back(alpha);

            simd::axpy(-alpha, basis[j].data(), v.data(), n_);
            if (j > 0) simd::axpy(-beta_prev, basis[j - 1].data(), v.data(), n_);
            // Full reorthogonalization (classical Gram-Schmidt, two passes)
            // against both the run basis and the deflation set.
            for (int pass = 0; pass < 2; ++pass) {
                m_mult(v.data(), mq.data());
                for (const auto& b : basis) {
                    double proj = simd::dot(mq.data(), b.data(), n_);
                    simd::axpy(-proj, b.data(), v.data(), n_);
                }
                for (const auto& b : vectors_) {
                    double proj = simd::dot(mq.data(), b.data(), n_);
                    simd::axpy(-proj, b.data(), v.data(), n_);
                }
            }
            double beta = m_norm(v.data());
            betas.push_back(beta);

            const int k = j + 1;
            const bool invariant = (beta <= 1e-13);
            const bool checkpoint = invariant || j + 1 == max_basis || (k % 8 == 0);
            if (checkpoint) {
                Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
                for (int i = 0; i < k; ++i) {
                    T(i, i) = alphas[i];
                    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = betas[i];
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

                run_lams.clear();
                run_vecs.clear();
                const int want = std::min(k, goal + 2);
                for (int i = 0; i < want; ++i) {
                    double theta = es.eigenvalues()[k - 1 - i];  // descending
                    if (theta <= 0.0) break;
                    std::vector<double> x(n_, 0.0);
                    for (int jj = 0; jj < k; ++jj)
                        simd::axpy(es.eigenvectors()(jj, k - 1 - i), basis[jj].data(),
                                   x.data(), n_);
                    double xn = m_norm(x.data());
                    if (xn < 1e-12) break;
                    simd::scale(1.0 / xn, x.data(), n_);
                    double lambda = 1.0 / theta - shift_;
                    if (explicit_residual(x, lambda, kx) <= opts_.tol) {
                        run_lams.push_back(lambda);
                        run_vecs.push_back(std::move(x));
                    } else if (static_cast<int>(run_lams.size()) >= goal) {
                        break;
                    }
                }
                int verified = static_cast<int>(run_lams.size());
                stagnant_checks = (verified == prev_verified) ? stagnant_checks + 1 : 0;
                prev_verified = verified;
                bool done = verified >= goal || invariant ||
                            (verified >= 1 && stagnant_checks >= 3) || j + 1 == max_basis;
                if (done) break;
            }
            if (invariant) break;
            q = v;
            simd::scale(1.0 / beta, q.data(), n_);
            beta_prev = beta;
        }

        if (run_lams.empty()) return kRunStagnant;

        double saturation_level = std::numeric_limits<double>::infinity();
        if (static_cast<int>(lambdas_.size()) >= count) {
            std::vector<double> sorted = lambdas_;
            std::sort(sorted.begin(), sorted.end());
            saturation_level = sorted[count - 1] + opts_.cluster_tol * (1.0 + sorted[count - 1]);
        }
        int added_below = 0;
        for (std::size_t i = 0; i < run_lams.size(); ++i) {
            if (run_lams[i] <= saturation_level) ++added_below;
            lambdas_.push_back(run_lams[i]);
            vectors_.push_back(std::move(run_vecs[i]));
        }
        return added_below;
    }

    const CotanSystem& sys_;
    const int n_;
    FemOptions opts_;
    double shift_ = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    std::vector<double> lambdas_;
    std::vector<std::vector<double>> vectors_;
};

}  // namespace

EigenPairs fem_eigenpairs(const TriMesh& mesh, int count, const FemOptions& opts) {
    const CotanSystem sys = assemble_cotan(mesh);
    ShiftInvertLanczos solver(sys, opts);
    return solver.smallest(count);
}

SpectrumTable fem_spectrum(const TriMesh& mesh, int count, const FemOptions& opts) {
    EigenPairs pairs = fem_eigenpairs(mesh, count, opts);
    double lam_max = pairs.lambdas.empty() ? 0.0 : pairs.lambdas.back();
    // Zero eigenvalues come out at the factorization noise floor.
    double zero_snap = 1e-8 * (1.0 + std::fabs(lam_max));
    return make_spectrum_table(mesh.ambient_dim - 1, pairs.lambdas, SpectrumSource::Fem,
                               lam_max, opts.cluster_tol, zero_snap);
}

}  // namespace conecalc

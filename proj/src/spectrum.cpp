#include "conecalc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "conecalc/error.hpp"

namespace conecalc {

const char* to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::SphereAnalytic: return "sphere-analytic";
        case SpectrumSource::TorusAnalytic: return "torus-analytic";
        case SpectrumSource::Fem: return "fem";
        case SpectrumSource::External: return "external";
    }
    return "external";
}

SpectrumSource spectrum_source_from_string(const std::string& s) {
    if (s == "sphere-analytic") return SpectrumSource::SphereAnalytic;
    if (s == "torus-analytic") return SpectrumSource::TorusAnalytic;
    if (s == "fem") return SpectrumSource::Fem;
    if (s == "external") return SpectrumSource::External;
    throw Error(ErrorCode::InvalidInput, "unknown spectrum source: " + s);
}

void SpectrumTable::validate() const {
    if (entries.empty())
        throw Error(ErrorCode::InvalidSpectrum, "empty spectrum table");
    if (entries.front().lambda != 0.0)
        throw Error(ErrorCode::InvalidSpectrum, "first eigenvalue must be exactly 0 (constants)");
    double prev = -1.0;
    for (const auto& e : entries) {
        if (e.lambda < 0.0)
            throw Error(ErrorCode::InvalidSpectrum, "negative eigenvalue in spectrum");
        if (e.mult < 1)
            throw Error(ErrorCode::InvalidSpectrum, "nonpositive multiplicity in spectrum");
        if (e.lambda <= prev)
            throw Error(ErrorCode::InvalidSpectrum, "eigenvalues must be strictly ascending");
        if (prev >= 0.0 && e.lambda - prev <= cluster_tol * (1.0 + e.lambda))
            throw Error(ErrorCode::InvalidSpectrum, "adjacent entries violate the clustering tolerance");
        prev = e.lambda;
    }
}

int SpectrumTable::kernel_multiplicity() const {
    if (entries.empty() || entries.front().lambda != 0.0) return 0;
    return entries.front().mult;
}

int SpectrumTable::multiplicity_at(double lambda) const {
    for (const auto& e : entries)
        if (std::fabs(e.lambda - lambda) <= cluster_tol * (1.0 + std::fabs(lambda)))
            return e.mult;
    return 0;
}

double SpectrumTable::first_nonzero() const {
    for (const auto& e : entries)
        if (e.lambda > 0.0) return e.lambda;
    throw Error(ErrorCode::InvalidSpectrum, "spectrum has no nonzero eigenvalue");
}

SpectrumTable make_spectrum_table(int link_dim, std::vector<double> raw,
                                  SpectrumSource source, double coverage_max,
                                  double cluster_tol, double zero_snap_abs) {
    if (raw.empty())
        throw Error(ErrorCode::InvalidSpectrum, "no eigenvalues supplied");
    std::sort(raw.begin(), raw.end());
    for (double& v : raw)
        if (std::fabs(v) <= zero_snap_abs) v = 0.0;
    if (raw.front() < 0.0)
        throw Error(ErrorCode::InvalidSpectrum, "negative eigenvalue beyond the zero-snap window");

    SpectrumTable table;
    table.link_dim = link_dim;
    table.source = source;
    table.coverage_max = coverage_max;
    table.cluster_tol = cluster_tol;

    std::size_t i = 0;
    while (i < raw.size()) {
        double anchor = raw[i];
        int mult = 1;
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j] - anchor <= cluster_tol * (1.0 + std::fabs(raw[j]))) {
            ++mult;
            ++j;
        }
        // Cluster representative: mean, which keeps FEM splitting symmetric.
        double sum = 0.0;
        for (std::size_t k = i; k < j; ++k) sum += raw[k];
        double rep = (anchor == 0.0) ? 0.0 : sum / mult;
        table.entries.push_back({rep, mult});
        i = j;
    }
    table.validate();
    return table;
}

// --- sphere ---------------------------------------------------------------

std::int64_t harmonic_poly_dim(int m, int k) {
    if (k == 0) return 1;
    if (k == 1) return m;
    auto binom = [](std::int64_t n, std::int64_t r) -> std::int64_t {
        if (r < 0 || r > n) return 0;
        r = std::min(r, n - r);
        std::int64_t num = 1;
        for (std::int64_t i = 1; i <= r; ++i) {
            num = num * (n - r + i);
            num /= i;
        }
        return num;
    };
    // dim of degree-k polynomials minus dim of degree-(k-2) polynomials.
    return binom(k + m - 1, m - 1) - binom(k + m - 3, m - 1);
}

SpectrumTable sphere_spectrum(int m, int degree_max) {
    if (m < 3)
        throw Error(ErrorCode::InvalidDimension,
                    "cone dimension must be > 2; spheres S^{m-1} need m >= 3");
    if (degree_max < 0)
        throw Error(ErrorCode::InvalidInput, "degree_max must be >= 0");

    SpectrumTable table;
    table.link_dim = m - 1;
    table.source = SpectrumSource::SphereAnalytic;
    table.cluster_tol = 1e-12;
    for (int k = 0; k <= degree_max; ++k) {
        std::int64_t h = harmonic_poly_dim(m, k);
        if (h > std::numeric_limits<int>::max())
            throw Error(ErrorCode::InvalidInput, "harmonic multiplicity overflows int");
        table.entries.push_back({static_cast<double>(k) * (k + m - 2), static_cast<int>(h)});
    }
    table.coverage_max = static_cast<double>(degree_max) * (degree_max + m - 2);
    table.validate();
    return table;
}

// --- flat torus -----------------------------------------------------------

std::vector<double> LatticeBasis::gram() const {
    std::vector<double> g(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k)
                s += basis[i * dim + k] * basis[j * dim + k];
            g[i * dim + j] = s;
        }
    return g;
}

void LatticeBasis::validate() const {
    if (dim < 1) throw Error(ErrorCode::InvalidLattice, "lattice rank must be >= 1");
    if (basis.size() != static_cast<std::size_t>(dim) * dim)
        throw Error(ErrorCode::InvalidLattice, "basis must be a dim x dim matrix");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        B(basis.data(), dim, dim);
    Eigen::MatrixXd G = B * B.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::InvalidLattice, "gram matrix is not positive definite");
}

SpectrumTable flat_torus_spectrum(const LatticeBasis& lattice, double lambda_max) {
    lattice.validate();
    if (!(lambda_max > 0.0))
        throw Error(ErrorCode::InvalidInput, "lambda_max must be > 0");

    const int n = lattice.dim;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        B(lattice.basis.data(), n, n);
    // Dual lattice: rows of B^{-T}.
    Eigen::MatrixXd D = B.inverse().transpose();

    const double tau = 2.0 * std::acos(-1.0);
    // |k D| >= sigma_min(D) |k| bounds the integer search box.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    double sigma_min = svd.singularValues().minCoeff();
    if (!(sigma_min > 0.0))
        throw Error(ErrorCode::InvalidLattice, "singular dual basis");
    const long R = static_cast<long>(std::ceil(std::sqrt(lambda_max) / (tau * sigma_min))) + 1;
    if (n * std::log(2.0 * R + 1.0) > std::log(5e8))
        throw Error(ErrorCode::InvalidInput, "dual lattice enumeration box too large");

    std::vector<double> raw;
    std::vector<long> k(n, -R);
    Eigen::VectorXd kv(n);
    const double slack = 1e-9 * (1.0 + lambda_max);
    while (true) {
        for (int i = 0; i < n; ++i) kv[i] = static_cast<double>(k[i]);
        Eigen::VectorXd mu = D.transpose() * kv;
        double lam = tau * tau * mu.squaredNorm();
        if (lam <= lambda_max + slack) raw.push_back(lam);
        int pos = 0;
        while (pos < n && ++k[pos] > R) k[pos++] = -R;
        if (pos == n) break;
    }
    return make_spectrum_table(n, std::move(raw), SpectrumSource::TorusAnalytic,
                               lambda_max, 1e-9, 1e-12);
}

LatticeBasis clifford_link_lattice(int m) {
    if (m < 3)
        throw Error(ErrorCode::InvalidDimension, "diagonal torus cones need m >= 3");
    const int n = m - 1;
    const double tau = 2.0 * std::acos(-1.0);
    // Generators v_i = 2 pi (e_i - e_m); quadratic form |th|^2 / m gives
    // gram_ij = (4 pi^2 / m) (1 + delta_ij).
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            G(i, j) = tau * tau / m * (1.0 + (i == j ? 1.0 : 0.0));
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::InvalidLattice, "gram factorization failed");
    Eigen::MatrixXd L = llt.matrixL();

    LatticeBasis out;
    out.dim = n;
    out.basis.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.basis[i * n + j] = L(i, j);
    return out;
}

}  // namespace conecalc

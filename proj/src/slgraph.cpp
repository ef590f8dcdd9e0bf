#include "conecalc/slgraph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "conecalc/error.hpp"
#include "conecalc/fd_weights.hpp"
#include "conecalc/parallel.hpp"

namespace conecalc {

std::vector<double> GridScalarField::spacing() const {
    std::vector<double> h(m);
    for (int a = 0; a < m; ++a) h[a] = (hi[a] - lo[a]) / (shape[a] - 1);
    return h;
}

std::size_t GridScalarField::node_count() const {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    return n;
}

std::size_t GridScalarField::index(const std::vector<int>& coord) const {
    std::size_t idx = 0;
    for (int a = 0; a < m; ++a) idx = idx * shape[a] + coord[a];
    return idx;
}

void GridScalarField::validate() const {
    if (m < 3) throw Error(ErrorCode::InvalidDimension, "grid dimension must be >= 3");
    if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m ||
        static_cast<int>(shape.size()) != m)
        throw Error(ErrorCode::InvalidInput, "box/shape arrays must have length m");
    for (int a = 0; a < m; ++a) {
        if (!(lo[a] < hi[a])) throw Error(ErrorCode::InvalidInput, "box needs lo < hi per axis");
        if (shape[a] < 4)
            throw Error(ErrorCode::InvalidInput, "need at least 4 nodes per axis for the stencils");
    }
    if (values.size() != node_count())
        throw Error(ErrorCode::InvalidInput, "value array does not match the grid shape");
}

GridScalarField sample_grid_field(int m, const std::vector<double>& lo,
                                  const std::vector<double>& hi,
                                  const std::vector<int>& shape,
                                  const std::function<double(const std::vector<double>&)>& f) {
    GridScalarField g;
    g.m = m;
    g.lo = lo;
    g.hi = hi;
    g.shape = shape;
    g.values.resize(g.node_count());
    g.validate();
    std::vector<double> h = g.spacing();
    std::vector<int> c(m, 0);
    std::vector<double> x(m);
    for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
        for (int a = 0; a < m; ++a) x[a] = lo[a] + h[a] * c[a];
        g.values[idx] = f(x);
        for (int a = m - 1; a >= 0; --a) {
            if (++c[a] < shape[a]) break;
            c[a] = 0;
        }
    }
    return g;
}

namespace {

// Second-order first/second derivative node offsets and weights along one
// axis; one-sided at the faces. Exact on quadratics everywhere.
struct AxisStencil {
    std::array<int, 4> offsets{};
    std::array<double, 4> w1{};
    std::array<double, 4> w2{};
    int count = 0;
    bool centered = false;
};

AxisStencil axis_stencil(int i, int n, double h) {
    AxisStencil s;
    if (i >= 1 && i <= n - 2) {
        s.centered = true;
        s.count = 3;
        s.offsets = {-1, 0, 1, 0};
        s.w1 = {-0.5 / h, 0.0, 0.5 / h, 0.0};
        s.w2 = {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h), 0.0};
    } else if (i == 0) {
        s.count = 4;
        s.offsets = {0, 1, 2, 3};
        s.w1 = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
        s.w2 = {2.0 / (h * h), -5.0 / (h * h), 4.0 / (h * h), -1.0 / (h * h)};
    } else {
        s.count = 4;
        s.offsets = {0, -1, -2, -3};
        s.w1 = {1.5 / h, -2.0 / h, 0.5 / h, 0.0};
        s.w2 = {2.0 / (h * h), -5.0 / (h * h), 4.0 / (h * h), -1.0 / (h * h)};
    }
    return s;
}

// Im det(I + i H) for a symmetric real matrix, by complex Gaussian
// elimination with partial pivoting.
double im_det_i_plus_ih(const std::vector<double>& H, int m) {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a[i * m + j] = std::complex<double>(i == j ? 1.0 : 0.0, H[i * m + j]);
    std::complex<double> det(1.0, 0.0);
    for (int k = 0; k < m; ++k) {
        int piv = k;
        double best = std::abs(a[k * m + k]);
        for (int r = k + 1; r < m; ++r) {
            double cand = std::abs(a[r * m + k]);
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = 0; c < m; ++c) std::swap(a[k * m + c], a[piv * m + c]);
            det = -det;
        }
        det *= a[k * m + k];
        for (int r = k + 1; r < m; ++r) {
            std::complex<double> factor = a[r * m + k] / a[k * m + k];
            for (int c = k; c < m; ++c) a[r * m + c] -= factor * a[k * m + c];
        }
    }
    return det.imag();
}

// Direct expansion for m = 3, used as a cross-check:
// Im prod over the characteristic structure = e1 - e3 for eigenvalues of H.
double im_det_3x3(const std::vector<double>& H) {
    double e1 = H[0] + H[4] + H[8];
    double detH = H[0] * (H[4] * H[8] - H[5] * H[7]) -
                  H[1] * (H[3] * H[8] - H[5] * H[6]) +
                  H[2] * (H[3] * H[7] - H[4] * H[6]);
    return e1 - detH;
}

struct HessianField {
    int m = 0;
    std::vector<int> shape;
    std::vector<double> entries;        // node-major, m*m per node
    std::vector<std::uint8_t> interior;
};

HessianField discrete_hessian(const GridScalarField& A) {
    A.validate();
    const int m = A.m;
    const std::vector<double> h = A.spacing();
    const std::size_t nodes = A.node_count();

    HessianField out;
    out.m = m;
    out.shape = A.shape;
    out.entries.assign(nodes * m * m, 0.0);
    out.interior.assign(nodes, 1);

    std::vector<std::size_t> stride(m, 1);
    for (int a = m - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(A.shape[a + 1]);

    std::vector<int> c(m, 0);
    for (std::size_t idx = 0; idx < nodes; ++idx) {
        double* H = out.entries.data() + idx * m * m;
        bool interior = true;
        for (int a = 0; a < m; ++a) {
            AxisStencil sa = axis_stencil(c[a], A.shape[a], h[a]);
            if (!sa.centered) interior = false;
            // Pure second derivative along axis a.
            double dd = 0.0;
            for (int k = 0; k < sa.count; ++k)
                dd += sa.w2[k] * A.values[idx + static_cast<std::ptrdiff_t>(sa.offsets[k]) * stride[a]];
            H[a * m + a] = dd;
            // Mixed derivatives: nested first-derivative stencils.
            for (int b = a + 1; b < m; ++b) {
                AxisStencil sb = axis_stencil(c[b], A.shape[b], h[b]);
                if (!sb.centered) interior = false;
                double dab = 0.0;
                for (int ka = 0; ka < sa.count; ++ka) {
                    if (sa.w1[ka] == 0.0) continue;
                    for (int kb = 0; kb < sb.count; ++kb) {
                        if (sb.w1[kb] == 0.0) continue;
                        std::ptrdiff_t off = static_cast<std::ptrdiff_t>(sa.offsets[ka]) * stride[a] +
                                             static_cast<std::ptrdiff_t>(sb.offsets[kb]) * stride[b];
                        dab += sa.w1[ka] * sb.w1[kb] * A.values[idx + off];
                    }
                }
                H[a * m + b] = dab;
                H[b * m + a] = dab;
            }
        }
        out.interior[idx] = interior ? 1 : 0;
        for (int a = m - 1; a >= 0; --a) {
            if (++c[a] < A.shape[a]) break;
            c[a] = 0;
        }
    }
    return out;
}

}  // namespace

GraphDefect graph_defect(const GridScalarField& A) {
    HessianField H = discrete_hessian(A);
    const int m = A.m;
    const std::size_t nodes = A.node_count();

    GraphDefect out;
    out.field = A;
    out.field.values.assign(nodes, 0.0);
    out.interior = H.interior;

    constexpr std::size_t kBlock = 8192;
    const int chunks = static_cast<int>((nodes + kBlock - 1) / kBlock);
    std::vector<double> block_max(chunks, 0.0), block_max_int(chunks, 0.0);
    parallel_chunks(chunks, [&](int c) {
        std::vector<double> Hn(static_cast<std::size_t>(m) * m);
        const std::size_t begin = static_cast<std::size_t>(c) * kBlock;
        const std::size_t end = std::min(nodes, begin + kBlock);
        for (std::size_t idx = begin; idx < end; ++idx) {
            std::copy(H.entries.begin() + idx * m * m, H.entries.begin() + (idx + 1) * m * m,
                      Hn.begin());
            double F = (m == 3) ? im_det_3x3(Hn) : im_det_i_plus_ih(Hn, m);
            out.field.values[idx] = F;
            block_max[c] = std::max(block_max[c], std::fabs(F));
            if (out.interior[idx]) block_max_int[c] = std::max(block_max_int[c], std::fabs(F));
        }
    });
    for (int c = 0; c < chunks; ++c) {
        out.max_abs = std::max(out.max_abs, block_max[c]);
        out.max_abs_interior = std::max(out.max_abs_interior, block_max_int[c]);
    }
    return out;
}

double lagrangian_residual(const std::vector<GridScalarField>& eta) {
    if (eta.empty()) throw Error(ErrorCode::InvalidInput, "empty 1-form");
    const int m = eta.front().m;
    if (static_cast<int>(eta.size()) != m)
        throw Error(ErrorCode::InvalidInput, "1-form needs m component fields");
    for (const auto& comp : eta) {
        comp.validate();
        if (comp.shape != eta.front().shape)
            throw Error(ErrorCode::InvalidInput, "1-form components must share one grid");
    }
    const GridScalarField& ref = eta.front();
    const std::vector<double> h = ref.spacing();
    const std::size_t nodes = ref.node_count();

    std::vector<std::size_t> stride(m, 1);
    for (int a = m - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(ref.shape[a + 1]);

    double worst = 0.0;
    std::vector<int> c(m, 0);
    for (std::size_t idx = 0; idx < nodes; ++idx) {
        bool interior = true;
        for (int a = 0; a < m; ++a)
            if (c[a] == 0 || c[a] == ref.shape[a] - 1) interior = false;
        if (interior) {
            for (int a = 0; a < m; ++a) {
                for (int b = a + 1; b < m; ++b) {
                    double d_a_eta_b = (eta[b].values[idx + stride[a]] -
                                        eta[b].values[idx - stride[a]]) / (2.0 * h[a]);
                    double d_b_eta_a = (eta[a].values[idx + stride[b]] -
                                        eta[a].values[idx - stride[b]]) / (2.0 * h[b]);
                    worst = std::max(worst, std::fabs(d_a_eta_b - d_b_eta_a));
                }
            }
        }
        for (int a = m - 1; a >= 0; --a) {
            if (++c[a] < ref.shape[a]) break;
            c[a] = 0;
        }
    }
    return worst;
}

std::vector<LinearizationRow> linearization_check(const GridScalarField& A,
                                                  const std::vector<double>& t_values) {
    HessianField H = discrete_hessian(A);
    const int m = A.m;
    const std::size_t nodes = A.node_count();

    std::vector<LinearizationRow> rows;
    rows.reserve(t_values.size());
    std::vector<double> Hn(static_cast<std::size_t>(m) * m);
    for (double tval : t_values) {
        if (!(tval != 0.0))
            throw Error(ErrorCode::InvalidInput, "linearization scales must be nonzero");
        double worst = 0.0;
        for (std::size_t idx = 0; idx < nodes; ++idx) {
            if (!H.interior[idx]) continue;
            const double* Hptr = H.entries.data() + idx * m * m;
            double trace = 0.0;
            for (int a = 0; a < m; ++a) {
                trace += Hptr[a * m + a];
                for (int b = 0; b < m; ++b) Hn[a * m + b] = tval * Hptr[a * m + b];
            }
            double F = (m == 3) ? im_det_3x3(Hn) : im_det_i_plus_ih(Hn, m);
            // Linear term of F(tA): t * trace Hess A = t * (-d*dA).
            worst = std::max(worst, std::fabs(F - tval * trace));
        }
        rows.push_back({tval, worst, worst / (tval * tval)});
    }
    return rows;
}

// --- radial potential on the cone annulus ---------------------------------

std::vector<std::pair<int, int>> link_edges(const TriMesh& mesh) {
    std::set<std::pair<int, int>> edges;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    return {edges.begin(), edges.end()};
}

void OneFormSamples::validate() const {
    if (!annulus) throw Error(ErrorCode::InvalidInput, "1-form needs an annulus");
    const std::size_t shells = annulus->shell_count();
    if (angular.size() != shells * edges.size())
        throw Error(ErrorCode::InvalidInput, "angular sample count mismatch");
    if (radial.size() != shells * annulus->vertex_count())
        throw Error(ErrorCode::InvalidInput, "radial sample count mismatch");
}

double one_form_closedness(const OneFormSamples& eta) {
    eta.validate();
    const ConeAnnulus& an = *eta.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    const std::size_t ne = eta.edges.size();

    std::map<std::pair<int, int>, std::size_t> edge_index;
    for (std::size_t e = 0; e < ne; ++e) edge_index[eta.edges[e]] = e;
    auto signed_edge = [&](int a, int b, std::size_t shell) {
        if (a < b) return eta.angular[shell * ne + edge_index.at({a, b})];
        return -eta.angular[shell * ne + edge_index.at({b, a})];
    };

    double scale = 1e-300;
    for (double x : eta.angular) scale = std::max(scale, std::fabs(x));
    for (std::size_t s = 0; s < static_cast<std::size_t>(shells); ++s)
        for (int v = 0; v < nv; ++v)
            scale = std::max(scale, std::fabs(eta.radial[s * nv + v]));

    double worst = 0.0;
    // Link part: the discrete exterior derivative per triangle and shell.
    for (int s = 0; s < shells; ++s) {
        for (const auto& tri : an.link().triangles) {
            double circ = signed_edge(tri[0], tri[1], s) + signed_edge(tri[1], tri[2], s) +
                          signed_edge(tri[2], tri[0], s);
            worst = std::max(worst, std::fabs(circ));
        }
    }
    // Mixed part: d(angular)/dr must match the link differential of the
    // radial component, edge by edge.
    std::vector<double> t(shells);
    for (int s = 0; s < shells; ++s) t[s] = std::log(an.radii()[s]);
    const int win = std::min(6, shells);
    for (int s = 0; s < shells; ++s) {
        int lo = std::clamp(s - 2, 0, shells - win);
        std::vector<double> window(t.begin() + lo, t.begin() + lo + win);
        auto w1 = fd_weights(t[s], window, 1);
        const double r = an.radii()[s];
        for (std::size_t e = 0; e < ne; ++e) {
            double ddr = 0.0;
            for (int k = 0; k < win; ++k)
                ddr += w1[k] * eta.angular[static_cast<std::size_t>(lo + k) * ne + e];
            ddr /= r;
            double dlink = eta.radial[static_cast<std::size_t>(s) * nv + eta.edges[e].second] -
                           eta.radial[static_cast<std::size_t>(s) * nv + eta.edges[e].first];
            worst = std::max(worst, std::fabs(ddr - dlink));
        }
    }
    return worst / scale;
}

RadialPotential radial_potential(const OneFormSamples& eta, double mu_hint,
                                 double closedness_tol) {
    eta.validate();
    double defect = one_form_closedness(eta);
    if (defect > closedness_tol) {
        std::ostringstream os;
        os << "1-form closedness defect " << defect << " exceeds tolerance " << closedness_tol;
        throw Error(ErrorCode::NotClosed, os.str());
    }

    const ConeAnnulus& an = *eta.annulus;
    const int shells = an.shell_count();
    const int nv = an.vertex_count();
    const std::size_t ne = eta.edges.size();
    const auto& radii = an.radii();

    // Inner tail exponent of the radial component, fitted from the two
    // innermost shells; falls back to mu_hint - 1 when the signal is tiny.
    double tail_p = mu_hint - 1.0;
    {
        double n0 = 0.0, n1 = 0.0;
        for (int v = 0; v < nv; ++v) {
            n0 = std::max(n0, std::fabs(eta.radial[v]));
            n1 = std::max(n1, std::fabs(eta.radial[static_cast<std::size_t>(1) * nv + v]));
        }
        if (n0 > 1e-14 && n1 > 1e-14)
            tail_p = std::log(n1 / n0) / std::log(radii[1] / radii[0]);
    }
    if (tail_p <= -1.0 + 1e-9) {
        std::ostringstream os;
        os << "radial component behaves like r^" << tail_p
           << " near the tip; the potential integral diverges";
        throw Error(ErrorCode::NotIntegrable, os.str());
    }

    RadialPotential out;
    out.tail_exponent = tail_p;
    out.potential.annulus = eta.annulus;
    out.potential.values.assign(an.sample_count(), 0.0);

    // A(sigma, r) = tail + int_{r0}^{r} radial(sigma, s) ds, the dr integral
    // done as int radial * r dt by cumulative Simpson on shell pairs.
    const double h = std::log(radii[1] / radii[0]);
    std::vector<double> acc(nv);
    for (int v = 0; v < nv; ++v)
        acc[v] = eta.radial[v] * radii[0] / (tail_p + 1.0);  // power-law tail below r0
    for (int v = 0; v < nv; ++v) out.potential.at(0, v) = acc[v];
    for (int s = 2; s < shells; s += 2) {
        for (int v = 0; v < nv; ++v) {
            double f0 = eta.radial[static_cast<std::size_t>(s - 2) * nv + v] * radii[s - 2];
            double f1 = eta.radial[static_cast<std::size_t>(s - 1) * nv + v] * radii[s - 1];
            double f2 = eta.radial[static_cast<std::size_t>(s) * nv + v] * radii[s];
            // Simpson over the pair; the midpoint value interpolates.
            out.potential.at(s - 1, v) = acc[v] + h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2);
            acc[v] += h / 3.0 * (f0 + 4.0 * f1 + f2);
            out.potential.at(s, v) = acc[v];
        }
    }

    // Angular remainder per edge: eta^1 minus the link differential of A,
    // averaged over shells; its shell deviation is the decomposition residual.
    out.gamma_hat.assign(ne, 0.0);
    double scale = 1e-300;
    for (double x : eta.angular) scale = std::max(scale, std::fabs(x));
    for (double x : out.potential.values) scale = std::max(scale, std::fabs(x));
    std::vector<double> remainder(static_cast<std::size_t>(shells) * ne);
    for (int s = 0; s < shells; ++s)
        for (std::size_t e = 0; e < ne; ++e) {
            double dA = out.potential.at(s, eta.edges[e].second) -
                        out.potential.at(s, eta.edges[e].first);
            remainder[static_cast<std::size_t>(s) * ne + e] =
                eta.angular[static_cast<std::size_t>(s) * ne + e] - dA;
        }
    for (std::size_t e = 0; e < ne; ++e) {
        double mean = 0.0;
        for (int s = 0; s < shells; ++s) mean += remainder[static_cast<std::size_t>(s) * ne + e];
        mean /= shells;
        out.gamma_hat[e] = mean;
        for (int s = 0; s < shells; ++s)
            out.residual = std::max(
                out.residual,
                std::fabs(remainder[static_cast<std::size_t>(s) * ne + e] - mean) / scale);
    }
    return out;
}

}  // namespace conecalc

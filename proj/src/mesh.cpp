#include "conecalc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "conecalc/error.hpp"

namespace conecalc {

namespace {

double dot_d(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double TriMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const int d = ambient_dim;
    std::vector<double> u(d), v(d);
    const double* pa = vertex(tri[0]);
    const double* pb = vertex(tri[1]);
    const double* pc = vertex(tri[2]);
    for (int i = 0; i < d; ++i) {
        u[i] = pb[i] - pa[i];
        v[i] = pc[i] - pa[i];
    }
    // Gram determinant; valid in any ambient dimension.
    double uu = dot_d(u.data(), u.data(), d);
    double vv = dot_d(v.data(), v.data(), d);
    double uv = dot_d(u.data(), v.data(), d);
    double g = uu * vv - uv * uv;
    return 0.5 * std::sqrt(std::max(g, 0.0));
}

double TriMesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += triangle_area(t);
    return s;
}

void TriMesh::validate(bool require_closed) const {
    if (ambient_dim < 2)
        throw Error(ErrorCode::InvalidMesh, "ambient dimension must be >= 2");
    if (vertices.size() % ambient_dim != 0)
        throw Error(ErrorCode::InvalidMesh, "vertex array size not a multiple of ambient_dim");
    const int nv = vertex_count();
    if (nv < 3 || triangles.empty())
        throw Error(ErrorCode::InvalidMesh, "mesh needs at least 3 vertices and 1 triangle");

    double scale = 0.0;
    for (double c : vertices) scale = std::max(scale, std::fabs(c));
    scale = std::max(scale, 1e-30);

    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw Error(ErrorCode::InvalidMesh, "triangle vertex index out of range");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw Error(ErrorCode::InvalidMesh, "triangle with repeated vertex");
    }
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        if (triangle_area(t) <= 1e-14 * scale * scale)
            throw Error(ErrorCode::InvalidMesh, "degenerate triangle (area below threshold)");
    }

    // Each undirected edge must appear in exactly two triangles, once per
    // direction (closed orientable complex).
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (++directed[{a, b}] > 1)
                throw Error(ErrorCode::InvalidMesh, "edge repeated with same orientation (non-manifold or non-orientable)");
        }
    }
    if (require_closed) {
        for (const auto& [e, c] : directed) {
            if (directed.find({e.second, e.first}) == directed.end())
                throw Error(ErrorCode::InvalidMesh, "open mesh: boundary edge found, link must be closed");
        }
    }
}

bool TriMesh::is_closed() const {
    std::map<std::pair<int, int>, int> undirected;
    for (const auto& tri : triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            undirected[{std::min(a, b), std::max(a, b)}]++;
        }
    for (const auto& [e, c] : undirected)
        if (c != 2) return false;
    return true;
}

int connected_components(const TriMesh& mesh) {
    const int n = mesh.vertex_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& tri : mesh.triangles) {
        int a = find(tri[0]);
        int b = find(tri[1]);
        int c = find(tri[2]);
        parent[b] = a;
        parent[find(c)] = find(a);
    }
    int count = 0;
    for (int i = 0; i < n; ++i)
        if (find(i) == i) ++count;
    return count;
}

TriMesh icosphere(int level) {
    if (level < 0) throw Error(ErrorCode::InvalidInput, "icosphere level must be >= 0");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) {
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        v = {v[0] / n, v[1] / n, v[2] / n};
    }
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            std::array<double, 3> p = {
                (verts[a][0] + verts[b][0]) / 2,
                (verts[a][1] + verts[b][1]) / 2,
                (verts[a][2] + verts[b][2]) / 2};
            double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            p = {p[0] / n, p[1] / n, p[2] / n};
            int idx = static_cast<int>(verts.size());
            verts.push_back(p);
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]);
            int bc = mid(f[1], f[2]);
            int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({ab, f[1], bc});
            next.push_back({ca, bc, f[2]});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriMesh mesh;
    mesh.ambient_dim = 3;
    mesh.vertices.reserve(verts.size() * 3);
    for (const auto& v : verts) {
        mesh.vertices.push_back(v[0]);
        mesh.vertices.push_back(v[1]);
        mesh.vertices.push_back(v[2]);
    }
    mesh.triangles = std::move(faces);
    return mesh;
}

TriMesh flat_torus_mesh(int n) {
    if (n < 3) throw Error(ErrorCode::InvalidInput, "torus grid must be at least 3x3");
    const double tau = 2.0 * std::acos(-1.0);
    TriMesh mesh;
    mesh.ambient_dim = 4;
    mesh.vertices.reserve(static_cast<std::size_t>(n) * n * 4);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double x = static_cast<double>(i) / n;
            double y = static_cast<double>(j) / n;
            mesh.vertices.push_back(std::cos(tau * x) / tau);
            mesh.vertices.push_back(std::sin(tau * x) / tau);
            mesh.vertices.push_back(std::cos(tau * y) / tau);
            mesh.vertices.push_back(std::sin(tau * y) / tau);
        }
    }
    auto idx = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            mesh.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            mesh.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    }
    return mesh;
}

TriMesh disjoint_union(const TriMesh& a, const TriMesh& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw Error(ErrorCode::InvalidMesh, "disjoint union needs matching ambient dimensions");
    TriMesh out = a;
    const int off = a.vertex_count();
    out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
    for (const auto& tri : b.triangles)
        out.triangles.push_back({tri[0] + off, tri[1] + off, tri[2] + off});
    return out;
}

TriMesh read_off(std::istream& in) {
    std::string header;
    if (!(in >> header) || header != "OFF")
        throw Error(ErrorCode::InvalidMesh, "missing OFF header");
    long nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
        throw Error(ErrorCode::InvalidMesh, "bad OFF counts line");
    std::string rest;
    std::getline(in, rest);

    TriMesh mesh;
    // Ambient dimension is inferred from the first vertex line.
    std::string line;
    long read_v = 0;
    while (read_v < nv && std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> coords;
        double c;
        while (ls >> c) coords.push_back(c);
        if (coords.empty()) continue;  // skip blank lines
        if (read_v == 0) {
            mesh.ambient_dim = static_cast<int>(coords.size());
            if (mesh.ambient_dim < 2)
                throw Error(ErrorCode::InvalidMesh, "vertex line needs >= 2 coordinates");
        } else if (static_cast<int>(coords.size()) != mesh.ambient_dim) {
            throw Error(ErrorCode::InvalidMesh, "inconsistent vertex coordinate count");
        }
        mesh.vertices.insert(mesh.vertices.end(), coords.begin(), coords.end());
        ++read_v;
    }
    if (read_v != nv) throw Error(ErrorCode::InvalidMesh, "truncated OFF vertex block");

    for (long f = 0; f < nf; ++f) {
        int k;
        if (!(in >> k)) throw Error(ErrorCode::InvalidMesh, "truncated OFF face block");
        if (k != 3) throw Error(ErrorCode::InvalidMesh, "only triangular faces are supported");
        std::array<int, 3> tri;
        if (!(in >> tri[0] >> tri[1] >> tri[2]))
            throw Error(ErrorCode::InvalidMesh, "truncated OFF face line");
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

TriMesh read_off_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open mesh file: " + path);
    return read_off(in);
}

void write_off(const TriMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.vertex_count() << " " << mesh.triangles.size() << " 0\n";
    out.precision(17);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double* p = mesh.vertex(v);
        for (int i = 0; i < mesh.ambient_dim; ++i) out << (i ? " " : "") << p[i];
        out << "\n";
    }
    for (const auto& tri : mesh.triangles)
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
}

}  // namespace conecalc

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace conecalc {

// Triangulated link surface embedded in R^d. Only 2-dimensional links are
// meshed; higher-dimensional links go through the analytic backends.
struct TriMesh {
    int ambient_dim = 3;
    std::vector<double> vertices;            // ambient_dim doubles per vertex
    std::vector<std::array<int, 3>> triangles;

    int vertex_count() const { return static_cast<int>(vertices.size()) / ambient_dim; }
    const double* vertex(int i) const { return vertices.data() + static_cast<std::size_t>(i) * ambient_dim; }

    double triangle_area(int t) const;
    double total_area() const;

    // Validates index ranges, nondegeneracy (area > 1e-14 * scale^2) and,
    // when require_closed, that every edge is shared by exactly two
    // triangles with opposite orientations.
    void validate(bool require_closed) const;

    bool is_closed() const;
};

// Number of connected components of the vertex graph (union-find).
int connected_components(const TriMesh& mesh);

// Unit sphere triangulation: icosahedron subdivided `level` times, vertices
// projected back to the sphere. 10*4^level + 2 vertices.
TriMesh icosphere(int level);

// Unit-square flat torus, n x n grid, embedded in R^4 as
// (cos 2pi x, sin 2pi x, cos 2pi y, sin 2pi y)/(2pi) so the induced metric is
// the flat dx^2 + dy^2.
TriMesh flat_torus_mesh(int n);

// Disjoint union (vertex blocks concatenated, triangle indices offset).
TriMesh disjoint_union(const TriMesh& a, const TriMesh& b);

// OFF-style line-oriented text: "OFF" header, "V F 0" counts, V vertex lines
// of ambient_dim floats, F face lines "3 i j k".
TriMesh read_off(std::istream& in);
TriMesh read_off_file(const std::string& path);
void write_off(const TriMesh& mesh, std::ostream& out);

}  // namespace conecalc

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hjb {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

using Triangle = std::array<int, 3>;

/// Conforming triangulation of a polygonal domain.
///
/// Construction validates the triangulation and normalizes every triangle to
/// counter-clockwise orientation. Boundary nodes are found topologically: a
/// vertex is on the boundary iff it touches an edge with one incident triangle.
/// Interior vertices get a contiguous index 0..N-1 in increasing vertex order.
class Mesh {
public:
    Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles);

    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
    const std::vector<int>& interior_nodes() const noexcept { return interior_nodes_; }

    bool is_boundary(int vertex) const { return interior_index_[vertex] < 0; }
    /// Interior index of a vertex, or -1 for boundary vertices.
    int interior_index(int vertex) const { return interior_index_[vertex]; }

    std::size_t n_vertices() const noexcept { return vertices_.size(); }
    std::size_t n_triangles() const noexcept { return triangles_.size(); }
    std::size_t n_interior() const noexcept { return interior_nodes_.size(); }

    /// Boundary edges as (from, to) pairs, oriented so the domain lies on the left.
    std::vector<std::array<int, 2>> boundary_edges() const;

    double signed_area(std::size_t tri) const;
    double total_area() const;

private:
    std::vector<Point2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<int> boundary_nodes_;
    std::vector<int> interior_nodes_;
    std::vector<int> interior_index_;
};

/// Parses the `.mesh2` text format.
Mesh load_mesh(std::string_view text);
Mesh read_mesh_file(const std::filesystem::path& path);

/// Writes `.mesh2` text; coordinates use shortest round-trip decimals.
std::string format_mesh(const Mesh& mesh);
void write_mesh_file(const std::filesystem::path& path, const Mesh& mesh);

inline constexpr double kAngleTolerance = 1e-12;

struct MeshStats {
    double min_angle = 0.0;
    double max_angle = 0.0;
    bool is_strictly_acute = false;
    std::size_t n_vertices = 0;
    std::size_t n_interior = 0;
    std::size_t n_triangles = 0;
};

MeshStats check_acute(const Mesh& mesh);

/// Red refinement: every triangle split into four through its edge midpoints.
Mesh uniform_refine(const Mesh& mesh);
Mesh uniform_refine(const Mesh& mesh, int times);

/// Piecewise-linear element geometry.
struct P1Geometry {
    std::vector<double> elem_area;
    /// Constant gradient of each local hat function on each triangle.
    std::vector<std::array<Point2, 3>> elem_grad;
    /// L1 norm of each vertex's hat function.
    std::vector<double> hat_mass;
    /// Longest edge over all triangles.
    double dx = 0.0;
};

P1Geometry p1_geometry(const Mesh& mesh);

}  // namespace hjb

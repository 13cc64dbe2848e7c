#include "hjbfem/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"

namespace hjb {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double corner_angle(Point2 at, Point2 p, Point2 q) {
    const Point2 u = p - at;
    const Point2 v = q - at;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

}  // namespace

Mesh::Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = static_cast<int>(vertices_.size());
    if (triangles_.empty()) throw MeshError("mesh has no triangles");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!std::isfinite(vertices_[i].x) || !std::isfinite(vertices_[i].y)) {
            throw MeshError("vertex " + std::to_string(i) + " has a non-finite coordinate");
        }
    }

    std::vector<char> used(vertices_.size(), 0);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        auto& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || v >= nv) {
                throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(v) + " out of range");
            }
            used[v] = 1;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        }
        const double area = signed_area(t);
        if (area == 0.0 || !std::isfinite(area)) {
            throw MeshError("triangle " + std::to_string(t) + " has zero area");
        }
        if (area < 0.0) std::swap(tri[1], tri[2]);
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) throw MeshError("dangling vertex " + std::to_string(i));
    }

    // Each directed edge must appear at most once; an undirected edge at most twice
    // and then with opposite directions.
    std::map<Edge, std::pair<int, int>> edge_use;  // (count, triangle of first use)
    std::map<Edge, int> directed;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            if (++directed[{a, b}] > 1) {
                throw MeshError("non-conforming mesh: edge (" + std::to_string(a) + ", " +
                                std::to_string(b) + ") is traversed twice in the same direction");
            }
            auto& use = edge_use[make_edge(a, b)];
            if (++use.first > 2) {
                throw MeshError("non-conforming mesh: edge (" + std::to_string(a) + ", " +
                                std::to_string(b) + ") shared by more than two triangles");
            }
        }
    }

    interior_index_.assign(vertices_.size(), 0);
    for (const auto& [edge, use] : edge_use) {
        if (use.first == 1) {
            interior_index_[edge.first] = -1;
            interior_index_[edge.second] = -1;
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (interior_index_[v] < 0) {
            boundary_nodes_.push_back(v);
        } else {
            interior_index_[v] = static_cast<int>(interior_nodes_.size());
            interior_nodes_.push_back(v);
        }
    }
}

std::vector<std::array<int, 2>> Mesh::boundary_edges() const {
    std::map<Edge, int> count;
    for (const auto& tri : triangles_) {
        for (int k = 0; k < 3; ++k) ++count[make_edge(tri[k], tri[(k + 1) % 3])];
    }
    std::vector<std::array<int, 2>> out;
    for (const auto& tri : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            if (count[make_edge(a, b)] == 1) out.push_back({a, b});
        }
    }
    return out;
}

double Mesh::signed_area(std::size_t tri) const {
    const auto& t = triangles_[tri];
    const Point2 a = vertices_[t[0]];
    return 0.5 * cross(vertices_[t[1]] - a, vertices_[t[2]] - a);
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) sum += signed_area(t);
    return sum;
}

namespace {

class LineScanner {
public:
    LineScanner(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    bool at_end() {
        skip_space();
        return pos_ >= line_.size();
    }

    std::string_view token() {
        skip_space();
        if (pos_ >= line_.size()) throw ParseError(line_no_, pos_ + 1, "unexpected end of line");
        token_col_ = pos_ + 1;
        const std::size_t start = pos_;
        while (pos_ < line_.size() && !is_space(line_[pos_])) ++pos_;
        return line_.substr(start, pos_ - start);
    }

    double real() {
        const auto tok = token();
        double value = 0.0;
        try {
            value = parse_double(tok);
        } catch (const InputError&) {
            throw ParseError(line_no_, token_col_, "expected a number, got '" + std::string(tok) + "'");
        }
        if (!std::isfinite(value)) throw ParseError(line_no_, token_col_, "non-finite coordinate");
        return value;
    }

    long long integer() {
        const auto tok = token();
        long long value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ParseError(line_no_, token_col_, "expected an integer, got '" + std::string(tok) + "'");
        }
        return value;
    }

    void expect_end() {
        if (!at_end()) throw ParseError(line_no_, pos_ + 1, "unexpected trailing content");
    }

    std::size_t column() const { return token_col_; }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }
    void skip_space() {
        while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
    std::size_t token_col_ = 1;
};

}  // namespace

Mesh load_mesh(std::string_view text) {
    // Collect meaningful lines with their 1-based numbers; '#' starts a comment.
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) lines.emplace_back(line_no, line);
        if (end == text.size()) break;
        start = end + 1;
    }
    if (lines.empty()) throw ParseError(1, 1, "empty mesh file");

    std::size_t cursor = 0;
    long long nv = 0;
    long long nt = 0;
    {
        auto [no, line] = lines[cursor++];
        LineScanner scan(line, no);
        if (scan.token() != "mesh2") throw ParseError(no, scan.column(), "expected header 'mesh2'");
        nv = scan.integer();
        if (nv < 3) throw ParseError(no, scan.column(), "need at least 3 vertices");
        nt = scan.integer();
        if (nt < 1) throw ParseError(no, scan.column(), "need at least 1 triangle");
        scan.expect_end();
    }
    const std::size_t needed = static_cast<std::size_t>(nv + nt);
    if (lines.size() - cursor < needed) {
        const std::size_t last = lines.back().first;
        throw ParseError(last + 1, 1, "file ends early: expected " + std::to_string(needed) +
                                          " data lines, found " + std::to_string(lines.size() - cursor));
    }

    std::vector<Point2> vertices(static_cast<std::size_t>(nv));
    for (auto& p : vertices) {
        auto [no, line] = lines[cursor++];
        LineScanner scan(line, no);
        p.x = scan.real();
        p.y = scan.real();
        scan.expect_end();
    }
    std::vector<Triangle> triangles(static_cast<std::size_t>(nt));
    for (auto& tri : triangles) {
        auto [no, line] = lines[cursor++];
        LineScanner scan(line, no);
        for (int& v : tri) {
            const long long idx = scan.integer();
            if (idx < 0 || idx >= nv) throw ParseError(no, scan.column(), "vertex index out of range");
            v = static_cast<int>(idx);
        }
        scan.expect_end();
    }
    if (cursor != lines.size()) {
        throw ParseError(lines[cursor].first, 1, "unexpected extra data after the last triangle");
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh read_mesh_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MeshError("cannot open mesh file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_mesh(buf.str());
}

std::string format_mesh(const Mesh& mesh) {
    std::string out = "mesh2 " + std::to_string(mesh.n_vertices()) + " " + std::to_string(mesh.n_triangles()) + "\n";
    for (const auto& p : mesh.vertices()) {
        out += format_double(p.x);
        out += ' ';
        out += format_double(p.y);
        out += '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
    }
    return out;
}

void write_mesh_file(const std::filesystem::path& path, const Mesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MeshError("cannot write mesh file " + path.string());
    out << format_mesh(mesh);
}

MeshStats check_acute(const Mesh& mesh) {
    MeshStats stats;
    stats.min_angle = std::numeric_limits<double>::infinity();
    stats.max_angle = 0.0;
    const auto& v = mesh.vertices();
    for (const auto& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            const double angle = corner_angle(v[t[k]], v[t[(k + 1) % 3]], v[t[(k + 2) % 3]]);
            stats.min_angle = std::min(stats.min_angle, angle);
            stats.max_angle = std::max(stats.max_angle, angle);
        }
    }
    stats.is_strictly_acute = stats.max_angle < std::numbers::pi / 2 - kAngleTolerance;
    stats.n_vertices = mesh.n_vertices();
    stats.n_interior = mesh.n_interior();
    stats.n_triangles = mesh.n_triangles();
    return stats;
}

Mesh uniform_refine(const Mesh& mesh) {
    std::vector<Point2> vertices = mesh.vertices();
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
        auto [it, inserted] = midpoint.try_emplace(make_edge(a, b), static_cast<int>(vertices.size()));
        if (inserted) vertices.push_back(0.5 * (vertices[a] + vertices[b]));
        return it->second;
    };
    std::vector<Triangle> triangles;
    triangles.reserve(4 * mesh.n_triangles());
    for (const auto& t : mesh.triangles()) {
        const int m01 = mid(t[0], t[1]);
        const int m12 = mid(t[1], t[2]);
        const int m20 = mid(t[2], t[0]);
        triangles.push_back({t[0], m01, m20});
        triangles.push_back({m01, t[1], m12});
        triangles.push_back({m20, m12, t[2]});
        triangles.push_back({m01, m12, m20});
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh uniform_refine(const Mesh& mesh, int times) {
    Mesh out = mesh;
    for (int i = 0; i < times; ++i) out = uniform_refine(out);
    return out;
}

P1Geometry p1_geometry(const Mesh& mesh) {
    P1Geometry geom;
    const auto& v = mesh.vertices();
    const std::size_t nt = mesh.n_triangles();
    geom.elem_area.resize(nt);
    geom.elem_grad.resize(nt);
    geom.hat_mass.assign(mesh.n_vertices(), 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles()[t];
        const double area = mesh.signed_area(t);
        geom.elem_area[t] = area;
        // grad(lambda_k) = rot90(edge opposite k) / (2 area), edge taken counter-clockwise.
        for (int k = 0; k < 3; ++k) {
            const Point2 e = v[tri[(k + 2) % 3]] - v[tri[(k + 1) % 3]];
            geom.elem_grad[t][k] = {-e.y / (2.0 * area), e.x / (2.0 * area)};
            geom.hat_mass[tri[k]] += area / 3.0;
            geom.dx = std::max(geom.dx, norm(e));
        }
    }
    return geom;
}

}  // namespace hjb

#include "hjbfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <tuple>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"

namespace hjb {

std::shared_ptr<const SparsityPattern> interior_pattern(const Mesh& mesh) {
    std::vector<std::vector<int>> rows(mesh.n_interior());
    for (const auto& tri : mesh.triangles()) {
        for (int i : tri) {
            const int r = mesh.interior_index(i);
            if (r < 0) continue;
            rows[static_cast<std::size_t>(r)].insert(rows[static_cast<std::size_t>(r)].end(), tri.begin(), tri.end());
        }
    }
    return SparsityPattern::from_rows(std::move(rows), mesh.n_vertices(), mesh.interior_nodes());
}

Assembler::Assembler(const Mesh& mesh, const P1Geometry& geom, QuadratureRule quad)
    : mesh_(&mesh), geom_(&geom), quad_(std::move(quad)), pattern_(interior_pattern(mesh)) {
    slots_.resize(mesh.n_triangles());
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            const int r = mesh.interior_index(tri[i]);
            for (int j = 0; j < 3; ++j) {
                slots_[t][3 * i + j] = r < 0 ? -1 : pattern_->find(static_cast<std::size_t>(r), tri[j]);
            }
        }
    }
    const auto& v = mesh.vertices();
    quad_points_.reserve(mesh.n_triangles() * quad_.points.size());
    for (const auto& tri : mesh.triangles()) {
        for (const auto& lam : quad_.points) {
            quad_points_.push_back(lam[0] * v[tri[0]] + lam[1] * v[tri[1]] + lam[2] * v[tri[2]]);
        }
    }
}

namespace {

void normalize_rows(SparseMatrix& m, const Mesh& mesh, const P1Geometry& geom) {
    const auto offsets = m.row_offsets();
    auto values = m.values();
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        const double mass = geom.hat_mass[static_cast<std::size_t>(mesh.interior_nodes()[r])];
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) values[k] /= mass;
    }
}

}  // namespace

SparseMatrix Assembler::stiffness() const {
    SparseMatrix k(pattern_);
    auto values = k.values();
    for (std::size_t t = 0; t < mesh_->n_triangles(); ++t) {
        const double area = geom_->elem_area[t];
        const auto& grad = geom_->elem_grad[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const auto slot = slots_[t][3 * i + j];
                if (slot < 0) continue;
                values[static_cast<std::size_t>(slot)] += area * dot(grad[j], grad[i]);
            }
        }
    }
    normalize_rows(k, *mesh_, *geom_);
    return k;
}

SparseMatrix Assembler::advection_reaction(const std::function<std::pair<Point2, double>(Point2)>& coeff) const {
    std::vector<Point2> b(quad_points_.size());
    std::vector<double> c(quad_points_.size());
    for (std::size_t i = 0; i < quad_points_.size(); ++i) std::tie(b[i], c[i]) = coeff(quad_points_[i]);
    return advection_reaction(b, c);
}

SparseMatrix Assembler::advection_reaction(std::span<const Point2> b, std::span<const double> c) const {
    const std::size_t nq = quad_.points.size();
    if (b.size() != quad_points_.size() || c.size() != quad_points_.size()) {
        throw InputError("tabulated coefficients do not match the quadrature points");
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!std::isfinite(b[i].x) || !std::isfinite(b[i].y) || !std::isfinite(c[i])) {
            throw InputError("non-finite advection/reaction coefficient at (" + format_double(quad_points_[i].x) +
                             ", " + format_double(quad_points_[i].y) + ")");
        }
    }
    SparseMatrix b_hat(pattern_);
    auto values = b_hat.values();
    for (std::size_t t = 0; t < mesh_->n_triangles(); ++t) {
        const double area = geom_->elem_area[t];
        const auto& grad = geom_->elem_grad[t];
        const std::size_t base = t * nq;
        for (int i = 0; i < 3; ++i) {
            if (slots_[t][3 * i] < 0) continue;
            for (int j = 0; j < 3; ++j) {
                double sum = 0.0;
                for (std::size_t q = 0; q < nq; ++q) {
                    const auto& lam = quad_.points[q];
                    sum += quad_.weights[q] * (dot(b[base + q], grad[j]) + c[base + q] * lam[j]) * lam[i];
                }
                values[static_cast<std::size_t>(slots_[t][3 * i + j])] += area * sum;
            }
        }
    }
    normalize_rows(b_hat, *mesh_, *geom_);
    return b_hat;
}

std::vector<double> Assembler::source(const std::function<double(Point2)>& d) const {
    std::vector<double> dq(quad_points_.size());
    for (std::size_t i = 0; i < quad_points_.size(); ++i) dq[i] = d(quad_points_[i]);
    return source(dq);
}

std::vector<double> Assembler::source(std::span<const double> d) const {
    const std::size_t nq = quad_.points.size();
    if (d.size() != quad_points_.size()) throw InputError("tabulated source does not match the quadrature points");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i])) {
            throw InputError("non-finite source coefficient at (" + format_double(quad_points_[i].x) + ", " +
                             format_double(quad_points_[i].y) + ")");
        }
    }
    std::vector<double> out(mesh_->n_interior(), 0.0);
    for (std::size_t t = 0; t < mesh_->n_triangles(); ++t) {
        const auto& tri = mesh_->triangles()[t];
        for (int i = 0; i < 3; ++i) {
            const int r = mesh_->interior_index(tri[i]);
            if (r < 0) continue;
            double sum = 0.0;
            for (std::size_t q = 0; q < nq; ++q) sum += quad_.weights[q] * d[t * nq + q] * quad_.points[q][i];
            out[static_cast<std::size_t>(r)] += geom_->elem_area[t] * sum;
        }
    }
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] /= geom_->hat_mass[static_cast<std::size_t>(mesh_->interior_nodes()[r])];
    }
    return out;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const P1Geometry& geom) {
    return Assembler(mesh, geom).stiffness();
}

SparseMatrix assemble_advection_reaction(const Mesh& mesh, const P1Geometry& geom, const VectorField& b,
                                         const ScalarField& c, double t, const QuadratureRule& quad) {
    return Assembler(mesh, geom, quad).advection_reaction([&](Point2 x) { return std::pair{b(x, t), c(x, t)}; });
}

std::vector<double> assemble_source(const Mesh& mesh, const P1Geometry& geom, const ScalarField& d, double t,
                                    const QuadratureRule& quad) {
    return Assembler(mesh, geom, quad).source([&](Point2 x) { return d(x, t); });
}

std::vector<double> min_monotone_diffusion(const SparseMatrix& stiffness, const SparseMatrix& transport) {
    const auto& kp = stiffness.pattern();
    const auto& bp = transport.pattern();
    if (kp.n_rows != bp.n_rows) throw InputError("stiffness and transport row counts differ");
    std::vector<double> nu(kp.n_rows, 0.0);
    const auto kv = stiffness.values();
    const auto bv = transport.values();
    for (std::size_t r = 0; r < kp.n_rows; ++r) {
        const int self = bp.row_node[r];
        double best = 0.0;
        for (std::size_t k = bp.row_offsets[r]; k < bp.row_offsets[r + 1]; ++k) {
            const int col = bp.col_indices[k];
            if (col == self) continue;
            const double b = bv[k];
            if (!(b > 0.0)) continue;
            const double kk = &bp == &kp ? kv[k] : stiffness.coeff(r, col);
            if (kk >= -kFixTolerance) {
                if (b > kFixTolerance) throw UnfixableRowError(r, col, b, kk);
                continue;
            }
            best = std::max(best, b / -kk);
        }
        nu[r] = best;
    }
    return nu;
}

StabilizedOperator stabilized_operator(const SparseMatrix& stiffness, const SparseMatrix& transport,
                                       std::span<const double> a_nodal, std::span<const double> nu) {
    const std::size_t n = stiffness.n_rows();
    if (a_nodal.size() != n || nu.size() != n) throw InputError("diffusion arrays do not match the row count");
    const bool has_transport = transport.n_rows() > 0;
    if (has_transport && transport.n_rows() != n) throw InputError("transport row count does not match");
    StabilizedOperator out{SparseMatrix(stiffness.pattern_ptr()), {}};
    out.profile.a_physical.assign(a_nodal.begin(), a_nodal.end());
    out.profile.nu.assign(nu.begin(), nu.end());
    out.profile.a_eff.resize(n);
    const auto& kp = stiffness.pattern();
    const auto kv = stiffness.values();
    auto sv = out.matrix.values();
    for (std::size_t r = 0; r < n; ++r) {
        if (a_nodal[r] < 0.0) throw InputError("negative physical diffusion at row " + std::to_string(r));
        if (nu[r] < 0.0) throw InputError("negative artificial diffusion at row " + std::to_string(r));
        const double a_eff = std::max(a_nodal[r], nu[r]);
        out.profile.a_eff[r] = a_eff;
        for (std::size_t k = kp.row_offsets[r]; k < kp.row_offsets[r + 1]; ++k) sv[k] = a_eff * kv[k];
    }
    if (!has_transport) return out;
    if (transport.pattern_ptr() == stiffness.pattern_ptr()) {
        const auto bv = transport.values();
        for (std::size_t k = 0; k < sv.size(); ++k) sv[k] += bv[k];
        return out;
    }
    const auto& bp = transport.pattern();
    const auto bv = transport.values();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = bp.row_offsets[r]; k < bp.row_offsets[r + 1]; ++k) {
            if (bv[k] == 0.0) continue;
            const auto slot = kp.find(r, bp.col_indices[k]);
            if (slot < 0) throw InputError("transport entry outside the stiffness pattern");
            sv[static_cast<std::size_t>(slot)] += bv[k];
        }
    }
    return out;
}

void write_diffusion_csv(std::ostream& out, const Mesh& mesh, const DiffusionProfile& profile) {
    out << "node,x,y,a_physical,nu,a_eff,activated\n";
    for (std::size_t r = 0; r < mesh.n_interior(); ++r) {
        const int node = mesh.interior_nodes()[r];
        const Point2 p = mesh.vertices()[static_cast<std::size_t>(node)];
        out << node << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
            << format_double(profile.a_physical[r]) << ',' << format_double(profile.nu[r]) << ','
            << format_double(profile.a_eff[r]) << ',' << (profile.activated(r) ? 1 : 0) << '\n';
    }
}

}  // namespace hjb

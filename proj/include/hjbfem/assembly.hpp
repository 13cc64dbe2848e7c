#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "hjbfem/mesh.hpp"
#include "hjbfem/quadrature.hpp"
#include "hjbfem/sparse.hpp"

namespace hjb {

using ScalarField = std::function<double(Point2, double)>;
using VectorField = std::function<Point2(Point2, double)>;

/// Distinguishes true zeros of the acute stiffness pattern from rounding noise.
inline constexpr double kFixTolerance = 1e-13;

/// Artificial diffusion attached to each row (interior node).
struct DiffusionProfile {
    std::vector<double> a_physical;
    std::vector<double> nu;
    /// max(a_physical, nu) per row.
    std::vector<double> a_eff;

    bool activated(std::size_t row) const { return a_eff[row] > a_physical[row] + 1e-14; }
};

/// Rows are interior nodes in interior-index order, columns are all mesh
/// vertices. Row r's own vertex is `mesh.interior_nodes()[r]`.
std::shared_ptr<const SparsityPattern> interior_pattern(const Mesh& mesh);

/// Assembles the L1-normalized P1 operators on a fixed mesh. Keeps the slot
/// map from element-local entries to CSR positions so repeated assemblies
/// (per control, per time step) skip the column searches. Entries of a row are
/// accumulated in element order, which makes results bit-reproducible.
class Assembler {
public:
    Assembler(const Mesh& mesh, const P1Geometry& geom, QuadratureRule quad = QuadratureRule::edge_midpoint());

    const Mesh& mesh() const noexcept { return *mesh_; }
    const P1Geometry& geometry() const noexcept { return *geom_; }
    const QuadratureRule& quadrature() const noexcept { return quad_; }
    const std::shared_ptr<const SparsityPattern>& pattern() const noexcept { return pattern_; }

    /// (K)_{lm} = <grad phi_m, grad phi_l> / |phi_l|_1
    SparseMatrix stiffness() const;

    /// (B)_{lm} = <b . grad phi_m + c phi_m, phi_l> / |phi_l|_1 with b, c from
    /// `coeff(x)` at the quadrature points. Throws InputError on non-finite values.
    SparseMatrix advection_reaction(const std::function<std::pair<Point2, double>(Point2)>& coeff) const;

    /// Same, with b and c already tabulated at `quad_points()` order.
    SparseMatrix advection_reaction(std::span<const Point2> b, std::span<const double> c) const;

    /// (d)_l = <d, phi_l> / |phi_l|_1
    std::vector<double> source(const std::function<double(Point2)>& d) const;
    std::vector<double> source(std::span<const double> d) const;

    /// All quadrature points, element-major.
    const std::vector<Point2>& quad_points() const noexcept { return quad_points_; }

private:
    const Mesh* mesh_;
    const P1Geometry* geom_;
    QuadratureRule quad_;
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<std::array<std::ptrdiff_t, 9>> slots_;  // -1 for boundary rows
    std::vector<Point2> quad_points_;
};

SparseMatrix assemble_stiffness(const Mesh& mesh, const P1Geometry& geom);

SparseMatrix assemble_advection_reaction(const Mesh& mesh, const P1Geometry& geom, const VectorField& b,
                                         const ScalarField& c, double t,
                                         const QuadratureRule& quad = QuadratureRule::edge_midpoint());

std::vector<double> assemble_source(const Mesh& mesh, const P1Geometry& geom, const ScalarField& d, double t,
                                    const QuadratureRule& quad = QuadratureRule::edge_midpoint());

/// Smallest nu_l >= 0 per row with nu_l K_lm + B_lm <= 0 for every off-diagonal m.
/// Throws UnfixableRowError when B_lm > kFixTolerance but K_lm >= -kFixTolerance.
std::vector<double> min_monotone_diffusion(const SparseMatrix& stiffness, const SparseMatrix& transport);

struct StabilizedOperator {
    SparseMatrix matrix;
    DiffusionProfile profile;
};

/// Row l of the result is max(a_nodal[l], nu[l]) * K_l + B_l. `transport` may
/// be empty (default-constructed), meaning B = 0.
StabilizedOperator stabilized_operator(const SparseMatrix& stiffness, const SparseMatrix& transport,
                                       std::span<const double> a_nodal, std::span<const double> nu);

/// CSV `node,x,y,a_physical,nu,a_eff,activated`, one line per interior node.
void write_diffusion_csv(std::ostream& out, const Mesh& mesh, const DiffusionProfile& profile);

}  // namespace hjb

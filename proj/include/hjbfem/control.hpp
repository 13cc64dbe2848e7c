#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hjbfem/assembly.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/quadrature.hpp"
#include "hjbfem/sparse.hpp"

namespace hjb {

/// One element of the discretized control set. Benchmarks parameterize the
/// coefficients by an advection direction and/or a diffusion level.
struct Control {
    std::string label;
    Point2 direction{};
    double diffusion = 0.0;
    /// Position of `diffusion` in the list it was drawn from (-1 if none).
    int diffusion_index = -1;
};

/// Finite, ordered, non-empty control list. Order is significant: ties in the
/// componentwise maximum are resolved toward the smaller index.
class ControlSet {
public:
    explicit ControlSet(std::vector<Control> controls);

    std::size_t size() const noexcept { return controls_.size(); }
    const Control& operator[](std::size_t i) const { return controls_[i]; }
    auto begin() const noexcept { return controls_.begin(); }
    auto end() const noexcept { return controls_.end(); }

private:
    std::vector<Control> controls_;
};

/// beta_j = (cos(2 pi j / n), sin(2 pi j / n)), j = 0..n-1; requires n >= 3.
ControlSet unit_circle_controls(int n);

/// Diffusion levels in the given order; must be non-negative and distinct.
ControlSet diffusion_controls(const std::vector<double>& levels);

/// {a0, a1}; requires 0 <= a0 < a1.
ControlSet bang_bang_controls(double a0, double a1);

/// Diffusion-major, direction-minor product of two control sets.
ControlSet product_controls(const ControlSet& diffusion, const ControlSet& directions);

struct Coefficients {
    double a = 0.0;
    Point2 b{};
    double c = 0.0;
    double d = 0.0;
};

/// -v_t + sup_alpha (-a^alpha Lap v + b^alpha . grad v + c^alpha v - d^alpha) = 0,
/// v = g on the boundary, v = v_T at t = T.
struct HJBProblem {
    ControlSet controls;
    std::function<Coefficients(const Control&, Point2, double)> coeff;
    std::function<double(Point2, double)> boundary;
    std::function<double(Point2)> final_value;
    double horizon = 1.0;
    /// False when no coefficient depends on t, so operators can be built once.
    bool time_dependent = true;
};

enum class DiffusionMode {
    /// Minimal nu per node and control.
    local,
    /// One constant for all nodes and controls: the largest local value.
    global,
};

struct SplittingPolicy {
    DiffusionMode explicit_mode = DiffusionMode::local;
    /// Lower bound on the implicit diffusion (nu double-bar); 0 in all benchmarks.
    double implicit_nu_floor = 0.0;
    QuadratureRule quadrature = QuadratureRule::edge_midpoint();
};

struct ControlOperators {
    SparseMatrix explicit_op;
    SparseMatrix implicit_op;
    std::vector<double> source;
    /// Physical diffusion a^alpha at the row nodes (implicit time level).
    std::vector<double> a_physical;
    DiffusionProfile explicit_profile;
    DiffusionProfile implicit_profile;
};

struct SplitOperators {
    std::vector<ControlOperators> controls;
    std::vector<std::string> warnings;

    std::size_t n_rows() const { return controls.front().explicit_op.n_rows(); }
    std::size_t n_cols() const { return controls.front().explicit_op.n_cols(); }
    const SparsityPattern& pattern() const { return controls.front().explicit_op.pattern(); }

    /// Wraps ready-made matrices (tests, small hand-built systems). All matrices
    /// must have the same shape; profiles are left empty.
    static SplitOperators from_matrices(std::vector<SparseMatrix> explicit_ops, std::vector<SparseMatrix> implicit_ops,
                                        std::vector<std::vector<double>> sources);
};

/// Builds the per-control stabilized operators on one mesh, reusing the
/// stiffness matrix and CSR layout across calls.
class OperatorBuilder {
public:
    OperatorBuilder(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                    SplittingPolicy policy = {});

    /// Explicit pieces (advection, reaction, source) at t_expl, physical
    /// diffusion at t_impl.
    SplitOperators build(double t_expl, double t_impl) const;

    const SparseMatrix& stiffness() const noexcept { return stiffness_; }
    const Assembler& assembler() const noexcept { return assembler_; }

private:
    const HJBProblem* problem_;
    const Mesh* mesh_;
    SplittingPolicy policy_;
    Assembler assembler_;
    SparseMatrix stiffness_;
};

SplitOperators build_split_operators(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                                     double t_expl, double t_impl, const SplittingPolicy& policy = {});

/// Per node: nu = largest explicit nu over controls, a_physical = smallest
/// physical diffusion over controls, a_eff = max of the two.
DiffusionProfile aggregate_profile(const SplitOperators& ops);

}  // namespace hjb

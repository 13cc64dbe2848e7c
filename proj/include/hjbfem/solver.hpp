#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hjbfem/control.hpp"
#include "hjbfem/sparse.hpp"

namespace hjb {

struct LinearConfig {
    /// Relative residual target ||rhs - A x||_2 <= tol ||rhs||_2.
    double tol = 1e-10;
    int restart = 30;
    /// Cap on the total number of Krylov iterations.
    int max_iter = 2000;
    /// Right preconditioning with the inverse diagonal.
    bool jacobi = false;
};

struct LinearResult {
    std::vector<double> x;
    /// Achieved relative residual, computed explicitly from the returned x.
    double residual = 0.0;
    int iterations = 0;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations. The true
/// residual is re-evaluated at the end of every cycle; convergence is only
/// declared on that explicit value. Throws ConvergenceError after max_iter.
LinearResult gmres(const SparseMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                   const LinearConfig& cfg = {});

struct NewtonConfig {
    /// Max-norm residual relative to the residual at the initial guess, floored
    /// at the rounding level of the terms in F.
    double rel_res_tol = 5e-8;
    /// Max-norm of the change between successive iterates.
    double inc_tol = 5e-9;
    int max_iter = 50;
};

struct NewtonStats {
    std::vector<int> iters_per_step;
    double mean = 0.0;
    /// Population standard deviation.
    double std = 0.0;
    std::size_t n_systems = 0;

    static NewtonStats from_counts(std::vector<int> counts, std::size_t n_systems);
};

/// Callbacks for inspection; all optional.
struct NewtonHooks {
    std::function<void(std::span<const int> policy)> on_policy;
    std::function<void(const SparseMatrix& a, std::span<const double> rhs, const LinearResult& result)> on_linear_solve;
};

/// q^alpha = S_E^alpha v_next - C^alpha, one vector per control.
std::vector<std::vector<double>> explicit_terms(const SplitOperators& ops, std::span<const double> v_next);

/// Per row, argmax over controls of [S_I^alpha v + q^alpha]_row; ties keep the
/// smaller control index.
std::vector<int> policy(std::span<const double> v, const SplitOperators& ops,
                        const std::vector<std::vector<double>>& q_expl);

/// F_l(v) = (v_l - v_next_l) / h + max_alpha [S_I^alpha v + q^alpha]_l for each row.
std::vector<double> bellman_residual(std::span<const double> v, std::span<const double> v_next,
                                     const SplitOperators& ops, const std::vector<std::vector<double>>& q_expl,
                                     double h);

struct NewtonResult {
    /// Number of policy updates, each followed by one linear solve.
    int iterations = 0;
    /// Final max-norm residual.
    double residual = 0.0;
    double initial_residual = 0.0;
    std::vector<int> policy;
};

/// Policy iteration for F(v) = 0.
///
/// `v_next` holds all node values at the later time level. `v` holds all node
/// values at the current level: its boundary entries must already carry the
/// boundary data; its interior entries are overwritten, first with the initial
/// guess v_next and on return with the solution.
NewtonResult newton_solve(std::span<const double> v_next, std::span<double> v, const SplitOperators& ops, double h,
                          const NewtonConfig& cfg = {}, const LinearConfig& lin_cfg = {},
                          const NewtonHooks* hooks = nullptr);

}  // namespace hjb

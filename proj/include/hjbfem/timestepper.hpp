#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hjbfem/control.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/solver.hpp"

namespace hjb {

enum class StepLaw { linear, quadratic };

/// Uniform grid s_k = k h, k = 0..n_steps, with n_steps h = T.
struct TimeGrid {
    double horizon = 0.0;
    double step = 0.0;
    int n_steps = 0;

    double time(int k) const { return k == n_steps ? horizon : k * step; }
};

/// h = ratio dx (linear) or ratio dx^2 (quadratic), shrunk so that T / h is an integer.
TimeGrid make_time_grid(double horizon, double dx, double ratio, StepLaw law);

/// Grid with the largest step <= h that divides T.
TimeGrid time_grid_for_step(double horizon, double h);

/// 1 / max_{alpha, l} diag(S_E^alpha); +infinity if no diagonal is positive.
double cfl_max_step(const SplitOperators& ops);

struct Snapshot {
    double t = 0.0;
    /// One value per mesh vertex, boundary included.
    std::vector<double> values;
};

/// Largest entrywise violation of the monotonicity structure: how far
/// (Id - h S_E) falls below 0 and how far off-diagonals of S_I rise above 0.
struct MonotonicityReport {
    double explicit_min_entry = 0.0;
    double implicit_max_offdiag = 0.0;
};
MonotonicityReport check_monotonicity(const SplitOperators& ops, double h);

struct StepInfo {
    int step = 0;
    /// Time level solved for (s^k); the known level is t + h.
    double t = 0.0;
    double h = 0.0;
    const SplitOperators* ops = nullptr;
    const NewtonResult* newton = nullptr;
    std::span<const double> values;
};

struct SolveOptions {
    SplittingPolicy splitting;
    NewtonConfig newton;
    LinearConfig linear;
    NewtonHooks hooks;
    /// Called after each completed step.
    std::function<void(const StepInfo&)> on_step;
    /// Keep the aggregated diffusion profile of every operator build, not just the first.
    bool record_profiles = false;
};

struct SolveResult {
    Snapshot initial;  // v(0, .)
    NewtonStats newton;
    /// Aggregated diffusion profiles; the first entry belongs to the first step (t = T).
    std::vector<DiffusionProfile> profiles;
    /// Policy of the final Newton iterate at t = 0.
    std::vector<int> final_policy;
    /// Smallest CFL bound met during the run.
    double min_cfl_step = 0.0;
    std::vector<std::string> warnings;
};

/// Nodal interpolation of v_T, then k = n_steps-1 .. 0: boundary nodes take
/// g(., s^k), interior nodes solve the Bellman system by policy iteration.
/// Throws CflError when h exceeds the explicit bound at any step.
SolveResult backward_solve(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom, const TimeGrid& grid,
                           const SolveOptions& options = {});

/// Dry run: safety times the smallest CFL bound over sampled time levels.
double auto_time_step(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                      const SplittingPolicy& splitting = {}, double safety = 0.9);

/// CSV `node,x,y,value`.
void write_snapshot_csv(std::ostream& out, const Mesh& mesh, const Snapshot& snap);

/// Legacy VTK 3.0 ASCII, UNSTRUCTURED_GRID with point scalar `v`.
void write_vtk(std::ostream& out, const Mesh& mesh, const Snapshot& snap);

}  // namespace hjb

#include "hjbfem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"
#include "hjbfem/parallel.hpp"

namespace hjb {

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

LinearResult gmres(const SparseMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                   const LinearConfig& cfg) {
    const std::size_t n = a.n_rows();
    if (a.n_cols() != n) throw InputError("GMRES needs a square matrix");
    if (rhs.size() != n) throw InputError("GMRES right-hand side has the wrong size");
    if (!x0.empty() && x0.size() != n) throw InputError("GMRES initial guess has the wrong size");
    if (!(cfg.tol > 0.0) || cfg.restart < 1 || cfg.max_iter < 0) throw InputError("invalid GMRES configuration");

    LinearResult res;
    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        return res;
    }
    res.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());

    std::vector<double> inv_diag;
    if (cfg.jacobi) {
        inv_diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a.diagonal(i);
            if (d == 0.0) throw InputError("Jacobi preconditioner needs a non-zero diagonal");
            inv_diag[i] = 1.0 / d;
        }
    }
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag.empty() ? in[i] : inv_diag[i] * in[i];
    };

    const double target = cfg.tol * bnorm;
    std::vector<double> r(n);
    auto true_residual = [&] {
        a.multiply(res.x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
        return norm2(r);
    };
    double beta = true_residual();
    const std::size_t m = static_cast<std::size_t>(cfg.restart);
    std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> hess(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1), y(m), z(n), w(n);

    while (beta > target) {
        if (res.iterations >= cfg.max_iter) {
            throw ConvergenceError("GMRES did not reach relative residual " + format_double(cfg.tol) + " in " +
                                       std::to_string(cfg.max_iter) + " iterations (best " +
                                       format_double(beta / bnorm) + ")",
                                   beta / bnorm);
        }
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        std::size_t k = 0;
        while (k < m && res.iterations < cfg.max_iter) {
            precondition(basis[k], z);
            a.multiply(z, w);
            for (std::size_t i = 0; i <= k; ++i) {
                hess[i][k] = dot(w, basis[i]);
                for (std::size_t j = 0; j < n; ++j) w[j] -= hess[i][k] * basis[i][j];
            }
            const double h_next = norm2(w);
            if (h_next > 0.0) {
                for (std::size_t j = 0; j < n; ++j) basis[k + 1][j] = w[j] / h_next;
            }
            for (std::size_t i = 0; i < k; ++i) {
                const double t = cs[i] * hess[i][k] + sn[i] * hess[i + 1][k];
                hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
                hess[i][k] = t;
            }
            const double denom = std::hypot(hess[k][k], h_next);
            cs[k] = hess[k][k] / denom;
            sn[k] = h_next / denom;
            hess[k][k] = denom;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++res.iterations;
            ++k;
            if (std::abs(g[k]) <= target || h_next == 0.0) break;
        }
        for (std::size_t i = k; i-- > 0;) {
            double s = g[i];
            for (std::size_t j = i + 1; j < k; ++j) s -= hess[i][j] * y[j];
            y[i] = s / hess[i][i];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < n; ++j) w[j] += y[i] * basis[i][j];
        }
        precondition(w, z);
        for (std::size_t j = 0; j < n; ++j) res.x[j] += z[j];
        beta = true_residual();
    }
    res.residual = beta / bnorm;
    return res;
}

NewtonStats NewtonStats::from_counts(std::vector<int> counts, std::size_t n_systems) {
    NewtonStats s;
    s.iters_per_step = std::move(counts);
    s.n_systems = n_systems;
    if (s.iters_per_step.empty()) return s;
    const double n = static_cast<double>(s.iters_per_step.size());
    s.mean = std::accumulate(s.iters_per_step.begin(), s.iters_per_step.end(), 0.0) / n;
    double var = 0.0;
    for (int c : s.iters_per_step) var += (c - s.mean) * (c - s.mean);
    s.std = std::sqrt(var / n);
    return s;
}

std::vector<std::vector<double>> explicit_terms(const SplitOperators& ops, std::span<const double> v_next) {
    if (v_next.size() != ops.n_cols()) throw InputError("explicit_terms: vector size does not match the operators");
    std::vector<std::vector<double>> q(ops.controls.size());
    parallel_for(ops.controls.size(), [&](std::size_t i) {
        const auto& c = ops.controls[i];
        q[i] = c.explicit_op * v_next;
        for (std::size_t r = 0; r < q[i].size(); ++r) q[i][r] -= c.source[r];
    });
    return q;
}

namespace {

// Row-wise max over controls of [S_I v + q]; writes value and argmax.
void evaluate_hamiltonian(std::span<const double> v, const SplitOperators& ops,
                          const std::vector<std::vector<double>>& q, std::span<double> value, std::span<int> arg) {
    const std::size_t rows = ops.n_rows();
    const std::size_t nc = ops.controls.size();
    if (q.size() != nc) throw InputError("one explicit term per control expected");
    const unsigned workers = std::max(1u, thread_count());
    const std::size_t chunk = (rows + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(rows, lo + chunk);
        for (std::size_t r = lo; r < hi; ++r) {
            double best = -std::numeric_limits<double>::infinity();
            int best_i = 0;
            for (std::size_t i = 0; i < nc; ++i) {
                const double val = ops.controls[i].implicit_op.row_dot(r, v) + q[i][r];
                if (val > best) {
                    best = val;
                    best_i = static_cast<int>(i);
                }
            }
            value[r] = best;
            arg[r] = best_i;
        }
    });
}

}  // namespace

std::vector<int> policy(std::span<const double> v, const SplitOperators& ops,
                        const std::vector<std::vector<double>>& q_expl) {
    std::vector<double> value(ops.n_rows());
    std::vector<int> arg(ops.n_rows());
    evaluate_hamiltonian(v, ops, q_expl, value, arg);
    return arg;
}

std::vector<double> bellman_residual(std::span<const double> v, std::span<const double> v_next,
                                     const SplitOperators& ops, const std::vector<std::vector<double>>& q_expl,
                                     double h) {
    std::vector<double> value(ops.n_rows());
    std::vector<int> arg(ops.n_rows());
    evaluate_hamiltonian(v, ops, q_expl, value, arg);
    const auto& nodes = ops.pattern().row_node;
    for (std::size_t r = 0; r < value.size(); ++r) {
        const auto node = static_cast<std::size_t>(nodes[r]);
        value[r] += (v[node] - v_next[node]) / h;
    }
    return value;
}

NewtonResult newton_solve(std::span<const double> v_next, std::span<double> v, const SplitOperators& ops, double h,
                          const NewtonConfig& cfg, const LinearConfig& lin_cfg, const NewtonHooks* hooks) {
    if (!(h > 0.0)) throw InputError("time step must be positive");
    if (!(cfg.rel_res_tol > 0.0) || !(cfg.inc_tol > 0.0) || cfg.max_iter < 1) {
        throw InputError("invalid Newton configuration");
    }
    const std::size_t rows = ops.n_rows();
    const std::size_t cols = ops.n_cols();
    if (v_next.size() != cols || v.size() != cols) throw InputError("newton_solve: vector size mismatch");
    const auto& row_node = ops.pattern().row_node;

    std::vector<int> col_to_row(cols, -1);
    for (std::size_t r = 0; r < rows; ++r) col_to_row[static_cast<std::size_t>(row_node[r])] = static_cast<int>(r);

    // Square layout over the interior unknowns: union of the implicit patterns
    // restricted to interior columns, plus the diagonal.
    std::map<const SparsityPattern*, std::vector<std::ptrdiff_t>> slot_maps;
    std::shared_ptr<const SparsityPattern> square;
    {
        std::vector<std::vector<int>> sq_rows(rows);
        for (std::size_t r = 0; r < rows; ++r) sq_rows[r].push_back(static_cast<int>(r));
        for (const auto& c : ops.controls) {
            const auto& p = c.implicit_op.pattern();
            if (slot_maps.count(&p)) continue;
            slot_maps[&p];
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t k = p.row_offsets[r]; k < p.row_offsets[r + 1]; ++k) {
                    const int sc = col_to_row[static_cast<std::size_t>(p.col_indices[k])];
                    if (sc >= 0) sq_rows[r].push_back(sc);
                }
            }
        }
        square = SparsityPattern::from_rows(std::move(sq_rows), rows, {});
        for (auto& [p, map] : slot_maps) {
            map.resize(p->col_indices.size());
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t k = p->row_offsets[r]; k < p->row_offsets[r + 1]; ++k) {
                    const int sc = col_to_row[static_cast<std::size_t>(p->col_indices[k])];
                    map[k] = sc < 0 ? -1 : square->find(r, sc);
                }
            }
        }
    }

    for (std::size_t r = 0; r < rows; ++r) {
        const auto node = static_cast<std::size_t>(row_node[r]);
        v[node] = v_next[node];
    }
    const auto q = explicit_terms(ops, v_next);

    std::vector<double> residual(rows);
    std::vector<int> pol(rows);
    auto evaluate = [&] {
        evaluate_hamiltonian(v, ops, q, residual, pol);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto node = static_cast<std::size_t>(row_node[r]);
            residual[r] += (v[node] - v_next[node]) / h;
        }
        return max_abs(residual);
    };

    NewtonResult out;
    out.initial_residual = evaluate();
    const double reference = std::max(out.initial_residual, 1e-300);
    // Residuals cannot drop below the rounding level of the largest term in F.
    double scale = max_abs(v_next) / h;
    for (const auto& qa : q) scale = std::max(scale, max_abs(qa));
    const double target = std::max(cfg.rel_res_tol * reference, 64.0 * std::numeric_limits<double>::epsilon() * scale);

    // Each step solves for the correction: M(pol) dv = -F(v), where F is the
    // residual of the frozen policy at the current iterate.
    SparseMatrix system(square);
    std::vector<double> rhs(rows);
    const std::vector<double> zero(rows, 0.0);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        if (hooks && hooks->on_policy) hooks->on_policy(pol);
        auto values = system.values();
        std::fill(values.begin(), values.end(), 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& ctl = ops.controls[static_cast<std::size_t>(pol[r])];
            const auto& p = ctl.implicit_op.pattern();
            const auto& map = slot_maps.at(&p);
            const auto sv = ctl.implicit_op.values();
            values[static_cast<std::size_t>(square->diag_slot[r])] += 1.0 / h;
            for (std::size_t k = p.row_offsets[r]; k < p.row_offsets[r + 1]; ++k) {
                if (map[k] >= 0) values[static_cast<std::size_t>(map[k])] += sv[k];
            }
            rhs[r] = -residual[r];
        }
        LinearResult lin = gmres(system, rhs, zero, lin_cfg);
        if (hooks && hooks->on_linear_solve) hooks->on_linear_solve(system, rhs, lin);

        double increment = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const auto node = static_cast<std::size_t>(row_node[r]);
            increment = std::max(increment, std::abs(lin.x[r]));
            v[node] += lin.x[r];
        }
        out.residual = evaluate();
        out.iterations = it;
        if (out.residual <= target && increment <= cfg.inc_tol) {
            out.policy = pol;
            return out;
        }
    }
    throw ConvergenceError("Newton iteration did not converge in " + std::to_string(cfg.max_iter) +
                               " iterations (residual " + format_double(out.residual) + ")",
                           out.residual);
}

}  // namespace hjb

#include "ddspde/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ddspde {

StepperConfig::StepperConfig(PartitionOfUnity partition,
                             std::vector<int> K_per_subdomain, double solver_tol,
                             int solver_max_iter)
    : partition_(std::move(partition)),
      K_per_subdomain_(std::move(K_per_subdomain)),
      solver_tol_(solver_tol),
      solver_max_iter_(solver_max_iter) {
    const int s = partition_.subdomains();
    if (static_cast<int>(K_per_subdomain_.size()) != s) {
        throw std::invalid_argument(
            "StepperConfig: need one K per subdomain, got " +
            std::to_string(K_per_subdomain_.size()) + " for s = " + std::to_string(s));
    }
    for (int K : K_per_subdomain_) {
        if (K < 1) throw std::invalid_argument("StepperConfig: K_l must be >= 1");
        K_max_ = std::max(K_max_, K);
    }
    if (!(solver_tol_ > 0.0)) {
        throw std::invalid_argument("StepperConfig: solver_tol must be > 0");
    }
    const int n = partition_.grid().n_interior;
    if (solver_max_iter_ <= 0) solver_max_iter_ = 10 * n * n;

    ops_.reserve(s);
    for (int l = 0; l < s; ++l) {
        ops_.push_back(assemble_weighted_diffusion(partition_.grid(),
                                                   partition_.chi(l), 1.0));
    }
}

ScalarField solve_spd(const WeightedDiffusionOperator& op, double h,
                      const ScalarField& rhs, double tol, int max_iter) {
    if (h < 0.0) {
        throw std::invalid_argument("solve_spd: h must be >= 0, got " +
                                    std::to_string(h));
    }
    if (rhs.grid() != op.grid()) {
        throw std::invalid_argument("solve_spd: grid mismatch");
    }
    if (!all_finite(rhs.values())) {
        throw std::invalid_argument("solve_spd: rhs contains non-finite values");
    }

    ScalarField x = rhs;  // identity outside the active window
    const auto [lo, hi] = op.active_columns();
    if (h == 0.0 || lo == hi) return x;

    const int n = op.grid().n_interior;
    if (max_iter <= 0) max_iter = 10 * n * n;
    const std::size_t w = static_cast<std::size_t>(hi - lo) * n;
    const std::size_t off = static_cast<std::size_t>(lo) * n;

    // (I + h Op) restricted to the window; couplings out of the window
    // carry zero weight by construction of the window.
    const double c = h * op.alpha_scale() / (op.grid().spacing * op.grid().spacing);
    auto apply_window = [&](std::span<const double> v, std::span<double> out) {
        for (int i1 = lo; i1 < hi; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
                const std::size_t id = static_cast<std::size_t>(i1 - lo) * n + i2;
                const double vc = v[id];
                const double left = i1 > lo ? v[id - n] : 0.0;
                const double right = i1 + 1 < hi ? v[id + n] : 0.0;
                const double down = i2 > 0 ? v[id - 1] : 0.0;
                const double up = i2 + 1 < n ? v[id + 1] : 0.0;
                out[id] = vc + c * (op.edge_weight_x(i1, i2) * (vc - left) +
                                    op.edge_weight_x(i1 + 1, i2) * (vc - right) +
                                    op.edge_weight_y(i1, i2) * (vc - down) +
                                    op.edge_weight_y(i1, i2 + 1) * (vc - up));
            }
        }
    };

    const double rhs_norm = norm_l2(rhs.values());
    if (rhs_norm == 0.0) {
        std::fill_n(x.values().begin() + off, w, 0.0);
        return x;
    }
    const double target = tol * rhs_norm;

    std::vector<double> sol(w, 0.0), r(w), z(w), p(w), q(w), inv_diag(w);
    for (int i1 = lo; i1 < hi; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            inv_diag[static_cast<std::size_t>(i1 - lo) * n + i2] =
                1.0 / (1.0 + h * op.diagonal(i1, i2));
        }
    }
    std::copy_n(rhs.values().begin() + off, w, r.begin());

    double rr = 0.0;
    for (std::size_t i = 0; i < w; ++i) rr += r[i] * r[i];
    if (std::sqrt(rr) <= target) {
        std::copy_n(sol.begin(), w, x.values().begin() + off);
        return x;
    }

    for (std::size_t i = 0; i < w; ++i) p[i] = z[i] = inv_diag[i] * r[i];
    double rz = 0.0;
    for (std::size_t i = 0; i < w; ++i) rz += r[i] * z[i];

    int iter = 0;
    double res = std::sqrt(rr);
    for (; iter < max_iter; ++iter) {
        apply_window(p, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < w; ++i) pq += p[i] * q[i];
        if (!(pq > 0.0)) {
            throw SolverError("solve_spd: conjugate gradient breakdown, <p, Ap> = " +
                              std::to_string(pq));
        }
        const double step = rz / pq;
        rr = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            sol[i] += step * p[i];
            r[i] -= step * q[i];
            rr += r[i] * r[i];
        }
        res = std::sqrt(rr);
        if (res <= target) break;
        double rz_next = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < w; ++i) p[i] = z[i] + beta * p[i];
    }
    if (res > target) {
        throw SolverError("solve_spd: no convergence within " +
                          std::to_string(max_iter) + " iterations, residual " +
                          std::to_string(res) + " > " + std::to_string(target));
    }
    std::copy_n(sol.begin(), w, x.values().begin() + off);
    return x;
}

ScalarField lie_step(const StepperConfig& cfg, const ProblemSpec& prob,
                     const ScalarField& U_prev, double t_prev, double h,
                     const NoisePath& path, int n) {
    const Grid2D& grid = cfg.partition().grid();
    if (U_prev.grid() != grid) {
        throw std::invalid_argument("lie_step: state grid does not match partition");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("lie_step: h must be > 0");
    }
    if (!all_finite(U_prev.values())) {
        throw std::invalid_argument("lie_step: U_prev contains non-finite values");
    }

    const double t_next = t_prev + h;
    const double alpha_n = prob.alpha(t_next);
    if (!(alpha_n >= 0.0) || !std::isfinite(alpha_n)) {
        throw std::invalid_argument("lie_step: alpha(" + std::to_string(t_next) +
                                    ") = " + std::to_string(alpha_n) +
                                    " must be finite and >= 0");
    }

    // Per-step fields shared by all substeps: the diffusion factor frozen
    // at the start-of-step state and the truncated noise increments.
    ScalarField b_start(grid);
    for (int i1 = 0; i1 < grid.n_interior; ++i1) {
        for (int i2 = 0; i2 < grid.n_interior; ++i2) {
            b_start.at(i1, i2) = prob.b_tilde(t_prev, grid.coord(i1), grid.coord(i2),
                                              U_prev.at(i1, i2));
        }
    }
    std::map<int, ScalarField> increments;
    for (int l = 0; l < cfg.subdomains(); ++l) {
        const int K = cfg.truncation(l);
        if (!increments.contains(K)) increments.emplace(K, path.increment_field(n, K));
    }

    ScalarField U = U_prev;
    for (int l = 0; l < cfg.subdomains(); ++l) {
        const ScalarField& chi = cfg.partition().chi(l);
        const ScalarField& dW = increments.at(cfg.truncation(l));
        ScalarField rhs = U;
        const auto [lo, hi] = cfg.partition().support(l);
        for (int i1 = std::max(lo, 0); i1 <= hi; ++i1) {
            const double x1 = grid.coord(i1);
            for (int i2 = 0; i2 < grid.n_interior; ++i2) {
                const double weight = chi.at(i1, i2);
                if (weight == 0.0) continue;
                const double x2 = grid.coord(i2);
                rhs.at(i1, i2) +=
                    weight * (h * prob.f_tilde(t_prev, x1, x2, U.at(i1, i2)) +
                              h * prob.g_tilde(t_next, x1, x2) +
                              b_start.at(i1, i2) * dW.at(i1, i2));
            }
        }
        try {
            U = solve_spd(cfg.op(l), h * alpha_n, rhs, cfg.solver_tol(),
                          cfg.solver_max_iter());
        } catch (const SolverError& e) {
            throw SolverError("substep (l = " + std::to_string(l + 1) +
                              ", n = " + std::to_string(n) + "): " + e.what());
        }
    }
    return U;
}

IntegrationResult integrate(const StepperConfig& cfg, const ProblemSpec& prob,
                            const TimeGrid& time_grid, const NoisePath& path,
                            bool record_moments, const SnapshotCallback& on_step) {
    if (path.time_grid() != time_grid) {
        throw std::invalid_argument("integrate: path time grid does not match");
    }
    ScalarField U = sample_function(cfg.partition().grid(), prob.u0);
    std::vector<double> moments;
    if (record_moments) {
        moments.reserve(time_grid.steps() + 1);
        moments.push_back(norm_h_sq(U));
    }
    for (int n = 1; n <= time_grid.steps(); ++n) {
        U = lie_step(cfg, prob, U, time_grid.node(n - 1), time_grid.step_size(n),
                     path, n);
        if (record_moments) moments.push_back(norm_h_sq(U));
        if (on_step) on_step(n, time_grid.node(n), U);
    }
    return IntegrationResult{std::move(U), std::move(moments)};
}

}  // namespace ddspde

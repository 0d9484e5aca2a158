#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "ddspde/grid.hpp"
#include "ddspde/noise.hpp"
#include "ddspde/partition.hpp"
#include "ddspde/time_grid.hpp"

namespace ddspde {

/// Coefficient data of the stochastic heat equation
///
///   du - alpha(t) Lap u dt = (F(t,x,u) + G(t,x)) dt + B(t,x,u) dW(t,x)
///
/// on (0,1)^2 with homogeneous Dirichlet boundary and initial datum u0.
struct ProblemSpec {
    std::function<double(double)> alpha;
    std::function<double(double, double, double, double)> f_tilde;  // (t,x1,x2,u)
    std::function<double(double, double, double)> g_tilde;          // (t,x1,x2)
    std::function<double(double, double, double, double)> b_tilde;  // (t,x1,x2,u)
    std::function<double(double, double)> u0;                       // (x1,x2)
    double final_time = 1.0;
};

/// Per-run stepping configuration: the partition, one noise truncation
/// K_l per subdomain, and the linear solver controls. The chi-weighted
/// diffusion operators are assembled once here (with unit alpha; the
/// time-dependent alpha(t_n) scalar is applied at solve time).
class StepperConfig {
public:
    /// Throws unless K_per_subdomain has one entry >= 1 per subdomain and
    /// solver_tol > 0. max_iter = 0 selects the default 10 * n_interior^2.
    StepperConfig(PartitionOfUnity partition, std::vector<int> K_per_subdomain,
                  double solver_tol = 1e-10, int solver_max_iter = 0);

    const PartitionOfUnity& partition() const { return partition_; }
    int subdomains() const { return partition_.subdomains(); }
    int truncation(int l) const { return K_per_subdomain_[l]; }
    int max_truncation() const { return K_max_; }
    double solver_tol() const { return solver_tol_; }
    int solver_max_iter() const { return solver_max_iter_; }

    /// Unit-alpha weighted diffusion operator of subdomain l.
    const WeightedDiffusionOperator& op(int l) const { return ops_[l]; }

private:
    PartitionOfUnity partition_;
    std::vector<int> K_per_subdomain_;
    int K_max_ = 0;
    double solver_tol_;
    int solver_max_iter_;
    std::vector<WeightedDiffusionOperator> ops_;
};

/// Solves (I + h Op) U = rhs by conjugate gradients with diagonal
/// preconditioning, restricted to the operator's active column window
/// (rows outside it are identity). Stops at ||(I + h Op)U - rhs||_2 <=
/// tol * ||rhs||_2. Throws SolverError on non-convergence and
/// std::invalid_argument for h < 0 or non-finite rhs.
ScalarField solve_spd(const WeightedDiffusionOperator& op, double h,
                      const ScalarField& rhs, double tol = 1e-10,
                      int max_iter = 0);

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One Lie-composed time step t_{n-1} -> t_n = t_{n-1} + h: for
/// l = 1..s sequentially, with U_0 = U_prev,
///
///   rhs_l = U_{l-1} + h chi_l F(t_{n-1}, ., U_{l-1}) + h chi_l G(t_n, .)
///           + chi_l B(t_{n-1}, ., U_prev) dW^(n,K_l),
///   (I + h alpha(t_n) A_l) U_l = rhs_l,
///
/// and the returned state is U_s. The diffusion factor B is frozen at the
/// start-of-step state U_prev for every l, while F sees the running
/// substate; all subdomains read the same path, truncated at K_l.
ScalarField lie_step(const StepperConfig& cfg, const ProblemSpec& prob,
                     const ScalarField& U_prev, double t_prev, double h,
                     const NoisePath& path, int n);

struct IntegrationResult {
    ScalarField final_state;
    /// ||U^n||_H^2 for n = 0..N when moments were recorded, else empty.
    std::vector<double> moments;
};

/// Per-step snapshot hook: called as (n, t_n, U^n) after every step.
using SnapshotCallback = std::function<void(int, double, const ScalarField&)>;

/// Runs lie_step over the whole time grid starting from u0 sampled on the
/// partition's grid. The path's time grid must match. Moments start with
/// ||u0||_H^2.
IntegrationResult integrate(const StepperConfig& cfg, const ProblemSpec& prob,
                            const TimeGrid& time_grid, const NoisePath& path,
                            bool record_moments = false,
                            const SnapshotCallback& on_step = {});

}  // namespace ddspde

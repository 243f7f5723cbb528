#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "scoutrl/grid.hpp"

namespace scoutrl {

using Field = Eigen::VectorXd;  // one scalar per grid cell, row-major layout

// Sparse GMRF precision Q = tau*I + beta*L applied matrix-free, with L the
// 4-neighbor graph Laplacian. Boundary diagonal uses the actual neighbor
// count (2 at corners, 3 at edges, 4 interior), which keeps Q SPD.
struct PrecisionOperator {
    double tau = 1.0;
    double beta = 0.2;
    GridSpec grid;

    PrecisionOperator() = default;
    PrecisionOperator(double tau_, double beta_, const GridSpec& grid_);

    int size() const { return grid.cell_count(); }
    int degree(int cell) const;
    double diagonal(int cell) const { return tau + beta * degree(cell); }

    Field apply(const Field& v) const;
};

struct SolverSettings {
    int newton_iters = 3;
    int pcg_iters = 8;
    double pcg_tolerance = 1e-6;       // residual-norm ratio
    double log_intensity_clamp = 10.0;
    int max_step_halvings = 4;
};

// Posterior belief over the log-intensity field plus the bookkeeping the
// planner and reward need (exposure, visit counts, staleness).
struct Belief {
    Field log_intensity;       // posterior mode u
    Field variance;            // sigma^2(t+), the stateful filter value
    Field predicted_variance;  // sigma~^2(t) from the last prediction step
    std::vector<uint8_t> exposure;  // covered this step
    std::vector<int> obs_count;     // n_c
    std::vector<int> staleness;     // s_c

    static Belief prior(const GridSpec& grid, double variance_max = 1.0);

    int size() const { return static_cast<int>(log_intensity.size()); }
    Field intensity() const { return log_intensity.array().exp(); }
};

// Gradient of the exposure-masked Poisson log-posterior:
//   g = e .* (y - exp(u)) - Q u
Field log_posterior_gradient(const Belief& belief, const Field& counts,
                             const PrecisionOperator& op);

// Negative log-posterior (up to a constant): -sum_c e_c (y_c u_c - exp(u_c)) + u'Qu/2
double negative_log_posterior(const Field& u, const Field& counts,
                              const std::vector<uint8_t>& exposure,
                              const PrecisionOperator& op);

// Diagonal of the Hessian: e_c * exp(u_c) + Q_cc.
Field hessian_diagonal(const Belief& belief, const PrecisionOperator& op);

struct PcgResult {
    Field solution;
    int iterations = 0;
    bool ok = true;  // false on non-finite values
};

// Diagonally preconditioned conjugate gradient for H x = rhs, where
// H v = diag(e .* lambda) v + Q v is applied matrix-free.
PcgResult pcg_solve(const PrecisionOperator& op, const Field& exposed_intensity,
                    const Field& rhs, const Field& preconditioner,
                    const SolverSettings& settings);

struct NewtonReport {
    int newton_steps = 0;
    int pcg_iterations = 0;
    int halvings = 0;
    double grad_norm = 0.0;
    bool ok = true;  // false when the update was abandoned and the mode kept
};

// Damped Newton MAP tracking, warm-started from the current mode. On
// numeric failure the belief is left unchanged and ok=false is reported.
NewtonReport laplace_update(Belief& belief, const Field& counts,
                            const std::vector<uint8_t>& exposure,
                            const PrecisionOperator& op, const SolverSettings& settings);

// Diagonal Laplace surrogate: element-wise reciprocal of the Hessian
// diagonal. Not a calibrated marginal variance; preserves ordering.
Field variance_proxy(const Belief& belief, const PrecisionOperator& op);

// sigma~^2 = min(sigma^2 * (1 + growth_rate), ceiling), stored in
// belief.predicted_variance and returned.
const Field& predict_variances(Belief& belief, double growth_rate, double ceiling);

// Covered cells get max(1/(lambda* + Q_cc), floor); uncovered keep the
// prediction. With degree_aware=false the covered branch uses tau + 4*beta
// for every cell regardless of boundary degree.
void update_variances(Belief& belief, const std::vector<int>& covered,
                      const PrecisionOperator& op, double floor, bool degree_aware = true);

// Step-start bookkeeping: s_c += 1 for all cells.
void bump_staleness(Belief& belief);
// Observation-time bookkeeping: exposure mask and n_c += 1 for covered cells.
void record_exposure(Belief& belief, const std::vector<int>& covered);
// Post-reward bookkeeping: s_c = 0 for covered cells.
void reset_staleness(Belief& belief, const std::vector<int>& covered);

// Means of intensity, variance and observation count over the cells with
// mask != 0 (the operational grid).
Eigen::Vector3d belief_summary(const Belief& belief, const std::vector<uint8_t>& mask);

}  // namespace scoutrl

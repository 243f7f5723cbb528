#include "scoutrl/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace scoutrl {

PrecisionOperator::PrecisionOperator(double tau_, double beta_, const GridSpec& grid_)
    : tau(tau_), beta(beta_), grid(grid_) {
    if (tau <= 0.0) throw std::invalid_argument("PrecisionOperator: tau must be > 0");
    if (beta < 0.0) throw std::invalid_argument("PrecisionOperator: beta must be >= 0");
}

int PrecisionOperator::degree(int cell) const {
    const Cell c = grid.cell_at(cell);
    int d = 0;
    if (c.x > 0) ++d;
    if (c.x < grid.cells_x - 1) ++d;
    if (c.y > 0) ++d;
    if (c.y < grid.cells_y - 1) ++d;
    return d;
}

Field PrecisionOperator::apply(const Field& v) const {
    if (v.size() != size()) throw std::invalid_argument("PrecisionOperator::apply: length mismatch");
    const int gx = grid.cells_x;
    const int gy = grid.cells_y;
    Field out(v.size());
    for (int iy = 0; iy < gy; ++iy) {
        for (int ix = 0; ix < gx; ++ix) {
            const int i = iy * gx + ix;
            double neighbor_sum = 0.0;
            int deg = 0;
            if (ix > 0) { neighbor_sum += v[i - 1]; ++deg; }
            if (ix < gx - 1) { neighbor_sum += v[i + 1]; ++deg; }
            if (iy > 0) { neighbor_sum += v[i - gx]; ++deg; }
            if (iy < gy - 1) { neighbor_sum += v[i + gx]; ++deg; }
            out[i] = tau * v[i] + beta * (deg * v[i] - neighbor_sum);
        }
    }
    return out;
}

Belief Belief::prior(const GridSpec& grid, double variance_max) {
    Belief b;
    const int n = grid.cell_count();
    b.log_intensity = Field::Zero(n);
    b.variance = Field::Constant(n, variance_max);
    b.predicted_variance = b.variance;
    b.exposure.assign(n, 0);
    b.obs_count.assign(n, 0);
    b.staleness.assign(n, 0);
    return b;
}

Field log_posterior_gradient(const Belief& belief, const Field& counts,
                             const PrecisionOperator& op) {
    const Field lambda = belief.intensity();
    Field g = -op.apply(belief.log_intensity);
    for (int i = 0; i < belief.size(); ++i)
        if (belief.exposure[i]) g[i] += counts[i] - lambda[i];
    return g;
}

double negative_log_posterior(const Field& u, const Field& counts,
                              const std::vector<uint8_t>& exposure,
                              const PrecisionOperator& op) {
    double loglik = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (exposure[i]) loglik += counts[i] * u[i] - std::exp(u[i]);
    return -loglik + 0.5 * u.dot(op.apply(u));
}

Field hessian_diagonal(const Belief& belief, const PrecisionOperator& op) {
    Field d(belief.size());
    const Field lambda = belief.intensity();
    for (int i = 0; i < belief.size(); ++i)
        d[i] = (belief.exposure[i] ? lambda[i] : 0.0) + op.diagonal(i);
    return d;
}

PcgResult pcg_solve(const PrecisionOperator& op, const Field& exposed_intensity,
                    const Field& rhs, const Field& preconditioner,
                    const SolverSettings& settings) {
    PcgResult res;
    const int n = static_cast<int>(rhs.size());
    res.solution = Field::Zero(n);

    auto apply_h = [&](const Field& v) -> Field {
        return op.apply(v) + exposed_intensity.cwiseProduct(v);
    };

    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return res;  // exact solution in zero iterations

    Field r = rhs;
    Field z = r.cwiseQuotient(preconditioner);
    Field p = z;
    double rz = r.dot(z);
    for (int k = 0; k < settings.pcg_iters; ++k) {
        const Field hp = apply_h(p);
        const double php = p.dot(hp);
        if (!(php > 0.0) || !std::isfinite(php)) {
            res.ok = std::isfinite(php);
            break;
        }
        const double alpha = rz / php;
        res.solution += alpha * p;
        r -= alpha * hp;
        ++res.iterations;
        if (r.norm() / rhs_norm <= settings.pcg_tolerance) break;
        z = r.cwiseQuotient(preconditioner);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    if (!res.solution.allFinite()) res.ok = false;
    return res;
}

NewtonReport laplace_update(Belief& belief, const Field& counts,
                            const std::vector<uint8_t>& exposure,
                            const PrecisionOperator& op, const SolverSettings& settings) {
    NewtonReport report;
    if (counts.size() != belief.log_intensity.size())
        throw std::invalid_argument("laplace_update: counts length mismatch");
    if (static_cast<int>(exposure.size()) != belief.size())
        throw std::invalid_argument("laplace_update: exposure length mismatch");

    const double clamp = settings.log_intensity_clamp;
    Field u = belief.log_intensity;
    double objective = negative_log_posterior(u, counts, exposure, op);

    for (int k = 0; k < settings.newton_iters; ++k) {
        Field lambda = u.array().exp();
        Field exposed_lambda = Field::Zero(u.size());
        Field grad = -op.apply(u);
        for (int i = 0; i < u.size(); ++i) {
            if (exposure[i]) {
                exposed_lambda[i] = lambda[i];
                grad[i] += counts[i] - lambda[i];
            }
        }
        if (grad.norm() <= 1e-13 * std::max(1.0, u.norm())) break;  // already at the mode

        Field precond(u.size());
        for (int i = 0; i < u.size(); ++i) precond[i] = exposed_lambda[i] + op.diagonal(i);

        PcgResult step = pcg_solve(op, exposed_lambda, grad, precond, settings);
        report.pcg_iterations += step.iterations;
        if (!step.ok) {
            report.ok = false;
            return report;  // keep previous mode
        }

        // Backtrack on the negative log-posterior; keep the best candidate.
        double scale = 1.0;
        double best_objective = objective;
        Field best_u = u;
        for (int h = 0; h <= settings.max_step_halvings; ++h) {
            Field candidate =
                (u + scale * step.solution).cwiseMax(-clamp).cwiseMin(clamp);
            const double cand_objective =
                negative_log_posterior(candidate, counts, exposure, op);
            if (std::isfinite(cand_objective) && cand_objective < best_objective) {
                best_objective = cand_objective;
                best_u = std::move(candidate);
                break;
            }
            scale *= 0.5;
            ++report.halvings;
        }
        u = std::move(best_u);
        objective = best_objective;
        ++report.newton_steps;
    }

    if (!u.allFinite()) {
        report.ok = false;
        return report;
    }
    belief.log_intensity = std::move(u);
    Field final_grad = log_posterior_gradient(belief, counts, op);
    report.grad_norm = final_grad.norm();
    return report;
}

Field variance_proxy(const Belief& belief, const PrecisionOperator& op) {
    return hessian_diagonal(belief, op).cwiseInverse();
}

const Field& predict_variances(Belief& belief, double growth_rate, double ceiling) {
    belief.predicted_variance =
        (belief.variance.array() * (1.0 + growth_rate)).min(ceiling).matrix();
    return belief.predicted_variance;
}

void update_variances(Belief& belief, const std::vector<int>& covered,
                      const PrecisionOperator& op, double floor, bool degree_aware) {
    belief.variance = belief.predicted_variance;
    for (int c : covered) {
        const double lambda_star = std::exp(belief.log_intensity[c]);
        const double qcc = degree_aware ? op.diagonal(c) : op.tau + 4.0 * op.beta;
        belief.variance[c] = std::max(1.0 / (lambda_star + qcc), floor);
    }
}

void bump_staleness(Belief& belief) {
    for (auto& s : belief.staleness) ++s;
}

void record_exposure(Belief& belief, const std::vector<int>& covered) {
    std::fill(belief.exposure.begin(), belief.exposure.end(), 0);
    for (int c : covered) {
        belief.exposure[c] = 1;
        ++belief.obs_count[c];
    }
}

void reset_staleness(Belief& belief, const std::vector<int>& covered) {
    for (int c : covered) belief.staleness[c] = 0;
}

Eigen::Vector3d belief_summary(const Belief& belief, const std::vector<uint8_t>& mask) {
    double sum_lambda = 0.0, sum_var = 0.0, sum_count = 0.0;
    int n = 0;
    for (int i = 0; i < belief.size(); ++i) {
        if (!mask[i]) continue;
        sum_lambda += std::exp(belief.log_intensity[i]);
        sum_var += belief.variance[i];
        sum_count += belief.obs_count[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("belief_summary: empty operational set");
    return Eigen::Vector3d(sum_lambda / n, sum_var / n, sum_count / n);
}

}  // namespace scoutrl

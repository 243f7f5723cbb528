#include "scoutrl/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scoutrl {

double DemandField::unnormalized_at(const Vec2& point) const {
    double v = 0.0;
    for (const auto& h : hotspots) {
        const double d2 = (point - h.center).squaredNorm();
        v += std::exp(-d2 / (2.0 * h.spread * h.spread));
    }
    return v;
}

double DemandField::density_at(const Vec2& point) const {
    if (normalizer <= 0.0) throw std::invalid_argument("DemandField: normalizer must be > 0");
    return std::clamp(unnormalized_at(point) / normalizer, 0.0, 1.0);
}

double DemandField::cell_density(Cell c, const GridSpec& grid) const {
    return density_at(grid.cell_center(c));
}

void DemandField::normalize(const GridSpec& grid) {
    double peak = 0.0;
    for (int iy = 0; iy < grid.cells_y; ++iy)
        for (int ix = 0; ix < grid.cells_x; ++ix)
            peak = std::max(peak, unnormalized_at(grid.cell_center({ix, iy})));
    normalizer = peak > 0.0 ? peak : 1.0;
}

void DemandField::drift(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& h : hotspots) {
        if (h.drift_rate == 0.0) {
            gauss(rng);
            gauss(rng);  // keep stream alignment across drift-rate arms
            continue;
        }
        Vec2 step(gauss(rng), gauss(rng));
        Vec2 next = h.center + h.drift_rate * step;
        h.center.x() = std::clamp(next.x(), h.base_center.x() - h.drift_bound,
                                  h.base_center.x() + h.drift_bound);
        h.center.y() = std::clamp(next.y(), h.base_center.y() - h.drift_bound,
                                  h.base_center.y() + h.drift_bound);
    }
}

void DemandField::episode_reset(double perturbation_frac, const GridSpec& grid, Rng& rng) {
    for (auto& h : hotspots) {
        const double mag = perturbation_frac * h.drift_bound;
        std::uniform_real_distribution<double> uni(-mag, mag);
        h.center = h.base_center + Vec2(uni(rng), uni(rng));
    }
    normalize(grid);
}

DemandField make_demand_field(const GridSpec& grid, const ScenarioParams& params, Rng& rng) {
    if (params.hotspots_min < 1 || params.hotspots_max < params.hotspots_min)
        throw std::invalid_argument("make_demand_field: bad hotspot count range");
    DemandField field;
    field.trials = params.trials;
    field.request_prob = params.request_prob;
    std::uniform_int_distribution<int> count(params.hotspots_min, params.hotspots_max);
    std::uniform_real_distribution<double> ux(0.0, grid.length_x);
    std::uniform_real_distribution<double> uy(0.0, grid.length_y);
    std::uniform_real_distribution<double> us(params.spread_min, params.spread_max);
    const int j = count(rng);
    for (int i = 0; i < j; ++i) {
        Hotspot h;
        h.base_center = Vec2(ux(rng), uy(rng));
        h.center = h.base_center;
        h.spread = us(rng);
        h.drift_rate = params.drift_rate;
        h.drift_bound = params.drift_bound;
        field.hotspots.push_back(h);
    }
    field.normalize(grid);
    return field;
}

Observation sample_observations(const std::vector<int>& covered, const DemandField& field,
                                const GridSpec& grid, Rng& rng) {
    Observation obs;
    obs.cells = covered;
    obs.counts.resize(covered.size());
    for (size_t i = 0; i < covered.size(); ++i) {
        const double p = field.request_prob * field.cell_density(grid.cell_at(covered[i]), grid);
        if (p < -1e-12 || p > 1.0 + 1e-12)
            throw std::invalid_argument("sample_observations: success probability outside [0,1]");
        int y = 0;
        if (p > 0.0) {
            std::binomial_distribution<int> binom(field.trials, std::clamp(p, 0.0, 1.0));
            y = binom(rng);
        }
        obs.counts[i] = y;
        obs.total += y;
    }
    return obs;
}

void step_agent(AgentState& agent, Vec2 action, double d_max, const GridSpec& grid) {
    action.x() = std::clamp(action.x(), -1.0, 1.0);
    action.y() = std::clamp(action.y(), -1.0, 1.0);
    agent.previous_position = agent.position;
    agent.position = grid.clip(agent.position + action * d_max);
}

}  // namespace scoutrl

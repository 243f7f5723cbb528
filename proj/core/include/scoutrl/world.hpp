#pragma once

#include <cstdint>
#include <vector>

#include "scoutrl/grid.hpp"
#include "scoutrl/rng.hpp"

namespace scoutrl {

struct Hotspot {
    Vec2 base_center = Vec2::Zero();  // anchor of the bounded walk
    Vec2 center = Vec2::Zero();
    double spread = 1.0;       // Gaussian sigma, meters
    double drift_rate = 0.0;   // per-step diffusion, meters
    double drift_bound = 0.0;  // box bound around base_center, meters
};

// Ground-truth demand: normalized Gaussian hotspot mixture plus the
// binomial sampling parameters.
struct DemandField {
    std::vector<Hotspot> hotspots;
    double normalizer = 1.0;    // max of the unnormalized mixture over cell centers
    int trials = 100;           // binomial trials per covered cell
    double request_prob = 0.05;

    double unnormalized_at(const Vec2& point) const;
    // Normalized density, clamped to [0,1].
    double density_at(const Vec2& point) const;
    // Cell-averaged density, approximated at the cell center.
    double cell_density(Cell c, const GridSpec& grid) const;

    // Recompute the normalizer as the mixture maximum over all cell centers.
    void normalize(const GridSpec& grid);

    // One bounded-random-walk step for every hotspot center.
    void drift(Rng& rng);

    // Return centers to base with a small uniform perturbation
    // (fraction of the drift bound, per coordinate), then renormalize.
    void episode_reset(double perturbation_frac, const GridSpec& grid, Rng& rng);
};

struct ScenarioParams {
    int hotspots_min = 3;
    int hotspots_max = 5;
    double spread_min = 100.0;
    double spread_max = 200.0;
    double drift_rate = 1.0;
    double drift_bound = 75.0;
    int trials = 100;
    double request_prob = 0.05;
};

// Draw hotspot count, centers and spreads for a fresh scenario.
DemandField make_demand_field(const GridSpec& grid, const ScenarioParams& params, Rng& rng);

struct Observation {
    std::vector<int> cells;     // covered cells (flat indices)
    std::vector<int> counts;    // per covered cell
    int total = 0;
};

// Binomial(n_s, pi_req * rho(c)) per covered cell.
Observation sample_observations(const std::vector<int>& covered, const DemandField& field,
                                const GridSpec& grid, Rng& rng);

struct AgentState {
    Vec2 position = Vec2::Zero();
    Vec2 previous_position = Vec2::Zero();
    // Cells of the agent's own operational region ever covered this episode.
    std::vector<uint8_t> visited_mask;
    int visited_count = 0;
};

// Clip the action to [-1,1]^2, displace by d_max and clip to the area.
void step_agent(AgentState& agent, Vec2 action, double d_max, const GridSpec& grid);

}  // namespace scoutrl

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scoutrl/env.hpp"
#include "scoutrl/planner.hpp"
#include "scoutrl/sac.hpp"

namespace scoutrl {

// Flat run configuration. Every field has a documented default; a config
// file or override only needs the keys it changes.
struct RunConfig {
    // scenario
    double length_x = 2000.0;
    double length_y = 2000.0;
    double resolution = 20.0;
    int num_agents = 2;
    double coverage_radius = 100.0;
    double d_max = 15.0;
    int hotspots_min = 3;
    int hotspots_max = 5;
    double hotspot_spread_min = 100.0;
    double hotspot_spread_max = 200.0;
    double hotspot_drift_rate = 1.0;
    double hotspot_drift_bound = 75.0;
    double reset_perturbation = 0.05;
    int sampling_trials = 100;
    double request_prob = 0.05;
    std::string region_layout = "partial";

    // belief
    double tau = 1.0;
    double beta = 0.2;
    int newton_iters = 3;
    int pcg_iters = 8;
    double pcg_tol = 1e-6;
    double log_intensity_clamp = 10.0;
    double variance_growth = 0.002;
    double variance_max = 1.0;
    double variance_min = 0.01;
    bool degree_aware_variance = true;

    // planner
    std::string strategy = "pathmi";
    int horizon = 5;
    double staleness_weight = 0.1;
    double max_staleness = 0.0;  // 0 = episode length
    double ucb_kappa = 2.0;
    double planner_epsilon = 1e-6;
    bool normalize_diagonals = false;

    // reward
    double w_service = 5.0;
    double w_explore = 0.5;
    double w_coord = 1.0;
    std::string penalty_mode = "variance";
    double travel_scale = 0.0;  // 0 = 1/(N d_max sqrt 2)

    // episodes
    int episodes = 200;            // K
    int warmstart_episodes = 10;   // K_w
    int steps = 200;               // T

    // sac
    int hidden_units = 256;
    double learning_rate = 3e-4;
    int batch = 256;
    double gamma = 0.99;
    double tau_soft = 0.005;
    int buffer_capacity = 10000;
    int learning_starts = 100;
    double p_loss = 0.0;
    double alpha_init = 1.0;
    int bc_epochs = 50;
    std::string demo_reward_mode = "recorded";

    // transfer channels
    bool transfer_belief = true;
    bool transfer_buffer = true;

    // analysis
    int convergence_window = 20;
    int smoothing_window = 5;
    int appendix_episodes = 1;

    std::vector<uint64_t> seeds{0, 1, 2, 3, 4};

    // Derived builders.
    GridSpec make_grid() const { return GridSpec(length_x, length_y, resolution); }
    EnvParams make_env_params() const;
    PlannerSettings make_planner_settings() const;
    SacSettings make_sac_settings() const;

    void validate() const;

    // Canonical "key = value" listing of every field, in fixed order.
    std::string resolved_text() const;
    uint64_t hash() const;
};

// Parse "key = value" lines ('#' comments, blank lines allowed). Unknown
// keys and malformed lines are reported with their line number.
RunConfig parse_config(const std::string& text, const RunConfig& base = RunConfig());
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});
void apply_override(RunConfig& config, const std::string& key_value);

// Reduced defaults used by suite runs unless full scale is requested.
void apply_desk_scale(RunConfig& config);
// Planning-only comparison scenario (small area, two hotspots, two agents).
void apply_appendix_scenario(RunConfig& config, bool full_scale);

}  // namespace scoutrl

#include "scoutrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scoutrl {

PenaltyMode penalty_mode_from_string(const std::string& s) {
    if (s == "variance") return PenaltyMode::VarianceNormalized;
    if (s == "fixed") return PenaltyMode::Fixed;
    if (s == "none") return PenaltyMode::None;
    throw std::invalid_argument("unknown penalty mode: " + s);
}

std::string to_string(PenaltyMode mode) {
    switch (mode) {
        case PenaltyMode::VarianceNormalized: return "variance";
        case PenaltyMode::Fixed: return "fixed";
        case PenaltyMode::None: return "none";
    }
    return "variance";
}

RewardBreakdown compute_reward(const RewardInputs& in, const RewardWeights& weights,
                               double variance_max, PenaltyMode mode, double travel_scale,
                               int* negative_explore_cells) {
    RewardBreakdown b;
    b.service = in.total_requests;

    const Field& predicted = *in.predicted_variance;
    const Field& updated = *in.updated_variance;
    for (int c : in.covered_union) {
        const double gain = predicted[c] - updated[c];
        if (gain < 0.0 && negative_explore_cells) ++*negative_explore_cells;
        b.explore += gain;
    }

    if (mode != PenaltyMode::None) {
        const auto& m = *in.overlap_counts;
        for (size_t c = 0; c < m.size(); ++c) {
            if (m[c] < 2) continue;
            b.overlap += mode == PenaltyMode::Fixed
                             ? 1.0
                             : 1.0 - predicted[static_cast<int>(c)] / variance_max;
        }
    }

    double distance = 0.0;
    for (size_t i = 0; i < in.positions.size(); ++i)
        distance += (in.positions[i] - in.previous_positions[i]).norm();
    b.travel = travel_scale * distance;
    return b;
}

Environment::Environment(const EnvParams& params, uint64_t master_seed)
    : params_(params),
      regions_(params.regions),
      streams_(master_seed),
      precision_(params.tau, params.beta, params.grid) {
    if (regions_.empty()) throw std::invalid_argument("Environment: no operational regions");
    operational_ = operational_mask(params_.grid, regions_);
    travel_scale_ = params_.weights.travel_scale > 0.0
                        ? params_.weights.travel_scale
                        : 1.0 / (num_agents() * params_.d_max * std::numbers::sqrt2);
    Rng scenario_rng = streams_.stream("demand-scenario");
    field_ = make_demand_field(params_.grid, params_.scenario, scenario_rng);
    agents_.resize(regions_.size());
}

StateVector Environment::reset(int episode, const std::optional<Belief>& transfer) {
    episode_ = episode;
    t_ = 0;
    terminal_ = false;
    staleness_bumped_ = false;

    Rng demand_rng = streams_.stream("demand-episode", episode);
    field_.episode_reset(params_.reset_perturbation, params_.grid, demand_rng);
    obs_rng_ = streams_.stream("observation", episode);
    drift_rng_ = streams_.stream("drift", episode);

    if (transfer) {
        if (transfer->size() != params_.grid.cell_count())
            throw std::invalid_argument("Environment::reset: transfer belief grid mismatch");
        belief_ = *transfer;
        belief_.predicted_variance = belief_.variance;
    } else {
        belief_ = Belief::prior(params_.grid, params_.variance_max);
    }
    std::fill(belief_.exposure.begin(), belief_.exposure.end(), 0);
    std::fill(belief_.obs_count.begin(), belief_.obs_count.end(), 0);
    std::fill(belief_.staleness.begin(), belief_.staleness.end(), 0);

    for (size_t i = 0; i < agents_.size(); ++i) {
        agents_[i].position = regions_[i].centroid(params_.grid);
        agents_[i].previous_position = agents_[i].position;
        agents_[i].visited_mask.assign(regions_[i].cell_count(), 0);
        agents_[i].visited_count = 0;
        mark_visited(static_cast<int>(i),
                     footprint(agents_[i].position, params_.coverage_radius, params_.grid));
    }
    return build_state();
}

void Environment::begin_step() {
    if (staleness_bumped_) return;
    bump_staleness(belief_);
    staleness_bumped_ = true;
}

void Environment::mark_visited(int agent_index, const std::vector<int>& cells) {
    auto& agent = agents_[agent_index];
    const auto& region = regions_[agent_index];
    const int width = region.x1 - region.x0 + 1;
    for (int c : cells) {
        const Cell cell = params_.grid.cell_at(c);
        if (!region.contains(cell)) continue;
        const int local = (cell.y - region.y0) * width + (cell.x - region.x0);
        if (!agent.visited_mask[local]) {
            agent.visited_mask[local] = 1;
            ++agent.visited_count;
        }
    }
}

StepOutcome Environment::step(const Eigen::VectorXd& joint_action) {
    if (terminal_) throw std::logic_error("Environment::step: episode is terminal");
    if (joint_action.size() != action_dim())
        throw std::invalid_argument("Environment::step: joint action dimension mismatch");
    if (!joint_action.allFinite())
        throw std::invalid_argument("Environment::step: non-finite action");

    begin_step();

    // World dynamics: demand drifts, agents move.
    field_.drift(drift_rng_);
    for (int i = 0; i < num_agents(); ++i)
        step_agent(agents_[i], joint_action.segment<2>(2 * i), params_.d_max, params_.grid);

    // Coverage and observation.
    std::vector<std::vector<int>> covered(num_agents());
    std::vector<int> overlap_counts(params_.grid.cell_count(), 0);
    std::vector<int> covered_union;
    for (int i = 0; i < num_agents(); ++i) {
        covered[i] = footprint(agents_[i].position, params_.coverage_radius, params_.grid);
        std::erase_if(covered[i], [&](int c) { return !operational_[c]; });
        mark_visited(i, covered[i]);
        for (int c : covered[i]) {
            if (overlap_counts[c]++ == 0) covered_union.push_back(c);
        }
    }
    std::sort(covered_union.begin(), covered_union.end());
    const Observation obs = sample_observations(covered_union, field_, params_.grid, obs_rng_);

    // Belief: exposure/counts, variance growth, MAP tracking, variance update.
    record_exposure(belief_, covered_union);
    Field counts = Field::Zero(params_.grid.cell_count());
    for (size_t i = 0; i < obs.cells.size(); ++i) counts[obs.cells[i]] = obs.counts[i];
    predict_variances(belief_, params_.variance_growth, params_.variance_max);
    const NewtonReport newton =
        laplace_update(belief_, counts, belief_.exposure, precision_, params_.solver);
    update_variances(belief_, covered_union, precision_, params_.variance_min,
                     params_.degree_aware_variance);

    // Reward.
    RewardInputs inputs;
    inputs.covered_union = covered_union;
    inputs.total_requests = obs.total;
    inputs.predicted_variance = &belief_.predicted_variance;
    inputs.updated_variance = &belief_.variance;
    inputs.overlap_counts = &overlap_counts;
    for (const auto& a : agents_) {
        inputs.positions.push_back(a.position);
        inputs.previous_positions.push_back(a.previous_position);
    }
    StepOutcome outcome;
    outcome.breakdown =
        compute_reward(inputs, params_.weights, params_.variance_max, params_.penalty_mode,
                       travel_scale_, &outcome.telemetry.negative_explore_cells);
    outcome.reward = outcome.breakdown.total(params_.weights);

    outcome.telemetry.total_requests = obs.total;
    outcome.telemetry.belief_update_failed = !newton.ok;
    int overlap_cells = 0;
    for (int m : overlap_counts) overlap_cells += m >= 2;
    outcome.telemetry.overlap_cells = overlap_cells;
    outcome.telemetry.mean_variance = belief_summary(belief_, operational_)[1];

    // Advance time, then resolve terminal flag and post-reward bookkeeping.
    outcome.terminal = t_ == params_.episode_steps - 1;
    ++t_;
    outcome.next_state = build_state();
    reset_staleness(belief_, covered_union);
    staleness_bumped_ = false;
    terminal_ = outcome.terminal;
    return outcome;
}

StateVector Environment::current_state() const { return build_state(); }

StateVector Environment::build_state() const {
    StateVector s;
    s.num_agents = num_agents();
    s.values.resize(state_dim());
    for (int i = 0; i < num_agents(); ++i) {
        s.values[2 * i] = 2.0 * agents_[i].position.x() / params_.grid.length_x - 1.0;
        s.values[2 * i + 1] = 2.0 * agents_[i].position.y() / params_.grid.length_y - 1.0;
    }
    s.values.segment<3>(2 * num_agents()) = belief_summary(belief_, operational_);
    for (int i = 0; i < num_agents(); ++i)
        s.values[2 * num_agents() + 3 + i] =
            static_cast<double>(agents_[i].visited_count) / regions_[i].cell_count();
    s.values[state_dim() - 1] = static_cast<double>(t_) / params_.episode_steps;
    return s;
}

Field Environment::ground_truth() const {
    Field rho(params_.grid.cell_count());
    for (int c = 0; c < params_.grid.cell_count(); ++c)
        rho[c] = field_.cell_density(params_.grid.cell_at(c), params_.grid);
    return rho;
}

}  // namespace scoutrl

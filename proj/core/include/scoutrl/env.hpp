#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scoutrl/belief.hpp"
#include "scoutrl/grid.hpp"
#include "scoutrl/rng.hpp"
#include "scoutrl/world.hpp"

namespace scoutrl {

enum class PenaltyMode { VarianceNormalized, Fixed, None };

PenaltyMode penalty_mode_from_string(const std::string& s);
std::string to_string(PenaltyMode mode);

struct RewardWeights {
    double service = 5.0;
    double explore = 0.5;
    double coord = 1.0;
    double travel_scale = 0.0;  // delta_t; 0 selects 1/(N * d_max * sqrt(2))
};

struct RewardBreakdown {
    double service = 0.0;  // N_req
    double explore = 0.0;  // sum of variance reductions over covered cells
    double overlap = 0.0;  // penalty over cells with m_c >= 2
    double travel = 0.0;   // scaled joint travel distance

    double total(const RewardWeights& w) const {
        return w.service * service + w.explore * explore - w.coord * (overlap + travel);
    }
};

// Flat [p~_1..p~_N, phi, c_1..c_N, t/T] vector of dimension 3N+4.
struct StateVector {
    Eigen::VectorXd values;
    int num_agents = 0;

    int dim() const { return static_cast<int>(values.size()); }
    Eigen::Vector2d normalized_position(int agent) const {
        return values.segment<2>(2 * agent);
    }
    Eigen::Vector3d belief_summary() const { return values.segment<3>(2 * num_agents); }
    double coverage_progress(int agent) const { return values[2 * num_agents + 3 + agent]; }
    double time_fraction() const { return values[values.size() - 1]; }
};

struct StepTelemetry {
    int total_requests = 0;
    double mean_variance = 0.0;   // over the operational grid
    int overlap_cells = 0;        // cells with m_c >= 2
    int negative_explore_cells = 0;
    bool belief_update_failed = false;
};

struct StepOutcome {
    StateVector next_state;
    double reward = 0.0;
    RewardBreakdown breakdown;
    bool terminal = false;
    StepTelemetry telemetry;
};

struct EnvParams {
    GridSpec grid;
    std::vector<OperationalRegion> regions;
    ScenarioParams scenario;
    double coverage_radius = 100.0;
    double d_max = 15.0;
    double reset_perturbation = 0.05;
    int episode_steps = 200;  // T

    double tau = 1.0;
    double beta = 0.2;
    SolverSettings solver;
    double variance_growth = 0.002;
    double variance_max = 1.0;
    double variance_min = 0.01;
    bool degree_aware_variance = true;

    RewardWeights weights;
    PenaltyMode penalty_mode = PenaltyMode::VarianceNormalized;
};

// One multi-agent episode driver: owns the world, the shared belief and the
// reward computation. Single-writer; independent instances may run in
// parallel on different seeds.
class Environment {
public:
    Environment(const EnvParams& params, uint64_t master_seed);

    // Reset for episode `episode` (global index; used to salt the per-episode
    // randomness so paired arms see identical worlds). An optional
    // transferred belief replaces the uninformed prior; staleness and counts
    // are always zeroed.
    StateVector reset(int episode, const std::optional<Belief>& transfer = std::nullopt);

    // Staleness bump that precedes planning (idempotent within a step).
    void begin_step();

    // Joint action of length 2N in [-1,1]; executes the full step ordering
    // and returns the outcome. Throws after the terminal step.
    StepOutcome step(const Eigen::VectorXd& joint_action);

    StateVector current_state() const;

    int num_agents() const { return static_cast<int>(regions_.size()); }
    int state_dim() const { return 3 * num_agents() + 4; }
    int action_dim() const { return 2 * num_agents(); }
    int episode_steps() const { return params_.episode_steps; }
    double delta_t() const { return travel_scale_; }

    const Belief& belief() const { return belief_; }
    Belief& mutable_belief() { return belief_; }
    const DemandField& demand() const { return field_; }
    const GridSpec& grid() const { return params_.grid; }
    const std::vector<OperationalRegion>& regions() const { return regions_; }
    const std::vector<uint8_t>& operational() const { return operational_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    const EnvParams& params() const { return params_; }
    int step_index() const { return t_; }

    // Ground-truth cell densities over the grid (for export / correlation).
    Field ground_truth() const;

private:
    StateVector build_state() const;
    void mark_visited(int agent_index, const std::vector<int>& cells);

    EnvParams params_;
    std::vector<OperationalRegion> regions_;
    std::vector<uint8_t> operational_;
    RngStreams streams_;
    PrecisionOperator precision_;

    DemandField field_;
    std::vector<AgentState> agents_;
    Belief belief_;

    Rng obs_rng_, drift_rng_;
    int episode_ = 0;
    int t_ = 0;
    bool terminal_ = true;
    bool staleness_bumped_ = false;
    double travel_scale_ = 0.0;
};

// Everything one step's reward depends on. The variance fields are this
// step's prediction/update pair; overlap_counts holds m_c per cell.
struct RewardInputs {
    std::vector<int> covered_union;
    int total_requests = 0;
    const Field* predicted_variance = nullptr;
    const Field* updated_variance = nullptr;
    const std::vector<int>* overlap_counts = nullptr;
    std::vector<Vec2> positions;
    std::vector<Vec2> previous_positions;
};

// `travel_scale` is the resolved delta_t. Negative per-cell exploration
// terms are kept (not clipped) and counted into *negative_explore_cells.
RewardBreakdown compute_reward(const RewardInputs& in, const RewardWeights& weights,
                               double variance_max, PenaltyMode mode, double travel_scale,
                               int* negative_explore_cells = nullptr);

}  // namespace scoutrl

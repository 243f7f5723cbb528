#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scoutrl/config.hpp"
#include "scoutrl/env.hpp"
#include "scoutrl/io.hpp"
#include "scoutrl/sac.hpp"

namespace scoutrl {

// Output of the exploration phase: the terminal belief and the collected
// demonstration transitions (after any Bernoulli thinning).
struct PhaseOneResult {
    Belief final_belief;
    std::vector<Transition> demonstrations;
};

struct RunMetrics {
    std::vector<double> episode_rewards;        // sum of step rewards
    std::vector<double> episode_mean_variance;  // time-average of the grid mean
    std::vector<double> episode_pearson;        // NaN where undefined
    std::vector<double> episode_wall_clock;     // seconds; excluded from hashes
    bool aborted = false;

    double final_reward(int window) const;  // mean over the last `window` episodes
};

// Sample Pearson correlation; empty when either side has zero variance.
std::optional<double> pearson_correlation(const std::vector<double>& a,
                                          const std::vector<double>& b);

// First episode whose smoothed reward reaches 95% of the mean reward over
// the last `window` episodes; trace length when never reached.
int convergence_episode(const std::vector<double>& trace, int window = 20,
                        int smoothing_window = 5);

// Phase 1: planner-driven episodes 0..K_w-1 collecting demonstrations.
PhaseOneResult run_phase1(const RunConfig& config, uint64_t seed, RunMetrics* metrics = nullptr);

// Planner-only rollouts over arbitrary global episode indices (used by
// phase 1, the planning-only baseline and the strategy comparison).
PhaseOneResult run_planner_episodes(const RunConfig& config, uint64_t seed, int first_episode,
                                    int episode_count, RunMetrics* metrics);

struct Phase2Options {
    bool belief_channel = true;
    bool buffer_channel = true;
    // When set, start from this agent instead of a fresh one (behavior
    // cloning baseline); the caller keeps ownership.
    SacAgent* pretrained = nullptr;
};

struct Phase2Result {
    RunMetrics metrics;
    SacAgent agent;
    size_t initial_buffer_size = 0;  // after any seeding, before the first step
};

// Phase 2: SAC training over episodes K_w..K-1, optionally warm-started
// through the belief and/or buffer channel.
Phase2Result run_phase2(const RunConfig& config, uint64_t seed, const PhaseOneResult* phase1,
                        const Phase2Options& options);

// Behavior-cloning baseline: supervised actor pretraining on the phase-1
// state-action pairs, then SAC fine-tuning with an empty buffer.
Phase2Result run_bc_baseline(const RunConfig& config, uint64_t seed,
                             const PhaseOneResult& phase1);

// ---- Suites ------------------------------------------------------------

struct SuiteRow {
    std::string arm;
    std::string seed;  // seed number or "median"
    double final_reward = 0.0;
    double convergence = 0.0;
    double mean_variance = 0.0;  // last episode's value
    double pearson = 0.0;        // last episode's value
    bool aborted = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteRow> rows;
};

const std::vector<std::string>& known_suites();

// Runs one ablation grid with paired seeds; `jobs` limits worker threads
// (0 = hardware concurrency).
SuiteResult run_suite(const std::string& name, const RunConfig& base, int jobs = 0);

// ---- Strategy comparison (planning-only) --------------------------------

struct StrategyRow {
    std::string strategy;
    uint64_t seed = 0;
    double correlation = 0.0;  // ground truth vs belief intensity, final episode
    double runtime_s = 0.0;    // wall-clock per episode
};

std::vector<StrategyRow> run_strategy_comparison(const RunConfig& config, int jobs = 0);

// ---- Artifacts -----------------------------------------------------------

void save_phase1(const std::string& dir, const PhaseOneResult& result, const RunConfig& config,
                 uint64_t seed);
PhaseOneResult load_phase1(const std::string& dir, const RunConfig& config);

// Per-episode metrics CSV plus a manifest. Wall-clock is intentionally not
// written so identical runs produce identical bytes.
void write_metrics(const std::string& dir, const std::string& name, const RunMetrics& metrics,
                   const RunConfig& config, uint64_t seed, int first_episode);

void write_suite_csv(const std::string& dir, const SuiteResult& result, const RunConfig& config);

void write_strategy_csv(const std::string& dir, const std::vector<StrategyRow>& rows,
                        const RunConfig& config);

// Work pool used by the suite runners; exposed for reuse by the CLI.
void run_jobs(std::vector<std::function<void()>> jobs, int workers);

}  // namespace scoutrl

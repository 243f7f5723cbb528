#include "scoutrl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "scoutrl/planner.hpp"

namespace scoutrl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v, size_t first, size_t last) {
    if (first >= last) return kNan;
    return std::accumulate(v.begin() + first, v.begin() + last, 0.0) / (last - first);
}

double median_of(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return kNan;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double RunMetrics::final_reward(int window) const {
    if (episode_rewards.empty()) return kNan;
    const size_t n = episode_rewards.size();
    const size_t w = std::min<size_t>(window, n);
    return mean_of(episode_rewards, n - w, n);
}

std::optional<double> pearson_correlation(const std::vector<double>& a,
                                          const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    const size_t n = a.size();
    if (n < 2) return std::nullopt;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

int convergence_episode(const std::vector<double>& trace, int window, int smoothing_window) {
    const int n = static_cast<int>(trace.size());
    if (n <= window)
        throw std::invalid_argument("convergence_episode: trace not longer than window");
    const double final = mean_of(trace, n - window, n);
    const double threshold = 0.95 * final;
    for (int i = 0; i < n; ++i) {
        const int first = std::max(0, i - smoothing_window + 1);
        const double smoothed = mean_of(trace, first, i + 1);
        if (smoothed >= threshold) return i;
    }
    return n;
}

namespace {

// Per-agent action selection for the planning strategies.
class PlannerDriver {
public:
    explicit PlannerDriver(const RunConfig& config)
        : strategy_(strategy_from_string(config.strategy)),
          settings_(config.make_planner_settings()),
          radius_(config.coverage_radius),
          d_max_(config.d_max) {}

    void on_reset(const Environment& env) {
        if (strategy_ != Strategy::Lawnmower) return;
        plans_.clear();
        for (const auto& region : env.regions())
            plans_.emplace_back(region, radius_, env.grid());
    }

    Eigen::VectorXd joint_action(Environment& env, Rng& rng) {
        env.begin_step();  // planners must see this step's staleness
        Eigen::VectorXd joint(env.action_dim());
        for (int i = 0; i < env.num_agents(); ++i) {
            const Vec2 pos = env.agents()[i].position;
            Vec2 a;
            switch (strategy_) {
                case Strategy::PathMi:
                    a = select_pathmi_action(pos, env.belief(), settings_, d_max_, radius_,
                                             env.grid(), env.operational());
                    break;
                case Strategy::Ucb:
                    a = select_ucb_action(pos, env.belief(), settings_, d_max_, radius_,
                                          env.grid(), env.operational());
                    break;
                case Strategy::Lawnmower:
                    a = plans_[i].next_action(pos, d_max_);
                    break;
                case Strategy::Random:
                    a = select_random_action(rng);
                    break;
            }
            joint.segment<2>(2 * i) = a;
        }
        return joint;
    }

private:
    Strategy strategy_;
    PlannerSettings settings_;
    double radius_;
    double d_max_;
    std::vector<LawnmowerPlan> plans_;
};

void record_episode_metrics(RunMetrics& metrics, const Environment& env, double reward_sum,
                            double variance_sum, int steps, double seconds) {
    metrics.episode_rewards.push_back(reward_sum);
    metrics.episode_mean_variance.push_back(variance_sum / steps);
    std::vector<double> est, truth;
    const Field rho = env.ground_truth();
    const auto& mask = env.operational();
    for (int c = 0; c < env.grid().cell_count(); ++c) {
        if (!mask[c]) continue;
        est.push_back(std::exp(env.belief().log_intensity[c]));
        truth.push_back(rho[c]);
    }
    const auto r = pearson_correlation(est, truth);
    metrics.episode_pearson.push_back(r ? *r : kNan);
    metrics.episode_wall_clock.push_back(seconds);
}

}  // namespace

PhaseOneResult run_planner_episodes(const RunConfig& config, uint64_t seed, int first_episode,
                                    int episode_count, RunMetrics* metrics) {
    Environment env(config.make_env_params(), seed);
    RngStreams streams(seed);
    PlannerDriver driver(config);
    ReplayBuffer demos(static_cast<size_t>(episode_count) * config.steps, config.p_loss);
    Rng thin_rng = streams.stream("replay-thinning", 1);

    for (int e = 0; e < episode_count; ++e) {
        const int episode = first_episode + e;
        Rng planner_rng = streams.stream("planner", episode);
        StateVector state = env.reset(episode);
        driver.on_reset(env);
        double reward_sum = 0.0, variance_sum = 0.0;
        const auto start = std::chrono::steady_clock::now();
        for (int t = 0; t < config.steps; ++t) {
            const Eigen::VectorXd joint = driver.joint_action(env, planner_rng);
            StepOutcome out = env.step(joint);
            demos.push({state.values, joint, out.reward, out.next_state.values, out.terminal},
                       thin_rng);
            reward_sum += out.reward;
            variance_sum += out.telemetry.mean_variance;
            state = out.next_state;
        }
        if (metrics) {
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            record_episode_metrics(*metrics, env, reward_sum, variance_sum, config.steps,
                                   seconds);
        }
    }

    PhaseOneResult result;
    result.final_belief = env.belief();
    result.demonstrations.assign(demos.storage().begin(), demos.storage().end());
    return result;
}

PhaseOneResult run_phase1(const RunConfig& config, uint64_t seed, RunMetrics* metrics) {
    return run_planner_episodes(config, seed, 0, config.warmstart_episodes, metrics);
}

Phase2Result run_phase2(const RunConfig& config, uint64_t seed, const PhaseOneResult* phase1,
                        const Phase2Options& options) {
    if (options.belief_channel && !phase1)
        throw std::invalid_argument("run_phase2: belief channel enabled without phase-1 result");
    if (options.buffer_channel && !phase1)
        throw std::invalid_argument("run_phase2: buffer channel enabled without phase-1 result");

    Environment env(config.make_env_params(), seed);
    RngStreams streams(seed);
    Rng init_rng = streams.stream("net-init");

    Phase2Result out;
    if (options.pretrained) {
        out.agent = *options.pretrained;
    } else {
        out.agent = SacAgent(env.state_dim(), env.action_dim(), config.make_sac_settings(),
                             init_rng);
    }

    ReplayBuffer buffer(config.buffer_capacity, config.p_loss);
    if (options.buffer_channel) buffer.seed_from(phase1->demonstrations);
    out.initial_buffer_size = buffer.size();

    Rng policy_rng = streams.stream("policy");
    Rng thin_rng = streams.stream("replay-thinning", 2);

    for (int episode = config.warmstart_episodes; episode < config.episodes; ++episode) {
        std::optional<Belief> transfer;
        if (episode == config.warmstart_episodes && options.belief_channel)
            transfer = phase1->final_belief;
        StateVector state = env.reset(episode, transfer);
        double reward_sum = 0.0, variance_sum = 0.0;
        const auto start = std::chrono::steady_clock::now();
        try {
            for (int t = 0; t < config.steps; ++t) {
                env.begin_step();
                const Vector action = out.agent.act(state.values, policy_rng);
                StepOutcome o = env.step(action);
                buffer.push({state.values, action, o.reward, o.next_state.values, o.terminal},
                            thin_rng);
                if (static_cast<int>(buffer.size()) >= config.learning_starts)
                    out.agent.train_step(buffer, policy_rng);
                reward_sum += o.reward;
                variance_sum += o.telemetry.mean_variance;
                state = o.next_state;
            }
        } catch (const std::exception&) {
            out.metrics.aborted = true;
            break;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        record_episode_metrics(out.metrics, env, reward_sum, variance_sum, config.steps, seconds);
    }
    return out;
}

Phase2Result run_bc_baseline(const RunConfig& config, uint64_t seed,
                             const PhaseOneResult& phase1) {
    RngStreams streams(seed);
    Rng init_rng = streams.stream("net-init");
    SacAgent agent(3 * config.num_agents + 4, 2 * config.num_agents, config.make_sac_settings(),
                   init_rng);
    if (config.bc_epochs > 0) {
        std::vector<const Transition*> demos;
        demos.reserve(phase1.demonstrations.size());
        for (const auto& t : phase1.demonstrations) demos.push_back(&t);
        Rng bc_rng = streams.stream("bc");
        agent.bc_pretrain(demos, config.bc_epochs, bc_rng);
    }
    Phase2Options options;
    options.belief_channel = false;
    options.buffer_channel = false;
    options.pretrained = &agent;
    return run_phase2(config, seed, &phase1, options);
}

// ---- Suites --------------------------------------------------------------

namespace {

enum class ArmKind { Hbrl, ColdSac, BeliefOnly, BufferOnly, Bc, PureLgcp };

struct SuiteArm {
    std::string name;
    ArmKind kind = ArmKind::Hbrl;
    std::function<void(RunConfig&)> tweak;
};

struct ArmStats {
    double final_reward = kNan;
    double convergence = kNan;
    double mean_variance = kNan;
    double pearson = kNan;
    bool aborted = false;
};

ArmStats stats_from(const RunMetrics& metrics, const RunConfig& config) {
    ArmStats s;
    s.aborted = metrics.aborted;
    if (metrics.episode_rewards.empty()) return s;
    s.final_reward = metrics.final_reward(config.convergence_window);
    const int n = static_cast<int>(metrics.episode_rewards.size());
    s.convergence = n > config.convergence_window
                        ? convergence_episode(metrics.episode_rewards, config.convergence_window,
                                              config.smoothing_window)
                        : n;
    s.mean_variance = metrics.episode_mean_variance.back();
    s.pearson = metrics.episode_pearson.back();
    return s;
}

ArmStats run_arm(const SuiteArm& arm, const RunConfig& base, uint64_t seed,
                 const PhaseOneResult* shared_phase1) {
    RunConfig config = base;
    if (arm.tweak) arm.tweak(config);
    config.validate();
    try {
        switch (arm.kind) {
            case ArmKind::PureLgcp: {
                RunMetrics metrics;
                run_planner_episodes(config, seed, 0, config.episodes, &metrics);
                RunMetrics sliced;  // align with phase-2 traces
                const size_t from = config.warmstart_episodes;
                sliced.episode_rewards.assign(metrics.episode_rewards.begin() + from,
                                              metrics.episode_rewards.end());
                sliced.episode_mean_variance.assign(
                    metrics.episode_mean_variance.begin() + from,
                    metrics.episode_mean_variance.end());
                sliced.episode_pearson.assign(metrics.episode_pearson.begin() + from,
                                              metrics.episode_pearson.end());
                return stats_from(sliced, config);
            }
            case ArmKind::ColdSac: {
                Phase2Options options;
                options.belief_channel = false;
                options.buffer_channel = false;
                return stats_from(run_phase2(config, seed, nullptr, options).metrics, config);
            }
            case ArmKind::Bc: {
                PhaseOneResult local;
                const PhaseOneResult* phase1 = shared_phase1;
                if (!phase1) {
                    local = run_phase1(config, seed);
                    phase1 = &local;
                }
                return stats_from(run_bc_baseline(config, seed, *phase1).metrics, config);
            }
            case ArmKind::Hbrl:
            case ArmKind::BeliefOnly:
            case ArmKind::BufferOnly: {
                Phase2Options options;
                options.belief_channel = arm.kind != ArmKind::BufferOnly;
                options.buffer_channel = arm.kind != ArmKind::BeliefOnly;
                PhaseOneResult local;
                const PhaseOneResult* phase1 = shared_phase1;
                if (!phase1) {
                    local = run_phase1(config, seed);
                    phase1 = &local;
                }
                return stats_from(run_phase2(config, seed, phase1, options).metrics, config);
            }
        }
    } catch (const std::exception&) {
        ArmStats s;
        s.aborted = true;
        return s;
    }
    return {};
}

std::vector<SuiteArm> suite_arms(const std::string& name, const RunConfig& base) {
    std::vector<SuiteArm> arms;
    auto add = [&arms](const std::string& n, ArmKind kind,
                       std::function<void(RunConfig&)> tweak = nullptr) {
        arms.push_back({n, kind, std::move(tweak)});
    };
    if (name == "warm-start") {
        for (int kw : {10, 20, 30, 50})
            add("kw" + std::to_string(kw), ArmKind::Hbrl,
                [kw](RunConfig& c) { c.warmstart_episodes = kw; });
    } else if (name == "horizon") {
        for (int L : {1, 3, 5, 7, 9})
            add("L" + std::to_string(L), ArmKind::Hbrl, [L](RunConfig& c) { c.horizon = L; });
    } else if (name == "agents") {
        for (int n : {2, 3, 4})
            add("N" + std::to_string(n), ArmKind::Hbrl, [n](RunConfig& c) { c.num_agents = n; });
    } else if (name == "penalty") {
        for (const std::string layout : {"disjoint", "partial", "high"})
            for (const std::string mode : {"variance", "fixed", "none"})
                add(mode + "-" + layout, ArmKind::Hbrl, [mode, layout](RunConfig& c) {
                    c.penalty_mode = mode;
                    c.region_layout = layout;
                });
    } else if (name == "decay") {
        add("decay-on", ArmKind::Hbrl);
        add("decay-off", ArmKind::Hbrl, [](RunConfig& c) { c.variance_growth = 0.0; });
    } else if (name == "weights") {
        for (double w : {4.0, 5.0, 6.0})
            add("w1-" + format_double(w), ArmKind::Hbrl, [w](RunConfig& c) { c.w_service = w; });
        for (double w : {0.0, 0.2, 0.4, 0.5, 0.6, 0.8})
            add("w2-" + format_double(w), ArmKind::Hbrl, [w](RunConfig& c) { c.w_explore = w; });
        for (double w : {0.0, 0.5, 1.0, 1.5, 2.0})
            add("w3-" + format_double(w), ArmKind::Hbrl, [w](RunConfig& c) { c.w_coord = w; });
    } else if (name == "experience-loss") {
        for (double p : {0.0, 0.2, 0.4, 0.6, 0.8})
            add("ploss-" + format_double(p), ArmKind::Hbrl,
                [p](RunConfig& c) { c.p_loss = p; });
    } else if (name == "channels") {
        add("none", ArmKind::ColdSac);
        add("belief", ArmKind::BeliefOnly);
        add("buffer", ArmKind::BufferOnly);
        add("both", ArmKind::Hbrl);
    } else if (name == "baselines") {
        add("pure-lgcp", ArmKind::PureLgcp);
        add("cold-sac", ArmKind::ColdSac);
        add("bc", ArmKind::Bc);
        add("hbrl", ArmKind::Hbrl);
    } else {
        throw std::invalid_argument("unknown suite: " + name);
    }
    (void)base;
    return arms;
}

// Suites whose arms share one phase-1 result per seed.
bool suite_shares_phase1(const std::string& name) {
    return name == "channels" || name == "baselines";
}

}  // namespace

const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> names{
        "warm-start", "horizon",        "agents",   "penalty",  "decay",
        "weights",    "experience-loss", "channels", "baselines"};
    return names;
}

void run_jobs(std::vector<std::function<void()>> jobs, int workers) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(jobs.size()));
    if (workers <= 1) {
        for (auto& job : jobs) job();
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                try {
                    jobs[i]();
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

SuiteResult run_suite(const std::string& name, const RunConfig& base, int jobs) {
    const auto arms = suite_arms(name, base);
    const auto& seeds = base.seeds;
    std::vector<std::vector<ArmStats>> stats(arms.size(), std::vector<ArmStats>(seeds.size()));

    std::vector<std::function<void()>> work;
    if (suite_shares_phase1(name)) {
        for (size_t s = 0; s < seeds.size(); ++s) {
            work.push_back([&, s] {
                RunConfig config = base;
                config.validate();
                const PhaseOneResult phase1 = run_phase1(config, seeds[s]);
                for (size_t a = 0; a < arms.size(); ++a)
                    stats[a][s] = run_arm(arms[a], base, seeds[s], &phase1);
            });
        }
    } else {
        for (size_t a = 0; a < arms.size(); ++a)
            for (size_t s = 0; s < seeds.size(); ++s)
                work.push_back([&, a, s] { stats[a][s] = run_arm(arms[a], base, seeds[s], nullptr); });
    }
    run_jobs(std::move(work), jobs);

    SuiteResult result;
    result.suite = name;
    for (size_t a = 0; a < arms.size(); ++a) {
        std::vector<double> finals, convs, vars, pearsons;
        bool any_aborted = false;
        for (size_t s = 0; s < seeds.size(); ++s) {
            const ArmStats& st = stats[a][s];
            result.rows.push_back({arms[a].name, std::to_string(seeds[s]), st.final_reward,
                                   st.convergence, st.mean_variance, st.pearson, st.aborted});
            finals.push_back(st.final_reward);
            convs.push_back(st.convergence);
            vars.push_back(st.mean_variance);
            pearsons.push_back(st.pearson);
            any_aborted = any_aborted || st.aborted;
        }
        result.rows.push_back({arms[a].name, "median", median_of(finals), median_of(convs),
                               median_of(vars), median_of(pearsons), any_aborted});
    }
    return result;
}

std::vector<StrategyRow> run_strategy_comparison(const RunConfig& config, int jobs) {
    const std::vector<std::string> strategies{"pathmi", "ucb", "lawnmower", "random"};
    std::vector<StrategyRow> rows(strategies.size() * config.seeds.size());
    std::vector<std::function<void()>> work;
    for (size_t a = 0; a < strategies.size(); ++a) {
        for (size_t s = 0; s < config.seeds.size(); ++s) {
            work.push_back([&, a, s] {
                RunConfig arm = config;
                arm.strategy = strategies[a];
                arm.validate();
                RunMetrics metrics;
                run_planner_episodes(arm, config.seeds[s], 0, config.appendix_episodes, &metrics);
                StrategyRow row;
                row.strategy = strategies[a];
                row.seed = config.seeds[s];
                row.correlation =
                    metrics.episode_pearson.empty() ? kNan : metrics.episode_pearson.back();
                row.runtime_s = mean_of(metrics.episode_wall_clock, 0,
                                        metrics.episode_wall_clock.size());
                rows[a * config.seeds.size() + s] = row;
            });
        }
    }
    run_jobs(std::move(work), jobs);
    return rows;
}

// ---- Artifacts -------------------------------------------------------------

void save_phase1(const std::string& dir, const PhaseOneResult& result, const RunConfig& config,
                 uint64_t seed) {
    ensure_directory(dir);
    const GridSpec grid = config.make_grid();
    const uint64_t hash = config.hash();
    write_grid_csv(dir + "/belief_log_intensity.csv", result.final_belief.log_intensity, grid,
                   hash);
    write_grid_csv(dir + "/belief_variance.csv", result.final_belief.variance, grid, hash);
    Field counts(grid.cell_count()), staleness(grid.cell_count());
    for (int c = 0; c < grid.cell_count(); ++c) {
        counts[c] = result.final_belief.obs_count[c];
        staleness[c] = result.final_belief.staleness[c];
    }
    write_grid_csv(dir + "/belief_obs_count.csv", counts, grid, hash);
    write_grid_csv(dir + "/belief_staleness.csv", staleness, grid, hash);

    // Transitions: flat little-endian doubles,
    // [state (3N+4) | action (2N) | reward | next_state (3N+4) | terminal].
    std::ofstream bin(dir + "/transitions.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("save_phase1: cannot write transitions.bin");
    for (const auto& t : result.demonstrations) {
        bin.write(reinterpret_cast<const char*>(t.state.data()),
                  static_cast<std::streamsize>(t.state.size() * sizeof(double)));
        bin.write(reinterpret_cast<const char*>(t.action.data()),
                  static_cast<std::streamsize>(t.action.size() * sizeof(double)));
        bin.write(reinterpret_cast<const char*>(&t.reward), sizeof(double));
        bin.write(reinterpret_cast<const char*>(t.next_state.data()),
                  static_cast<std::streamsize>(t.next_state.size() * sizeof(double)));
        const double done = t.terminal ? 1.0 : 0.0;
        bin.write(reinterpret_cast<const char*>(&done), sizeof(double));
    }
    write_manifest(dir + "/manifest.json", config, "phase1", {seed});
}

PhaseOneResult load_phase1(const std::string& dir, const RunConfig& config) {
    const RunConfig stored = config_from_manifest(read_text_file(dir + "/manifest.json"));
    if (stored.hash() != config.hash())
        throw std::runtime_error("load_phase1: stored config does not match the requested one");
    const GridSpec grid = config.make_grid();

    PhaseOneResult result;
    result.final_belief = Belief::prior(grid, config.variance_max);
    result.final_belief.log_intensity = read_grid_csv(dir + "/belief_log_intensity.csv", grid);
    result.final_belief.variance = read_grid_csv(dir + "/belief_variance.csv", grid);
    result.final_belief.predicted_variance = result.final_belief.variance;
    const Field counts = read_grid_csv(dir + "/belief_obs_count.csv", grid);
    const Field staleness = read_grid_csv(dir + "/belief_staleness.csv", grid);
    for (int c = 0; c < grid.cell_count(); ++c) {
        result.final_belief.obs_count[c] = static_cast<int>(counts[c]);
        result.final_belief.staleness[c] = static_cast<int>(staleness[c]);
    }

    const int state_dim = 3 * config.num_agents + 4;
    const int action_dim = 2 * config.num_agents;
    const size_t record_doubles = static_cast<size_t>(2 * state_dim + action_dim + 2);
    std::ifstream bin(dir + "/transitions.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("load_phase1: cannot open transitions.bin");
    std::vector<double> record(record_doubles);
    while (bin.read(reinterpret_cast<char*>(record.data()),
                    static_cast<std::streamsize>(record_doubles * sizeof(double)))) {
        Transition t;
        t.state = Eigen::Map<Vector>(record.data(), state_dim);
        t.action = Eigen::Map<Vector>(record.data() + state_dim, action_dim);
        t.reward = record[state_dim + action_dim];
        t.next_state = Eigen::Map<Vector>(record.data() + state_dim + action_dim + 1, state_dim);
        t.terminal = record[record_doubles - 1] != 0.0;
        result.demonstrations.push_back(std::move(t));
    }
    return result;
}

void write_metrics(const std::string& dir, const std::string& name, const RunMetrics& metrics,
                   const RunConfig& config, uint64_t seed, int first_episode) {
    ensure_directory(dir);
    CsvBuilder csv(config.hash(), {"episode", "reward", "mean_variance", "pearson"});
    for (size_t i = 0; i < metrics.episode_rewards.size(); ++i) {
        csv.add_row({std::to_string(first_episode + static_cast<int>(i)),
                     format_double(metrics.episode_rewards[i]),
                     format_double(metrics.episode_mean_variance[i]),
                     format_double(metrics.episode_pearson[i])});
    }
    csv.write(dir + "/" + name + ".csv");
    write_manifest(dir + "/" + name + ".manifest.json", config, name, {seed});
}

void write_suite_csv(const std::string& dir, const SuiteResult& result, const RunConfig& config) {
    ensure_directory(dir);
    CsvBuilder csv(config.hash(), {"suite", "arm", "seed", "final_reward", "convergence_episode",
                                   "mean_variance", "pearson", "aborted"});
    for (const auto& row : result.rows) {
        csv.add_row({result.suite, row.arm, row.seed, format_double(row.final_reward),
                     format_double(row.convergence), format_double(row.mean_variance),
                     format_double(row.pearson), row.aborted ? "1" : "0"});
    }
    csv.write(dir + "/suite_" + result.suite + ".csv");
    write_manifest(dir + "/suite_" + result.suite + ".manifest.json", config,
                   "suite:" + result.suite, config.seeds);
}

void write_strategy_csv(const std::string& dir, const std::vector<StrategyRow>& rows,
                        const RunConfig& config) {
    ensure_directory(dir);
    CsvBuilder csv(config.hash(), {"strategy", "seed", "correlation", "runtime_s"});
    for (const auto& row : rows) {
        csv.add_row({row.strategy, std::to_string(row.seed), format_double(row.correlation),
                     format_double(row.runtime_s)});
    }
    csv.write(dir + "/strategy_comparison.csv");
    write_manifest(dir + "/strategy_comparison.manifest.json", config, "appendix-a",
                   config.seeds);
}

}  // namespace scoutrl

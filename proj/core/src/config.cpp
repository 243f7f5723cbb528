#include "scoutrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "scoutrl/rng.hpp"

namespace scoutrl {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("expected boolean, got '" + v + "'");
}

std::vector<uint64_t> parse_seed_list(const std::string& v) {
    std::vector<uint64_t> seeds;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct FieldBinding {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<std::pair<std::string, FieldBinding>>& bindings() {
    static const auto* table = [] {
        auto* t = new std::vector<std::pair<std::string, FieldBinding>>();
        auto add_double = [t](const std::string& key, double RunConfig::* field) {
            t->push_back({key,
                          {[field](RunConfig& c, const std::string& v) { c.*field = std::stod(v); },
                           [field](const RunConfig& c) { return format_double(c.*field); }}});
        };
        auto add_int = [t](const std::string& key, int RunConfig::* field) {
            t->push_back({key,
                          {[field](RunConfig& c, const std::string& v) { c.*field = std::stoi(v); },
                           [field](const RunConfig& c) { return std::to_string(c.*field); }}});
        };
        auto add_bool = [t](const std::string& key, bool RunConfig::* field) {
            t->push_back({key,
                          {[field](RunConfig& c, const std::string& v) { c.*field = parse_bool(v); },
                           [field](const RunConfig& c) { return c.*field ? "true" : "false"; }}});
        };
        auto add_string = [t](const std::string& key, std::string RunConfig::* field) {
            t->push_back({key,
                          {[field](RunConfig& c, const std::string& v) { c.*field = v; },
                           [field](const RunConfig& c) { return c.*field; }}});
        };

        add_double("length_x", &RunConfig::length_x);
        add_double("length_y", &RunConfig::length_y);
        add_double("resolution", &RunConfig::resolution);
        add_int("num_agents", &RunConfig::num_agents);
        add_double("coverage_radius", &RunConfig::coverage_radius);
        add_double("d_max", &RunConfig::d_max);
        add_int("hotspots_min", &RunConfig::hotspots_min);
        add_int("hotspots_max", &RunConfig::hotspots_max);
        add_double("hotspot_spread_min", &RunConfig::hotspot_spread_min);
        add_double("hotspot_spread_max", &RunConfig::hotspot_spread_max);
        add_double("hotspot_drift_rate", &RunConfig::hotspot_drift_rate);
        add_double("hotspot_drift_bound", &RunConfig::hotspot_drift_bound);
        add_double("reset_perturbation", &RunConfig::reset_perturbation);
        add_int("sampling_trials", &RunConfig::sampling_trials);
        add_double("request_prob", &RunConfig::request_prob);
        add_string("region_layout", &RunConfig::region_layout);

        add_double("tau", &RunConfig::tau);
        add_double("beta", &RunConfig::beta);
        add_int("newton_iters", &RunConfig::newton_iters);
        add_int("pcg_iters", &RunConfig::pcg_iters);
        add_double("pcg_tol", &RunConfig::pcg_tol);
        add_double("log_intensity_clamp", &RunConfig::log_intensity_clamp);
        add_double("variance_growth", &RunConfig::variance_growth);
        add_double("variance_max", &RunConfig::variance_max);
        add_double("variance_min", &RunConfig::variance_min);
        add_bool("degree_aware_variance", &RunConfig::degree_aware_variance);

        add_string("strategy", &RunConfig::strategy);
        add_int("horizon", &RunConfig::horizon);
        add_double("staleness_weight", &RunConfig::staleness_weight);
        add_double("max_staleness", &RunConfig::max_staleness);
        add_double("ucb_kappa", &RunConfig::ucb_kappa);
        add_double("planner_epsilon", &RunConfig::planner_epsilon);
        add_bool("normalize_diagonals", &RunConfig::normalize_diagonals);

        add_double("w_service", &RunConfig::w_service);
        add_double("w_explore", &RunConfig::w_explore);
        add_double("w_coord", &RunConfig::w_coord);
        add_string("penalty_mode", &RunConfig::penalty_mode);
        add_double("travel_scale", &RunConfig::travel_scale);

        add_int("episodes", &RunConfig::episodes);
        add_int("warmstart_episodes", &RunConfig::warmstart_episodes);
        add_int("steps", &RunConfig::steps);

        add_int("hidden_units", &RunConfig::hidden_units);
        add_double("learning_rate", &RunConfig::learning_rate);
        add_int("batch", &RunConfig::batch);
        add_double("gamma", &RunConfig::gamma);
        add_double("tau_soft", &RunConfig::tau_soft);
        add_int("buffer_capacity", &RunConfig::buffer_capacity);
        add_int("learning_starts", &RunConfig::learning_starts);
        add_double("p_loss", &RunConfig::p_loss);
        add_double("alpha_init", &RunConfig::alpha_init);
        add_int("bc_epochs", &RunConfig::bc_epochs);
        add_string("demo_reward_mode", &RunConfig::demo_reward_mode);

        add_bool("transfer_belief", &RunConfig::transfer_belief);
        add_bool("transfer_buffer", &RunConfig::transfer_buffer);

        add_int("convergence_window", &RunConfig::convergence_window);
        add_int("smoothing_window", &RunConfig::smoothing_window);
        add_int("appendix_episodes", &RunConfig::appendix_episodes);

        t->push_back({"seeds",
                      {[](RunConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); },
                       [](const RunConfig& c) {
                           std::string out;
                           for (size_t i = 0; i < c.seeds.size(); ++i) {
                               if (i) out += ",";
                               out += std::to_string(c.seeds[i]);
                           }
                           return out;
                       }}});
        return t;
    }();
    return *table;
}

const FieldBinding* find_binding(const std::string& key) {
    for (const auto& [name, binding] : bindings())
        if (name == key) return &binding;
    return nullptr;
}

}  // namespace

EnvParams RunConfig::make_env_params() const {
    EnvParams p;
    p.grid = make_grid();
    p.regions = make_regions(p.grid, num_agents, region_layout_from_string(region_layout));
    p.scenario = ScenarioParams{hotspots_min,        hotspots_max,      hotspot_spread_min,
                                hotspot_spread_max,  hotspot_drift_rate, hotspot_drift_bound,
                                sampling_trials,     request_prob};
    p.coverage_radius = coverage_radius;
    p.d_max = d_max;
    p.reset_perturbation = reset_perturbation;
    p.episode_steps = steps;
    p.tau = tau;
    p.beta = beta;
    p.solver = SolverSettings{newton_iters, pcg_iters, pcg_tol, log_intensity_clamp, 4};
    p.variance_growth = variance_growth;
    p.variance_max = variance_max;
    p.variance_min = variance_min;
    p.degree_aware_variance = degree_aware_variance;
    p.weights = RewardWeights{w_service, w_explore, w_coord, travel_scale};
    p.penalty_mode = penalty_mode_from_string(penalty_mode);
    return p;
}

PlannerSettings RunConfig::make_planner_settings() const {
    PlannerSettings s;
    s.horizon = horizon;
    s.staleness_weight = staleness_weight;
    s.max_staleness = max_staleness > 0.0 ? max_staleness : static_cast<double>(steps);
    s.ucb_kappa = ucb_kappa;
    s.epsilon = planner_epsilon;
    s.normalize_diagonals = normalize_diagonals;
    return s;
}

SacSettings RunConfig::make_sac_settings() const {
    SacSettings s;
    s.hidden = {hidden_units, hidden_units};
    s.learning_rate = learning_rate;
    s.discount = gamma;
    s.polyak = tau_soft;
    s.batch = batch;
    s.alpha_init = alpha_init;
    s.learning_starts = learning_starts;
    return s;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config: " + field + " " + why);
    };
    if (resolution <= 0.0) fail("resolution", "must be > 0");
    if (length_x < resolution || length_y < resolution) fail("length_x/length_y", "smaller than one cell");
    if (num_agents < 1) fail("num_agents", "must be >= 1");
    if (coverage_radius < 0.0) fail("coverage_radius", "must be >= 0");
    if (d_max <= 0.0) fail("d_max", "must be > 0");
    if (hotspots_min < 1 || hotspots_max < hotspots_min) fail("hotspots_min/max", "bad range");
    if (hotspot_spread_min <= 0.0 || hotspot_spread_max < hotspot_spread_min)
        fail("hotspot_spread_min/max", "bad range");
    if (sampling_trials < 1) fail("sampling_trials", "must be >= 1");
    if (request_prob <= 0.0 || request_prob > 1.0) fail("request_prob", "must be in (0,1]");
    if (tau <= 0.0) fail("tau", "must be > 0");
    if (beta < 0.0) fail("beta", "must be >= 0");
    if (newton_iters < 1) fail("newton_iters", "must be >= 1");
    if (pcg_iters < 1) fail("pcg_iters", "must be >= 1");
    if (pcg_tol <= 0.0) fail("pcg_tol", "must be > 0");
    if (variance_max <= 0.0 || variance_min <= 0.0 || variance_min > variance_max)
        fail("variance_min/max", "bad range");
    if (variance_growth < 0.0) fail("variance_growth", "must be >= 0");
    if (horizon < 1) fail("horizon", "must be >= 1");
    if (episodes < 1) fail("episodes", "must be >= 1");
    if (warmstart_episodes < 0) fail("warmstart_episodes", "must be >= 0");
    if (warmstart_episodes >= episodes) fail("warmstart_episodes", "must be < episodes");
    if (steps < 1) fail("steps", "must be >= 1");
    if (hidden_units < 1) fail("hidden_units", "must be >= 1");
    if (batch < 1) fail("batch", "must be >= 1");
    if (gamma < 0.0 || gamma >= 1.0) fail("gamma", "must be in [0,1)");
    if (tau_soft < 0.0 || tau_soft > 1.0) fail("tau_soft", "must be in [0,1]");
    if (buffer_capacity < 1) fail("buffer_capacity", "must be >= 1");
    if (learning_starts < 1) fail("learning_starts", "must be >= 1");
    if (p_loss < 0.0 || p_loss >= 1.0) fail("p_loss", "must be in [0,1)");
    if (alpha_init <= 0.0) fail("alpha_init", "must be > 0");
    if (bc_epochs < 0) fail("bc_epochs", "must be >= 0");
    if (demo_reward_mode != "recorded") fail("demo_reward_mode", "only 'recorded' is supported");
    if (convergence_window < 1) fail("convergence_window", "must be >= 1");
    if (smoothing_window < 1) fail("smoothing_window", "must be >= 1");
    if (appendix_episodes < 1) fail("appendix_episodes", "must be >= 1");
    if (seeds.empty()) fail("seeds", "must not be empty");
    strategy_from_string(strategy);
    penalty_mode_from_string(penalty_mode);
    region_layout_from_string(region_layout);
}

std::string RunConfig::resolved_text() const {
    std::string out;
    for (const auto& [name, binding] : bindings()) {
        out += name;
        out += " = ";
        out += binding.get(*this);
        out += "\n";
    }
    return out;
}

uint64_t RunConfig::hash() const { return fnv1a64(resolved_text()); }

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    RunConfig config = base;
    std::stringstream ss(text);
    std::string line;
    int line_number = 0;
    while (std::getline(ss, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config parse error at line " +
                                        std::to_string(line_number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const FieldBinding* binding = find_binding(key);
        if (!binding)
            throw std::invalid_argument("config parse error at line " +
                                        std::to_string(line_number) + ": unknown key '" + key +
                                        "'");
        try {
            binding->set(config, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config parse error at line " +
                                        std::to_string(line_number) + " (" + key +
                                        "): " + e.what());
        }
    }
    return config;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig config;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        config = parse_config(buffer.str());
    }
    for (const auto& kv : overrides) apply_override(config, kv);
    config.validate();
    return config;
}

void apply_override(RunConfig& config, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " + key_value);
    const std::string key = trim(key_value.substr(0, eq));
    const std::string value = trim(key_value.substr(eq + 1));
    const FieldBinding* binding = find_binding(key);
    if (!binding) throw std::invalid_argument("override: unknown key '" + key + "'");
    binding->set(config, value);
}

void apply_desk_scale(RunConfig& config) {
    config.length_x = 1000.0;
    config.length_y = 1000.0;
    config.resolution = 25.0;  // 40x40 grid
    config.steps = 100;
    config.episodes = 80;
    config.warmstart_episodes = 10;
    config.hidden_units = 64;
    config.batch = 64;
}

void apply_appendix_scenario(RunConfig& config, bool full_scale) {
    config.length_x = 1000.0;
    config.length_y = 1000.0;
    config.resolution = full_scale ? 10.0 : 25.0;
    config.num_agents = 2;
    config.coverage_radius = 100.0;
    config.hotspots_min = 2;
    config.hotspots_max = 2;
    config.steps = 150;
    config.region_layout = "disjoint";
    config.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
}

}  // namespace scoutrl

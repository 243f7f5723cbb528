#include "scoutrl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scoutrl {

Strategy strategy_from_string(const std::string& s) {
    if (s == "pathmi") return Strategy::PathMi;
    if (s == "ucb") return Strategy::Ucb;
    if (s == "lawnmower") return Strategy::Lawnmower;
    if (s == "random") return Strategy::Random;
    throw std::invalid_argument("unknown strategy: " + s);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::PathMi: return "pathmi";
        case Strategy::Ucb: return "ucb";
        case Strategy::Lawnmower: return "lawnmower";
        case Strategy::Random: return "random";
    }
    return "pathmi";
}

namespace {

Vec2 direction_vector(int index, bool normalize_diagonals) {
    Vec2 d(kDirections[index][0], kDirections[index][1]);
    if (normalize_diagonals && d.x() != 0.0 && d.y() != 0.0) d /= std::numbers::sqrt2;
    return d;
}

}  // namespace

std::vector<CandidatePath> candidate_paths(const Vec2& position, const PlannerSettings& settings,
                                           double d_max, const GridSpec& grid) {
    if (settings.horizon < 1) throw std::invalid_argument("candidate_paths: horizon must be >= 1");
    std::vector<CandidatePath> paths(kDirections.size());
    for (int d = 0; d < static_cast<int>(kDirections.size()); ++d) {
        const Vec2 dir = direction_vector(d, settings.normalize_diagonals);
        paths[d].direction_index = d;
        paths[d].waypoints.reserve(settings.horizon);
        for (int step = 1; step <= settings.horizon; ++step)
            paths[d].waypoints.push_back(grid.clip(position + step * d_max * dir));
    }
    return paths;
}

std::vector<int> path_coverage(const CandidatePath& path, double radius, const GridSpec& grid,
                               const std::vector<uint8_t>& operational) {
    std::vector<uint8_t> seen(grid.cell_count(), 0);
    std::vector<int> cells;
    for (const Vec2& w : path.waypoints) {
        for (int c : footprint(w, radius, grid)) {
            if (!operational[c] || seen[c]) continue;
            seen[c] = 1;
            cells.push_back(c);
        }
    }
    return cells;
}

double pathmi_score(const CandidatePath& path, const Belief& belief,
                    const PlannerSettings& settings) {
    double score = 0.0;
    for (int c : path.covered_cells) {
        const double xi = 1.0 / (1.0 + belief.obs_count[c]);
        const double stale =
            std::min(belief.staleness[c] / settings.max_staleness, 1.0);
        score += (xi + settings.staleness_weight * stale) * belief.variance[c];
    }
    return score;
}

namespace {

Vec2 steer_toward(const Vec2& waypoint, const Vec2& position, double epsilon) {
    const Vec2 delta = waypoint - position;
    Vec2 a = delta / std::max(delta.norm(), epsilon);
    a.x() = std::clamp(a.x(), -1.0, 1.0);
    a.y() = std::clamp(a.y(), -1.0, 1.0);
    return a;
}

}  // namespace

Vec2 select_pathmi_action(const Vec2& position, const Belief& belief,
                          const PlannerSettings& settings, double d_max, double radius,
                          const GridSpec& grid, const std::vector<uint8_t>& operational) {
    auto paths = candidate_paths(position, settings, d_max, grid);
    int best = 0;
    double best_score = -1.0;
    for (auto& p : paths) {
        p.covered_cells = path_coverage(p, radius, grid, operational);
        p.score = pathmi_score(p, belief, settings);
        if (p.score > best_score) {
            best_score = p.score;
            best = p.direction_index;
        }
    }
    return steer_toward(paths[best].waypoints.front(), position, settings.epsilon);
}

Vec2 select_ucb_action(const Vec2& position, const Belief& belief,
                       const PlannerSettings& settings, double d_max, double radius,
                       const GridSpec& grid, const std::vector<uint8_t>& operational) {
    int best = 0;
    double best_score = -1.0;
    for (int d = 0; d < static_cast<int>(kDirections.size()); ++d) {
        const Vec2 dir = direction_vector(d, settings.normalize_diagonals);
        const Vec2 waypoint = grid.clip(position + d_max * dir);
        double score = 0.0;
        for (int c : footprint(waypoint, radius, grid)) {
            if (!operational[c]) continue;
            score += std::exp(belief.log_intensity[c]) +
                     settings.ucb_kappa * std::sqrt(belief.variance[c]);
        }
        if (score > best_score) {
            best_score = score;
            best = d;
        }
    }
    return direction_vector(best, settings.normalize_diagonals);
}

LawnmowerPlan::LawnmowerPlan(const OperationalRegion& region, double radius,
                             const GridSpec& grid) {
    const Vec2 lo = region.world_min(grid);
    const Vec2 hi = region.world_max(grid);
    double x_left = lo.x() + radius;
    double x_right = hi.x() - radius;
    if (x_left > x_right) x_left = x_right = 0.5 * (lo.x() + hi.x());
    std::vector<double> lanes;
    for (double y = lo.y() + radius; y <= hi.y() - radius + 1e-9; y += 2.0 * radius)
        lanes.push_back(y);
    if (lanes.empty()) lanes.push_back(0.5 * (lo.y() + hi.y()));
    bool eastbound = true;
    for (double y : lanes) {
        if (eastbound) {
            waypoints_.emplace_back(x_left, y);
            waypoints_.emplace_back(x_right, y);
        } else {
            waypoints_.emplace_back(x_right, y);
            waypoints_.emplace_back(x_left, y);
        }
        eastbound = !eastbound;
    }
}

Vec2 LawnmowerPlan::next_action(const Vec2& position, double d_max) {
    if (waypoints_.empty()) return Vec2::Zero();
    // Advance past waypoints we are standing on; wrap to restart the sweep.
    for (size_t tried = 0; tried < waypoints_.size(); ++tried) {
        if ((waypoints_[target_] - position).norm() > 1e-9) break;
        target_ = (target_ + 1) % waypoints_.size();
    }
    const Vec2 delta = waypoints_[target_] - position;
    if (delta.norm() <= 1e-9) return Vec2::Zero();
    Vec2 a = delta / d_max;
    a.x() = std::clamp(a.x(), -1.0, 1.0);
    a.y() = std::clamp(a.y(), -1.0, 1.0);
    return a;
}

Vec2 select_random_action(Rng& rng) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(kDirections.size()) - 1);
    const auto& d = kDirections[pick(rng)];
    return Vec2(d[0], d[1]);
}

}  // namespace scoutrl

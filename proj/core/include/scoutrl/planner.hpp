#pragma once

#include <array>
#include <string>
#include <vector>

#include "scoutrl/belief.hpp"
#include "scoutrl/grid.hpp"
#include "scoutrl/rng.hpp"

namespace scoutrl {

enum class Strategy { PathMi, Ucb, Lawnmower, Random };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

// Candidate direction set, in tie-break order: E, W, N, S, NE, NW, SE, SW.
// Diagonals are the raw (+-1,+-1) vectors; waypoints advance sqrt(2)*d_max
// along diagonals while executed actions stay clipped to [-1,1]^2.
inline constexpr std::array<std::array<double, 2>, 8> kDirections{{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1},
}};

struct PlannerSettings {
    int horizon = 5;             // L waypoints per candidate
    double staleness_weight = 0.1;
    double max_staleness = 200.0;  // s_max, normally the episode length
    double ucb_kappa = 2.0;
    double epsilon = 1e-6;
    bool normalize_diagonals = false;
};

struct CandidatePath {
    int direction_index = 0;
    std::vector<Vec2> waypoints;   // length = horizon, clipped to the area
    std::vector<int> covered_cells;  // union of waypoint footprints within the mask
    double score = 0.0;
};

// The eight straight-line candidates from `position`.
std::vector<CandidatePath> candidate_paths(const Vec2& position, const PlannerSettings& settings,
                                           double d_max, const GridSpec& grid);

// Union of waypoint footprints, restricted to operational cells.
std::vector<int> path_coverage(const CandidatePath& path, double radius, const GridSpec& grid,
                               const std::vector<uint8_t>& operational);

// Sum over covered cells of [xi_c + w_s * min(s_c/s_max, 1)] * sigma_c^2
// with xi_c = 1/(1 + n_c).
double pathmi_score(const CandidatePath& path, const Belief& belief,
                    const PlannerSettings& settings);

// Receding-horizon selection: score all candidates, take the argmax
// (ties -> lowest direction index), steer toward its first waypoint.
Vec2 select_pathmi_action(const Vec2& position, const Belief& belief,
                          const PlannerSettings& settings, double d_max, double radius,
                          const GridSpec& grid, const std::vector<uint8_t>& operational);

// One-step greedy on sum over the footprint of exp(u_c) + kappa * sigma_c.
Vec2 select_ucb_action(const Vec2& position, const Belief& belief,
                       const PlannerSettings& settings, double d_max, double radius,
                       const GridSpec& grid, const std::vector<uint8_t>& operational);

// Serpentine sweep over one agent's region with lane spacing 2*radius,
// restarting from the first lane after a full pass.
class LawnmowerPlan {
public:
    LawnmowerPlan() = default;
    LawnmowerPlan(const OperationalRegion& region, double radius, const GridSpec& grid);

    Vec2 next_action(const Vec2& position, double d_max);

private:
    std::vector<Vec2> waypoints_;
    size_t target_ = 0;
};

Vec2 select_random_action(Rng& rng);

}  // namespace scoutrl

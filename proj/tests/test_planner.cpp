#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "scoutrl/planner.hpp"
#include "support/oracles.hpp"

using namespace scoutrl;

namespace {

std::vector<uint8_t> full_mask(const GridSpec& g) {
    return std::vector<uint8_t>(g.cell_count(), 1);
}

// Independent scoring used as the argmax oracle.
double oracle_score(const std::vector<int>& cells, const Belief& b, double ws, double smax) {
    double s = 0.0;
    for (int c : cells)
        s += (1.0 / (1.0 + b.obs_count[c]) + ws * std::min(b.staleness[c] / smax, 1.0)) *
             b.variance[c];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("planner");

TEST_CASE("candidate paths extend clipped straight lines") {
    GridSpec g(2000.0, 2000.0, 20.0);
    PlannerSettings s;
    SUBCASE("eastbound waypoints advance by d_max") {
        const auto paths = candidate_paths(Vec2(1000.0, 1000.0), s, 15.0, g);
        REQUIRE(paths.size() == 8);
        for (int l = 0; l < 5; ++l) {
            CHECK(paths[0].waypoints[l].x() == doctest::Approx(1000.0 + 15.0 * (l + 1)));
            CHECK(paths[0].waypoints[l].y() == 1000.0);
        }
    }
    SUBCASE("the corner clips the southwest path onto itself") {
        const auto paths = candidate_paths(Vec2(0.0, 0.0), s, 15.0, g);
        for (const Vec2& w : paths[7].waypoints) CHECK(w == Vec2(0.0, 0.0));  // SW
    }
    SUBCASE("eight pairwise distinct directions") {
        const auto paths = candidate_paths(Vec2(1000.0, 1000.0), s, 15.0, g);
        std::map<std::pair<double, double>, int> seen;
        for (const auto& p : paths) {
            const Vec2 first = p.waypoints.front();
            ++seen[{first.x(), first.y()}];
        }
        CHECK(seen.size() == 8);
    }
    SUBCASE("diagonal waypoints advance sqrt(2) d_max unless normalized") {
        const auto literal = candidate_paths(Vec2(1000.0, 1000.0), s, 15.0, g);
        CHECK((literal[4].waypoints[0] - Vec2(1000.0, 1000.0)).norm() ==
              doctest::Approx(15.0 * std::sqrt(2.0)));
        PlannerSettings normalized = s;
        normalized.normalize_diagonals = true;
        const auto unit = candidate_paths(Vec2(1000.0, 1000.0), normalized, 15.0, g);
        CHECK((unit[4].waypoints[0] - Vec2(1000.0, 1000.0)).norm() == doctest::Approx(15.0));
    }
}

TEST_CASE("path coverage is the union of waypoint footprints") {
    GridSpec g(600.0, 600.0, 20.0);  // 30x30
    PlannerSettings s;
    const auto mask = full_mask(g);
    SUBCASE("a single waypoint equals its footprint") {
        PlannerSettings one = s;
        one.horizon = 1;
        auto paths = candidate_paths(Vec2(300.0, 300.0), one, 15.0, g);
        auto cells = path_coverage(paths[0], 50.0, g, mask);
        std::sort(cells.begin(), cells.end());
        auto expected = footprint(paths[0].waypoints[0], 50.0, g);
        std::sort(expected.begin(), expected.end());
        CHECK(cells == expected);
    }
    SUBCASE("overlapping footprints are counted once") {
        auto paths = candidate_paths(Vec2(300.0, 300.0), s, 15.0, g);
        size_t total = 0;
        for (const Vec2& w : paths[0].waypoints) total += footprint(w, 50.0, g).size();
        const auto cells = path_coverage(paths[0], 50.0, g, mask);
        CHECK(cells.size() < total);
    }
    SUBCASE("matches a brute-force union oracle") {
        Rng rng(1);
        std::uniform_real_distribution<double> u(0.0, 600.0);
        for (int trial = 0; trial < 20; ++trial) {
            auto paths = candidate_paths(Vec2(u(rng), u(rng)), s, 25.0, g);
            for (const auto& p : paths) {
                std::set<int> expected;
                for (const Vec2& w : p.waypoints)
                    for (int c : oracle::brute_force_footprint(w, 60.0, g)) expected.insert(c);
                auto cells = path_coverage(p, 60.0, g, mask);
                std::sort(cells.begin(), cells.end());
                CHECK(cells == std::vector<int>(expected.begin(), expected.end()));
            }
        }
    }
}

TEST_CASE("pathmi score combines novelty, staleness and variance") {
    GridSpec g(600.0, 600.0, 20.0);
    Belief b = Belief::prior(g);
    PlannerSettings s;
    s.staleness_weight = 0.1;
    s.max_staleness = 200.0;
    CandidatePath path;
    path.covered_cells = {0, 1, 2, 3, 4, 5, 6};

    SUBCASE("unvisited fully stale cells score 1.1 each") {
        for (int c : path.covered_cells) b.staleness[c] = 200;
        CHECK(pathmi_score(path, b, s) ==
              doctest::Approx(1.1 * path.covered_cells.size()).epsilon(1e-12));
    }
    SUBCASE("large counts with zero staleness vanish") {
        for (int c : path.covered_cells) b.obs_count[c] = 100000000;
        CHECK(pathmi_score(path, b, s) < 1e-6);
    }
    SUBCASE("one observation halves the novelty term") {
        PlannerSettings no_stale = s;
        no_stale.staleness_weight = 0.0;
        const double fresh = pathmi_score(path, b, no_stale);
        for (int c : path.covered_cells) b.obs_count[c] = 1;
        CHECK(pathmi_score(path, b, no_stale) == doctest::Approx(fresh / 2.0).epsilon(1e-12));
    }
    SUBCASE("monotone in any covered cell's variance") {
        Rng rng(2);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        for (int c : path.covered_cells) {
            b.variance[c] = u(rng);
            b.staleness[c] = 13;
            b.obs_count[c] = 2;
        }
        const double before = pathmi_score(path, b, s);
        b.variance[3] += 0.1;
        CHECK(pathmi_score(path, b, s) > before);
    }
}

TEST_CASE("pathmi action selection") {
    SUBCASE("east-half variance pulls the agent east") {
        GridSpec g(1000.0, 1000.0, 20.0);
        Belief b = Belief::prior(g);
        for (int c = 0; c < g.cell_count(); ++c)
            if (g.cell_center(g.cell_at(c)).x() <= 500.0) b.variance[c] = 0.01;
        PlannerSettings s;
        s.horizon = 1;
        const auto mask = full_mask(g);
        const Vec2 action = select_pathmi_action(Vec2(500.0, 500.0), b, s, 15.0, 100.0, g, mask);
        CHECK(action.x() == doctest::Approx(1.0));
        CHECK(action.y() == doctest::Approx(0.0));

        // Cross-check the selection against independent scoring of all paths.
        auto paths = candidate_paths(Vec2(500.0, 500.0), s, 15.0, g);
        double best = -1.0;
        int best_index = 0;
        for (auto& p : paths) {
            p.covered_cells = path_coverage(p, 100.0, g, mask);
            const double score = oracle_score(p.covered_cells, b, s.staleness_weight,
                                              s.max_staleness);
            if (score > best) {
                best = score;
                best_index = p.direction_index;
            }
        }
        CHECK(best_index == 0);
    }
    SUBCASE("exact ties resolve to the first direction") {
        GridSpec g(100.0, 100.0, 20.0);  // 5x5
        Belief b = Belief::prior(g);
        PlannerSettings s;
        const Vec2 action =
            select_pathmi_action(Vec2(50.0, 50.0), b, s, 15.0, 1000.0, g, full_mask(g));
        CHECK(action.x() == doctest::Approx(1.0));
        CHECK(action.y() == doctest::Approx(0.0));
    }
    SUBCASE("coinciding first waypoint yields a zero action") {
        GridSpec g(20.0, 20.0, 20.0);  // single cell
        Belief b = Belief::prior(g);
        PlannerSettings s;
        const Vec2 action =
            select_pathmi_action(Vec2(20.0, 10.0), b, s, 15.0, 50.0, g, full_mask(g));
        CHECK(action == Vec2(0.0, 0.0));
    }
    SUBCASE("scaling all variances does not change the selection") {
        GridSpec g(600.0, 600.0, 20.0);
        PlannerSettings s;
        Rng rng(3);
        std::uniform_real_distribution<double> u(0.05, 0.5);
        Belief b = Belief::prior(g);
        for (int c = 0; c < g.cell_count(); ++c) b.variance[c] = u(rng);
        const Vec2 a1 = select_pathmi_action(Vec2(280.0, 300.0), b, s, 15.0, 60.0, g, full_mask(g));
        b.variance *= 2.0;
        const Vec2 a2 = select_pathmi_action(Vec2(280.0, 300.0), b, s, 15.0, 60.0, g, full_mask(g));
        CHECK(a1 == a2);
    }
    SUBCASE("selection is stateless") {
        GridSpec g(600.0, 600.0, 20.0);
        PlannerSettings s;
        Rng rng(4);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        Belief b = Belief::prior(g);
        for (int c = 0; c < g.cell_count(); ++c) b.variance[c] = u(rng);
        const Vec2 a1 = select_pathmi_action(Vec2(99.0, 471.0), b, s, 15.0, 60.0, g, full_mask(g));
        const Vec2 a2 = select_pathmi_action(Vec2(99.0, 471.0), b, s, 15.0, 60.0, g, full_mask(g));
        CHECK(a1 == a2);
    }
}

TEST_CASE("pathmi with unit horizon and no staleness is greedy variance-sum") {
    GridSpec g(600.0, 600.0, 20.0);
    PlannerSettings s;
    s.horizon = 1;
    s.staleness_weight = 0.0;
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Belief b = Belief::prior(g);
    for (int c = 0; c < g.cell_count(); ++c) b.variance[c] = u(rng);
    const auto mask = full_mask(g);

    for (int trial = 0; trial < 10; ++trial) {
        const Vec2 pos(u(rng) * 600.0, u(rng) * 600.0);
        // Direct greedy: argmax over directions of the one-step variance sum.
        int greedy = 0;
        double best = -1.0;
        for (int d = 0; d < 8; ++d) {
            const Vec2 dir(kDirections[d][0], kDirections[d][1]);
            const Vec2 w = g.clip(pos + 15.0 * dir);
            double score = 0.0;
            for (int c : footprint(w, 60.0, g)) score += b.variance[c];
            if (score > best) {
                best = score;
                greedy = d;
            }
        }
        auto paths = candidate_paths(pos, s, 15.0, g);
        const Vec2 expected_action =
            (paths[greedy].waypoints[0] - pos) /
            std::max((paths[greedy].waypoints[0] - pos).norm(), s.epsilon);
        const Vec2 got = select_pathmi_action(pos, b, s, 15.0, 60.0, g, mask);
        CHECK((got - expected_action).norm() <= 1e-12);
    }
}

TEST_CASE("ucb action selection") {
    GridSpec g(1000.0, 1000.0, 20.0);
    const auto mask = full_mask(g);
    SUBCASE("uniform belief ties to the first direction") {
        Belief b = Belief::prior(g);
        PlannerSettings s;
        const Vec2 a = select_ucb_action(Vec2(500.0, 500.0), b, s, 15.0, 100.0, g, mask);
        CHECK(a == Vec2(1.0, 0.0));
    }
    SUBCASE("kappa zero is intensity-greedy") {
        Belief b = Belief::prior(g);
        for (int c = 0; c < g.cell_count(); ++c)
            if (g.cell_center(g.cell_at(c)).x() < 450.0) b.log_intensity[c] = 1.0;
        PlannerSettings s;
        s.ucb_kappa = 0.0;
        const Vec2 a = select_ucb_action(Vec2(500.0, 500.0), b, s, 15.0, 100.0, g, mask);
        CHECK(a == Vec2(-1.0, 0.0));
    }
    SUBCASE("a high-variance lobe attracts the agent when intensity is flat") {
        Belief b = Belief::prior(g);
        for (int c = 0; c < g.cell_count(); ++c) b.variance[c] = 0.04;
        for (int c : footprint(Vec2(700.0, 500.0), 120.0, g)) b.variance[c] = 1.0;
        PlannerSettings s;
        const Vec2 a = select_ucb_action(Vec2(500.0, 500.0), b, s, 15.0, 100.0, g, mask);

        // Brute-force oracle over the eight one-step candidates.
        int best = 0;
        double best_score = -1.0;
        for (int d = 0; d < 8; ++d) {
            const Vec2 dir(kDirections[d][0], kDirections[d][1]);
            const Vec2 w = g.clip(Vec2(500.0, 500.0) + 15.0 * dir);
            double score = 0.0;
            for (int c : footprint(w, 100.0, g))
                score += std::exp(b.log_intensity[c]) + 2.0 * std::sqrt(b.variance[c]);
            if (score > best_score) {
                best_score = score;
                best = d;
            }
        }
        CHECK(a == Vec2(kDirections[best][0], kDirections[best][1]));
        CHECK(a.x() == doctest::Approx(1.0));  // lobe sits due east
    }
}

TEST_CASE("lawnmower serpentine sweep") {
    GridSpec g(1000.0, 1000.0, 20.0);
    OperationalRegion region{0, 0, 49, 0, 49};
    const double radius = 100.0;
    const double d_max = 15.0;

    SUBCASE("fresh sweep from the west edge heads east") {
        LawnmowerPlan plan(region, radius, g);
        CHECK(plan.next_action(Vec2(100.0, 100.0), d_max) == Vec2(1.0, 0.0));
    }
    SUBCASE("the east edge turns one lane down, then heads west") {
        LawnmowerPlan plan(region, radius, g);
        Vec2 pos(100.0, 100.0);
        // Drive the first leg to its end.
        for (int guard = 0; guard < 200 && (pos - Vec2(900.0, 100.0)).norm() > 1e-9; ++guard)
            pos += plan.next_action(pos, d_max) * d_max;
        REQUIRE((pos - Vec2(900.0, 100.0)).norm() <= 1e-9);
        CHECK(plan.next_action(pos, d_max) == Vec2(0.0, 1.0));
        for (int guard = 0; guard < 200 && (pos - Vec2(900.0, 300.0)).norm() > 1e-9; ++guard)
            pos += plan.next_action(pos, d_max) * d_max;
        CHECK(plan.next_action(pos, d_max) == Vec2(-1.0, 0.0));
    }
    SUBCASE("a complete sweep restarts from the first lane") {
        LawnmowerPlan plan(region, radius, g);
        Vec2 pos(100.0, 100.0);
        bool revisited_start = false;
        double max_y = 0.0;
        for (int t = 0; t < 2000; ++t) {
            pos += plan.next_action(pos, d_max) * d_max;
            max_y = std::max(max_y, pos.y());
            if (t > 100 && (pos - Vec2(100.0, 100.0)).norm() <= 1e-9) {
                revisited_start = true;
                break;
            }
        }
        CHECK(max_y == doctest::Approx(900.0));  // reached the last lane
        CHECK(revisited_start);
    }
}

TEST_CASE("random action picks among the eight directions uniformly") {
    Rng rng(6);
    std::map<std::pair<double, double>, int> freq;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Vec2 a = select_random_action(rng);
        CHECK(a.x() >= -1.0);
        CHECK(a.x() <= 1.0);
        CHECK(a.y() >= -1.0);
        CHECK(a.y() <= 1.0);
        ++freq[{a.x(), a.y()}];
    }
    REQUIRE(freq.size() == 8);
    for (const auto& [dir, count] : freq)
        CHECK(count / static_cast<double>(draws) == doctest::Approx(0.125).epsilon(0.04));

    Rng a(17), b(17);
    for (int i = 0; i < 100; ++i) CHECK(select_random_action(a) == select_random_action(b));
}

TEST_SUITE_END();

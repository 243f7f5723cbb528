#include <doctest.h>

#include <cmath>
#include <random>

#include "scoutrl/belief.hpp"
#include "scoutrl/rng.hpp"
#include "support/oracles.hpp"

using namespace scoutrl;

namespace {

GridSpec small_grid(int nx, int ny, double res = 20.0) {
    return GridSpec(nx * res, ny * res, res);
}

Belief random_belief(const GridSpec& grid, Rng& rng, double u_scale = 1.0) {
    Belief b = Belief::prior(grid);
    std::normal_distribution<double> gauss(0.0, u_scale);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < b.size(); ++i) {
        b.log_intensity[i] = gauss(rng);
        b.exposure[i] = uni(rng) < 0.4;
    }
    return b;
}

Field random_counts(int n, Rng& rng) {
    std::uniform_int_distribution<int> c(0, 12);
    Field y(n);
    for (int i = 0; i < n; ++i) y[i] = c(rng);
    return y;
}

}  // namespace

TEST_SUITE_BEGIN("belief");

TEST_CASE("precision operator applies tau I + beta L") {
    SUBCASE("beta zero reduces to scaling") {
        PrecisionOperator op(2.5, 0.0, small_grid(4, 4));
        Rng rng(1);
        Field v = random_counts(op.size(), rng);
        CHECK((op.apply(v) - 2.5 * v).norm() == 0.0);
    }
    SUBCASE("constant vectors lie in the Laplacian null direction") {
        PrecisionOperator op(1.0, 0.2, small_grid(5, 7));
        const Field ones = Field::Ones(op.size());
        const Field out = op.apply(ones);
        for (int i = 0; i < op.size(); ++i) CHECK(out[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("matches the dense matrix on a 6x6 grid") {
        PrecisionOperator op(1.0, 0.2, small_grid(6, 6));
        const Eigen::MatrixXd q = oracle::dense_precision(op);
        Rng rng(2);
        for (int trial = 0; trial < 10; ++trial) {
            Field v(op.size());
            std::normal_distribution<double> gauss(0.0, 3.0);
            for (int i = 0; i < op.size(); ++i) v[i] = gauss(rng);
            const Field expected = q * v;
            const Field got = op.apply(v);
            CHECK((got - expected).norm() <= 1e-12 * expected.norm());
        }
    }
    SUBCASE("dense equality up to 20x20") {
        for (int n : {3, 11, 20}) {
            PrecisionOperator op(1.3, 0.4, small_grid(n, n));
            const Eigen::MatrixXd q = oracle::dense_precision(op);
            Rng rng(n);
            Field v(op.size());
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int i = 0; i < op.size(); ++i) v[i] = gauss(rng);
            CHECK((op.apply(v) - q * v).norm() <= 1e-12 * (q * v).norm());
        }
    }
    SUBCASE("length mismatch is rejected") {
        PrecisionOperator op(1.0, 0.2, small_grid(4, 4));
        CHECK_THROWS_AS(op.apply(Field::Zero(7)), std::invalid_argument);
    }
}

TEST_CASE("hessian diagonal follows cell degree and exposure") {
    const GridSpec grid = small_grid(5, 5);
    PrecisionOperator op(1.0, 0.2, grid);
    Belief b = Belief::prior(grid);

    const int interior = grid.index({2, 2});
    const int corner = grid.index({0, 0});
    Field d = hessian_diagonal(b, op);
    // Prior mode, nothing exposed: pure prior curvature.
    CHECK(d[interior] == doctest::Approx(1.8));
    CHECK(d[corner] == doctest::Approx(1.4));

    b.exposure[interior] = 1;  // u=0 adds exp(0)=1
    d = hessian_diagonal(b, op);
    CHECK(d[interior] == doctest::Approx(2.8));

    SUBCASE("matches the dense Q diagonal") {
        const Eigen::MatrixXd q = oracle::dense_precision(op);
        Belief fresh = Belief::prior(grid);
        const Field diag = hessian_diagonal(fresh, op);
        for (int i = 0; i < op.size(); ++i) CHECK(diag[i] == doctest::Approx(q(i, i)));
    }
}

TEST_CASE("log-posterior gradient") {
    const GridSpec grid = small_grid(5, 5);
    PrecisionOperator op(1.0, 0.2, grid);

    SUBCASE("zero at the prior mode without exposure") {
        Belief b = Belief::prior(grid);
        const Field g = log_posterior_gradient(b, Field::Zero(op.size()), op);
        CHECK(g.norm() == 0.0);
    }
    SUBCASE("poisson term is stationary when y equals lambda") {
        Belief b = Belief::prior(grid);
        const int cell = grid.index({2, 3});
        b.exposure[cell] = 1;
        b.log_intensity[cell] = 1.2;
        Field y = Field::Zero(op.size());
        y[cell] = std::exp(1.2);
        const Field g = log_posterior_gradient(b, y, op);
        const Field prior_only = -op.apply(b.log_intensity);
        CHECK(g[cell] == doctest::Approx(prior_only[cell]).epsilon(1e-12));
    }
    SUBCASE("matches central finite differences of the objective") {
        Rng rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            Belief b = random_belief(grid, rng);
            const Field y = random_counts(op.size(), rng);
            const Field g = log_posterior_gradient(b, y, op);
            const auto objective = [&](const Eigen::VectorXd& u) {
                return negative_log_posterior(u, y, b.exposure, op);
            };
            const Field fd = -oracle::finite_difference_gradient(objective, b.log_intensity);
            CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
        }
    }
    SUBCASE("uncovered cells ignore their stored counts") {
        Rng rng(6);
        Belief b = random_belief(grid, rng);
        Field y1 = random_counts(op.size(), rng);
        Field y2 = y1;
        for (int i = 0; i < op.size(); ++i)
            if (!b.exposure[i]) y2[i] = y1[i] + 17.0;
        CHECK((log_posterior_gradient(b, y1, op) - log_posterior_gradient(b, y2, op)).norm() ==
              0.0);
    }
}

TEST_CASE("pcg solves SPD systems with the diagonal preconditioner") {
    SUBCASE("zero rhs returns immediately") {
        PrecisionOperator op(1.0, 0.2, small_grid(4, 4));
        SolverSettings s;
        const Field zero = Field::Zero(op.size());
        const Field precond = Field::Constant(op.size(), 1.8);
        const auto res = pcg_solve(op, zero, zero, precond, s);
        CHECK(res.iterations == 0);
        CHECK(res.solution.norm() == 0.0);
    }
    SUBCASE("scaled identity converges in one iteration") {
        PrecisionOperator op(2.0, 0.0, small_grid(4, 4));
        SolverSettings s;
        Rng rng(7);
        Field rhs = random_counts(op.size(), rng);
        const Field precond = Field::Constant(op.size(), 2.0);
        const auto res = pcg_solve(op, Field::Zero(op.size()), rhs, precond, s);
        CHECK(res.iterations == 1);
        CHECK((res.solution - rhs / 2.0).norm() <= 1e-12 * rhs.norm());
    }
    SUBCASE("matches a dense direct solve on an 8x8 grid") {
        const GridSpec grid = small_grid(8, 8);
        PrecisionOperator op(1.0, 0.2, grid);
        Rng rng(8);
        Belief b = random_belief(grid, rng);
        Field exposed_lambda = Field::Zero(op.size());
        for (int i = 0; i < op.size(); ++i)
            if (b.exposure[i]) exposed_lambda[i] = std::exp(b.log_intensity[i]);
        Eigen::MatrixXd h = oracle::dense_precision(op);
        for (int i = 0; i < op.size(); ++i) h(i, i) += exposed_lambda[i];

        Field rhs(op.size());
        std::normal_distribution<double> gauss(0.0, 2.0);
        for (int i = 0; i < op.size(); ++i) rhs[i] = gauss(rng);

        SolverSettings s;
        s.pcg_iters = 200;
        s.pcg_tolerance = 1e-10;
        Field precond(op.size());
        for (int i = 0; i < op.size(); ++i) precond[i] = exposed_lambda[i] + op.diagonal(i);
        const auto res = pcg_solve(op, exposed_lambda, rhs, precond, s);
        const Field expected = h.ldlt().solve(rhs);
        CHECK((res.solution - expected).norm() <= 1e-8 * expected.norm());
    }
}

TEST_CASE("laplace update tracks the posterior mode") {
    SUBCASE("prior mode with no exposure stays put") {
        const GridSpec grid = small_grid(4, 4);
        PrecisionOperator op(1.0, 0.2, grid);
        Belief b = Belief::prior(grid);
        const auto report = laplace_update(b, Field::Zero(op.size()), b.exposure, op, {});
        CHECK(report.ok);
        CHECK(b.log_intensity.norm() == 0.0);
    }
    SUBCASE("single cell converges to the scalar root") {
        // Stationarity: y - exp(u) - tau u = 0 with y=5, tau=1 -> u ~ 1.3066.
        const GridSpec grid = small_grid(1, 1);
        PrecisionOperator op(1.0, 0.0, grid);
        Belief b = Belief::prior(grid);
        b.exposure[0] = 1;
        Field y = Field::Constant(1, 5.0);
        SolverSettings s;  // paper-scale settings, applied repeatedly online
        for (int step = 0; step < 6; ++step) laplace_update(b, y, b.exposure, op, s);
        const double u = b.log_intensity[0];
        CHECK(5.0 - std::exp(u) - u == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(u == doctest::Approx(1.3066).epsilon(1e-3));
    }
    SUBCASE("covered disc matches the dense Newton oracle") {
        const GridSpec grid = small_grid(6, 6);
        PrecisionOperator op(1.0, 0.2, grid);
        Belief b = Belief::prior(grid);
        const auto disc = footprint(grid.cell_center({3, 3}), 2.5 * grid.resolution, grid);
        Field y = Field::Zero(op.size());
        Rng rng(9);
        std::uniform_int_distribution<int> c(0, 9);
        for (int cell : disc) {
            b.exposure[cell] = 1;
            y[cell] = c(rng);
        }
        SolverSettings s;
        for (int step = 0; step < 5; ++step) laplace_update(b, y, b.exposure, op, s);
        const Field expected = oracle::dense_newton_mode(op, y, b.exposure, 50);
        CHECK((b.log_intensity - expected).lpNorm<Eigen::Infinity>() <= 1e-3);
    }
    SUBCASE("negative log-posterior never increases across accepted steps") {
        const GridSpec grid = small_grid(6, 6);
        PrecisionOperator op(1.0, 0.2, grid);
        Rng rng(10);
        for (int trial = 0; trial < 20; ++trial) {
            Belief b = random_belief(grid, rng, 2.0);
            const Field y = random_counts(op.size(), rng);
            double objective = negative_log_posterior(b.log_intensity, y, b.exposure, op);
            SolverSettings s;
            for (int step = 0; step < 4; ++step) {
                laplace_update(b, y, b.exposure, op, s);
                const double next = negative_log_posterior(b.log_intensity, y, b.exposure, op);
                CHECK(next <= objective + 1e-9);
                objective = next;
            }
        }
    }
    SUBCASE("log intensity stays inside the clamp") {
        const GridSpec grid = small_grid(3, 3);
        PrecisionOperator op(1.0, 0.2, grid);
        Belief b = Belief::prior(grid);
        Field y = Field::Constant(op.size(), 1e6);
        std::fill(b.exposure.begin(), b.exposure.end(), 1);
        SolverSettings s;
        for (int step = 0; step < 10; ++step) laplace_update(b, y, b.exposure, op, s);
        CHECK(b.log_intensity.lpNorm<Eigen::Infinity>() <= s.log_intensity_clamp);
    }
}

TEST_CASE("variance proxy is the reciprocal Hessian diagonal") {
    const GridSpec grid = small_grid(5, 5);
    PrecisionOperator op(1.0, 0.2, grid);
    Belief b = Belief::prior(grid);
    const int interior = grid.index({2, 2});
    SUBCASE("unexposed interior cell") {
        CHECK(variance_proxy(b, op)[interior] == doctest::Approx(1.0 / 1.8).epsilon(1e-12));
    }
    SUBCASE("exposed cell with lambda ten") {
        b.exposure[interior] = 1;
        b.log_intensity[interior] = std::log(10.0);
        CHECK(variance_proxy(b, op)[interior] == doctest::Approx(1.0 / 11.8).epsilon(1e-12));
    }
    SUBCASE("strictly decreasing in the intensity at fixed degree") {
        b.exposure[interior] = 1;
        double previous = 1e9;
        for (double lam : {0.1, 1.0, 5.0, 50.0}) {
            b.log_intensity[interior] = std::log(lam);
            const double proxy = variance_proxy(b, op)[interior];
            CHECK(proxy < previous);
            previous = proxy;
        }
    }
    SUBCASE("observed cells are more certain than unobserved ones of equal degree") {
        Belief observed = Belief::prior(grid);
        observed.exposure[interior] = 1;
        observed.log_intensity[interior] = 0.3;
        const double with_obs = variance_proxy(observed, op)[interior];
        const double without = variance_proxy(Belief::prior(grid), op)[interior];
        CHECK(with_obs < without);
    }
}

TEST_CASE("variance prediction grows toward the ceiling") {
    const GridSpec grid = small_grid(3, 3);
    Belief b = Belief::prior(grid);
    SUBCASE("at the ceiling it stays") {
        predict_variances(b, 0.002, 1.0);
        for (int i = 0; i < b.size(); ++i) CHECK(b.predicted_variance[i] == 1.0);
    }
    SUBCASE("below the ceiling it grows by the rate") {
        b.variance = Field::Constant(b.size(), 0.5);
        predict_variances(b, 0.002, 1.0);
        for (int i = 0; i < b.size(); ++i)
            CHECK(b.predicted_variance[i] == doctest::Approx(0.501).epsilon(1e-12));
    }
    SUBCASE("zero growth is the identity") {
        b.variance = Field::Constant(b.size(), 0.37);
        predict_variances(b, 0.0, 1.0);
        CHECK((b.predicted_variance - b.variance).norm() == 0.0);
    }
}

TEST_CASE("variance update overwrites covered cells only") {
    const GridSpec grid = small_grid(5, 5);
    PrecisionOperator op(1.0, 0.2, grid);
    Belief b = Belief::prior(grid);
    b.variance = Field::Constant(b.size(), 0.8);
    predict_variances(b, 0.002, 1.0);
    const int interior = grid.index({2, 2});
    const int corner = grid.index({0, 0});

    SUBCASE("vanishing intensity gives the prior-curvature value") {
        b.log_intensity[interior] = -1000.0;  // exp underflows to zero
        update_variances(b, {interior}, op, 0.01);
        CHECK(b.variance[interior] == doctest::Approx(1.0 / 1.8).epsilon(1e-12));
    }
    SUBCASE("huge intensity hits the floor") {
        b.log_intensity[interior] = 10.0;
        update_variances(b, {interior}, op, 0.01);
        CHECK(b.variance[interior] == 0.01);
    }
    SUBCASE("uncovered cells keep the prediction exactly") {
        update_variances(b, {interior}, op, 0.01);
        CHECK(b.variance[corner] == b.predicted_variance[corner]);
        CHECK(b.variance[corner] == doctest::Approx(0.8 * 1.002));
    }
    SUBCASE("boundary cells honor the degree-aware flag") {
        b.log_intensity[corner] = -1000.0;
        update_variances(b, {corner}, op, 0.01, true);
        CHECK(b.variance[corner] == doctest::Approx(1.0 / 1.4).epsilon(1e-12));
        update_variances(b, {corner}, op, 0.01, false);
        CHECK(b.variance[corner] == doctest::Approx(1.0 / 1.8).epsilon(1e-12));
    }
}

TEST_CASE("bookkeeping cycle") {
    const GridSpec grid = small_grid(3, 3);
    Belief b = Belief::prior(grid);
    const std::vector<int> covered{grid.index({1, 1})};

    SUBCASE("a cell covered every step is seen with staleness one") {
        for (int t = 0; t < 5; ++t) {
            bump_staleness(b);
            CHECK(b.staleness[covered[0]] == 1);  // what the planner observes
            record_exposure(b, covered);
            reset_staleness(b, covered);
        }
        CHECK(b.obs_count[covered[0]] == 5);
    }
    SUBCASE("a never-covered cell accumulates one per step") {
        for (int t = 0; t < 7; ++t) {
            bump_staleness(b);
            record_exposure(b, covered);
            reset_staleness(b, covered);
        }
        CHECK(b.staleness[grid.index({0, 0})] == 7);
        CHECK(b.obs_count[grid.index({0, 0})] == 0);
    }
}

TEST_CASE("belief summary averages over the operational mask") {
    const GridSpec grid = small_grid(4, 4);
    SUBCASE("uninformed prior") {
        Belief b = Belief::prior(grid);
        const std::vector<uint8_t> mask(grid.cell_count(), 1);
        const Eigen::Vector3d phi = belief_summary(b, mask);
        CHECK(phi[0] == doctest::Approx(1.0));
        CHECK(phi[1] == doctest::Approx(1.0));
        CHECK(phi[2] == 0.0);
    }
    SUBCASE("single-cell mask returns that cell") {
        Belief b = Belief::prior(grid);
        const int cell = grid.index({2, 1});
        b.log_intensity[cell] = 0.7;
        b.variance[cell] = 0.25;
        b.obs_count[cell] = 4;
        std::vector<uint8_t> mask(grid.cell_count(), 0);
        mask[cell] = 1;
        const Eigen::Vector3d phi = belief_summary(b, mask);
        CHECK(phi[0] == doctest::Approx(std::exp(0.7)));
        CHECK(phi[1] == doctest::Approx(0.25));
        CHECK(phi[2] == doctest::Approx(4.0));
    }
    SUBCASE("random fields match independent re-summation") {
        Rng rng(11);
        Belief b = random_belief(grid, rng);
        std::uniform_int_distribution<int> c(0, 9);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        std::vector<uint8_t> mask(grid.cell_count(), 0);
        for (int i = 0; i < b.size(); ++i) {
            b.variance[i] = u(rng);
            b.obs_count[i] = c(rng);
            mask[i] = i % 3 != 0;
        }
        double sl = 0.0, sv = 0.0, sc = 0.0;
        int n = 0;
        for (int i = 0; i < b.size(); ++i) {
            if (!mask[i]) continue;
            sl += std::exp(b.log_intensity[i]);
            sv += b.variance[i];
            sc += b.obs_count[i];
            ++n;
        }
        const Eigen::Vector3d phi = belief_summary(b, mask);
        CHECK(phi[0] == doctest::Approx(sl / n).epsilon(1e-12));
        CHECK(phi[1] == doctest::Approx(sv / n).epsilon(1e-12));
        CHECK(phi[2] == doctest::Approx(sc / n).epsilon(1e-12));
    }
    SUBCASE("empty mask is rejected") {
        Belief b = Belief::prior(grid);
        CHECK_THROWS_AS(belief_summary(b, std::vector<uint8_t>(grid.cell_count(), 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("variance field stays within bounds under fuzzed predict/update pairs") {
    const GridSpec grid = small_grid(6, 6);
    PrecisionOperator op(1.0, 0.2, grid);
    Belief b = Belief::prior(grid);
    Rng rng(12);
    std::uniform_int_distribution<int> pick(0, grid.cell_count() - 1);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int step = 0; step < 10000; ++step) {
        std::vector<int> covered;
        for (int k = 0; k < 5; ++k) covered.push_back(pick(rng));
        for (int c : covered) b.log_intensity[c] = std::clamp(gauss(rng), -10.0, 10.0);
        predict_variances(b, 0.002, 1.0);
        update_variances(b, covered, op, 0.01);
        CHECK(b.variance.minCoeff() >= 0.01);
        CHECK(b.variance.maxCoeff() <= 1.0);
    }
}

TEST_CASE("uncovered cells below the ceiling grow strictly") {
    const GridSpec grid = small_grid(3, 3);
    Belief b = Belief::prior(grid);
    const int cell = grid.index({1, 1});
    b.variance = Field::Constant(b.size(), 1.0);
    b.variance[cell] = 0.2;
    double previous = b.variance[cell];
    for (int k = 0; k < 50; ++k) {
        predict_variances(b, 0.002, 1.0);
        update_variances(b, {}, PrecisionOperator(1.0, 0.2, grid), 0.01);
        CHECK(b.variance[cell] > previous);
        previous = b.variance[cell];
    }
}

TEST_SUITE_END();

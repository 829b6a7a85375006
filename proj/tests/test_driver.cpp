#include <doctest.h>

#include "slecg/driver.hpp"

using namespace slecg;

TEST_CASE("philox streams") {
    SUBCASE("same seed and path give identical output") {
        PathRng a(42, 7), b(42, 7);
        for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
    }
    SUBCASE("distinct paths decorrelate") {
        PathRng a(42, 0), b(42, 1);
        int same = 0;
        for (int i = 0; i < 64; ++i)
            if (a.next_u32() == b.next_u32()) ++same;
        CHECK(same == 0);
    }
    SUBCASE("normals have the right mean and variance") {
        PathRng rng(11, 0);
        double sum = 0.0, sum2 = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double x = rng.next_normal();
            sum += x;
            sum2 += x * x;
        }
        CHECK(std::abs(sum / n) < 0.01);
        CHECK(std::abs(sum2 / n - 1.0) < 0.01);
    }
}

TEST_CASE("driving paths") {
    SUBCASE("same seed gives bit-identical driving series") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(3.0);
        cfg.geometry = Geometry::Chordal;
        cfg.seed = 99;
        cfg.dt = 1e-3;
        cfg.t_end = 0.2;
        const PathRecord a = generate_path(cfg, 5, {{0.0, 1.0}});
        const PathRecord b = generate_path(cfg, 5, {{0.0, 1.0}});
        REQUIRE(a.driving.size() == b.driving.size());
        for (std::size_t i = 0; i < a.driving.size(); ++i)
            CHECK(a.driving[i] == b.driving[i]);
    }
    SUBCASE("Brownian increment variance matches kappa dt within 1%") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(4.0);
        cfg.seed = 3;
        cfg.dt = 1e-3;
        cfg.t_end = 100.0;
        LoewnerState state = make_state(cfg.geometry, cfg.params.mode, 0.0);
        PathRng rng(cfg.seed, 0);
        double prev = 0.0, sum2 = 0.0;
        const int n = 100000;
        const double noise = std::sqrt(cfg.params.kappa * cfg.dt);
        for (int i = 0; i < n; ++i) {
            const double next = prev + noise * rng.next_normal();
            const double inc = (next - prev) / std::sqrt(cfg.params.kappa);
            sum2 += inc * inc;
            prev = next;
        }
        (void)state;
        CHECK(std::abs(sum2 / n - cfg.dt) < 0.01 * cfg.dt);
    }
    SUBCASE("zero-noise standard mode is the deterministic path") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(2.0);
        cfg.noise_scale = 0.0;
        cfg.dt = 1e-3;
        cfg.t_end = 0.3;
        const PathRecord rec = generate_path(cfg, 0, {{0.0, 1.0}});
        for (double d : rec.driving) CHECK(d == 0.0);
    }
}

TEST_CASE("force points") {
    SUBCASE("chordal boundary force points stay real") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(6.0);
        cfg.geometry = Geometry::Chordal;
        cfg.drift_mode = DriftMode::RhoSum;
        cfg.force_points = {{cplx{2.0, 0.0}, 1.3}};
        cfg.dt = 1e-3;
        cfg.t_end = 0.3;
        cfg.seed = 17;
        const PathRecord rec = generate_path(cfg, 2, {});
        for (const auto& q : rec.force_images)
            for (const auto& v : q) CHECK(std::abs(v.imag()) < 1e-10);
    }
    SUBCASE("radial circle force points stay on the circle") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(4.0);
        cfg.geometry = Geometry::Radial;
        cfg.drift_mode = DriftMode::RhoSum;
        cfg.force_points = {{std::exp(cplx{0.0, 2.0}), -0.7}};
        cfg.dt = 1e-3;
        cfg.t_end = 0.3;
        cfg.seed = 23;
        const PathRecord rec = generate_path(cfg, 1, {});
        for (const auto& q : rec.force_images)
            for (const auto& v : q) CHECK(std::abs(std::abs(v) - 1.0) < 1e-10);
    }
    SUBCASE("rho-sum and partition-gradient drifts agree pathwise") {
        for (auto geometry : {Geometry::Chordal, Geometry::Radial}) {
            DrivingConfig cfg;
            cfg.params = SleParams::forward(3.3);
            cfg.geometry = geometry;
            cfg.dt = 1e-3;
            cfg.t_end = 0.25;
            cfg.seed = 31;
            cfg.eta = geometry == Geometry::Radial ? 0.8 : 0.0;
            if (geometry == Geometry::Chordal)
                cfg.force_points = {{cplx{1.5, 0.0}, 0.9}, {cplx{-2.0, 0.0}, -0.5}};
            else
                cfg.force_points = {{std::exp(cplx{0.0, 1.7}), 0.9},
                                    {std::exp(cplx{0.0, 4.0}), -0.5}};
            cfg.drift_mode = DriftMode::RhoSum;
            const PathRecord a = generate_path(cfg, 4, {});
            cfg.drift_mode = DriftMode::PartitionGradient;
            const PathRecord b = generate_path(cfg, 4, {});
            REQUIRE(a.driving.size() == b.driving.size());
            for (std::size_t i = 0; i < a.driving.size(); ++i)
                CHECK(std::abs(a.driving[i] - b.driving[i]) < 1e-9 * (1.0 + i));
        }
    }
    SUBCASE("force point collision truncates the path") {
        DrivingConfig cfg;
        cfg.params = SleParams::forward(6.0);
        cfg.geometry = Geometry::Chordal;
        cfg.drift_mode = DriftMode::RhoSum;
        // strongly attracting force point right next to the seed
        cfg.force_points = {{cplx{0.05, 0.0}, -4.0}};
        cfg.dt = 1e-4;
        cfg.t_end = 1.0;
        cfg.seed = 400;
        const PathRecord rec = generate_path(cfg, 0, {});
        CHECK(rec.truncated);
        CHECK(rec.t.back() < 1.0);
    }
}

TEST_CASE("backward driving") {
    SUBCASE("standard backward has zero drift") {
        DrivingConfig cfg;
        cfg.params = SleParams::backward(4.0);
        cfg.geometry = Geometry::Chordal;
        cfg.drift_mode = DriftMode::PartitionGradient;
        cfg.beta = standard_chordal_beta(cfg.params, 0.0);
        LoewnerState state = make_state(cfg.geometry, cfg.params.mode, 0.0);
        CHECK(std::abs(drift_value(cfg, state)) < 1e-12);
    }
    SUBCASE("zero-noise backward matches the deterministic ODE") {
        DrivingConfig cfg;
        cfg.params = SleParams::backward(4.0);
        cfg.geometry = Geometry::Chordal;
        cfg.noise_scale = 0.0;
        cfg.dt = 1e-3;
        cfg.t_end = 0.5;
        const PathRecord rec = generate_path(cfg, 0, {{2.0, 1.0}});
        const cplx z{2.0, 1.0};
        const cplx expect = std::sqrt(z * z - 4.0 * 0.5);
        CHECK(std::abs(rec.tracked_g.back()[0] - expect) < 1e-8);
    }
    SUBCASE("Euler-Maruyama self-convergence under dt refinement") {
        // strong error against a fine reference, same Brownian path
        DrivingConfig cfg;
        cfg.params = SleParams::forward(8.0 / 3.0);
        cfg.geometry = Geometry::Chordal;
        cfg.drift_mode = DriftMode::RhoSum;
        cfg.force_points = {{cplx{3.0, 0.0}, 1.0}};
        cfg.t_end = 0.25;
        cfg.seed = 5;
        // reuse Brownian paths at several resolutions by summing increments
        const int n_fine = 1 << 12;
        const double dt_fine = cfg.t_end / n_fine;
        auto run_at = [&](const std::vector<double>& db, int coarsen) {
            LoewnerState state = make_state(cfg.geometry, cfg.params.mode, 0.0);
            for (const auto& [q, rho] : cfg.force_points) state.add_force_point(q, true);
            const double dt = dt_fine * coarsen;
            for (int i = 0; i < n_fine; i += coarsen) {
                double inc = 0.0;
                for (int k = 0; k < coarsen; ++k) inc += db[i + k];
                const double lam = rho_sum_drift(cfg, state);
                step(state, state.driving + inc + lam * dt, dt);
            }
            return state.driving;
        };
        double e_fine = 0.0, e_coarse = 0.0;
        for (std::uint64_t path = 0; path < 6; ++path) {
            PathRng rng(cfg.seed, path);
            std::vector<double> db(n_fine);
            for (auto& x : db) x = std::sqrt(cfg.params.kappa * dt_fine) * rng.next_normal();
            const double ref = run_at(db, 1);
            e_fine += std::abs(run_at(db, 4) - ref);
            e_coarse += std::abs(run_at(db, 32) - ref);
        }
        CHECK(e_fine < e_coarse);  // strong error decreases under refinement
    }
}

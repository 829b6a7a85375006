#include <doctest.h>

#include "slecg/verify.hpp"

using namespace slecg;

namespace {

// constant observable: trivially a martingale
class ConstantObservable : public Observable {
  public:
    std::vector<cplx> tracked_points() const override { return {cplx{0.3, 0.4}}; }
    void init(const LoewnerState&) override { m0_ = cplx{2.0, -1.0}; }
    cplx eval(const LoewnerState&) override { return m0_; }
};

}  // namespace

TEST_CASE("compensated accumulators") {
    SUBCASE("kahan sums small terms accurately") {
        KahanSum k;
        k.add(1.0);
        for (int i = 0; i < 1000000; ++i) k.add(1e-16);
        CHECK(k.value() == doctest::Approx(1.0 + 1e-10).epsilon(1e-14));
    }
    SUBCASE("merge is consistent with sequential accumulation") {
        PathRng rng(1, 0);
        MomentAccumulator a, b, all;
        for (int i = 0; i < 1000; ++i) {
            const cplx v{rng.next_normal(), rng.next_normal()};
            (i % 2 ? a : b).add(v);
            all.add(v);
        }
        MomentAccumulator merged = b;
        merged.merge(a);
        CHECK(merged.count == all.count);
        CHECK(std::abs(merged.mean() - all.mean()) < 1e-13);
        CHECK(merged.std_err() == doctest::Approx(all.std_err()).epsilon(1e-10));
    }
}

TEST_CASE("martingale_test") {
    DrivingConfig cfg;
    cfg.params = SleParams::forward(2.0);
    cfg.geometry = Geometry::Radial;
    cfg.seed = 2026;
    cfg.dt = 5e-4;
    cfg.t_end = 0.25;
    McOptions opt;
    opt.n_paths = 2000;
    opt.threads = 2;

    SUBCASE("constant observable trivially passes") {
        const MartingaleReport rep = martingale_test(
            cfg, [] { return std::make_unique<ConstantObservable>(); }, "constant",
            {0.1, 0.25}, opt);
        CHECK(rep.pass);
        for (const auto& c : rep.checkpoints) {
            CHECK(c.std_err == 0.0);
            CHECK(c.mean == c.m0);
            CHECK(c.n_alive + c.n_swallowed == opt.n_paths);
        }
    }
    SUBCASE("kappa = 2 Poisson observable is a martingale") {
        const SleParams p = cfg.params;
        const cplx z{0.2, 0.3};
        const MartingaleReport rep = martingale_test(
            cfg, [&] { return make_observable("poisson_vertex", z, p); }, "poisson",
            {0.1, 0.25}, opt);
        CHECK(rep.pass);
        CHECK(rep.checkpoints[0].m0.real() ==
              doctest::Approx((1.0 - std::norm(z)) / std::norm(1.0 - z)));
    }
    SUBCASE("wrong-kappa negative control fails") {
        DrivingConfig bad = cfg;
        bad.params = SleParams::forward(4.0);  // paths at kappa = 4
        bad.t_end = 0.5;
        const SleParams p2 = SleParams::forward(2.0);  // observable built for kappa = 2
        const cplx z{0.2, 0.3};
        McOptions big = opt;
        big.n_paths = 8000;
        const MartingaleReport rep = martingale_test(
            bad, [&] { return make_observable("poisson_vertex", z, p2); }, "poisson-neg",
            {0.5}, big);
        CHECK_FALSE(rep.pass);
    }
    SUBCASE("reports are reproducible from the seed") {
        const SleParams p = cfg.params;
        const cplx z{0.2, 0.3};
        McOptions one = opt;
        one.n_paths = 500;
        one.threads = 1;
        const auto r1 = martingale_test(
            cfg, [&] { return make_observable("poisson_vertex", z, p); }, "a", {0.1}, one);
        const auto r2 = martingale_test(
            cfg, [&] { return make_observable("poisson_vertex", z, p); }, "a", {0.1}, one);
        CHECK(r1.checkpoints[0].mean.real() == r2.checkpoints[0].mean.real());
        CHECK(r1.checkpoints[0].std_err == r2.checkpoints[0].std_err);
    }
}

TEST_CASE("exponent_regression") {
    SUBCASE("degenerate grid is rejected") {
        CHECK_THROWS_AS(exponent_regression(6.0, 0.0, pi(), {0.5}, 100, 1e-3, 1, 1),
                        divisor_error);
    }
    SUBCASE("kappa = 6 survival decay has roughly the right rate") {
        const ExponentReport rep = exponent_regression(6.0, 0.0, pi(), {0.4, 0.8, 1.2, 1.6},
                                                       4000, 1e-3, 99, 2, 0.5);
        CHECK(rep.expected_slope == doctest::Approx(-0.25));
        CHECK(rep.pass);  // 50% tolerance at this small N
    }
}

TEST_CASE("restriction_probability_test report shape") {
    VerticalSlit slit{1.0, 0.3};
    const RestrictionReport rep =
        restriction_probability_test(slit, 1500, 1.0, 1e-3, 5, 2, 0.10, 0);
    CHECK(rep.paths == 1500);
    CHECK(rep.p_formula == doctest::Approx(std::pow(1.0 / std::sqrt(1.09), 5.0 / 8.0)));
    CHECK(rep.p_mc > 0.9);
    CHECK(rep.p_mc < 1.01);
    CHECK(rep.ci > 0.0);
    CHECK(rep.pass);
}

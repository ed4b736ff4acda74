#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tsnn/synthesis.hpp"

using namespace tsnn;

namespace {

SimConfig base_config(int n, int m, double lambda, std::uint64_t seed) {
    SimConfig config;
    config.n = n;
    config.m = m;
    config.lambda = lambda;
    config.noise_sd = 0.0;
    config.mechanism = Mechanism::mcar(0.75);
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("lambda = 1 collapses the signal to u + v") {
    Generated gen = generate(base_config(20, 15, 1.0, 1));
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 15; ++j)
            REQUIRE(gen.truth.theta(i, j) ==
                    Catch::Approx(gen.model.u(i, 0) + gen.model.v(j, 0)).margin(1e-15));
}

TEST_CASE("zero noise means observed values equal the truth") {
    Generated gen = generate(base_config(10, 10, 0.6, 2));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (gen.observed.observed(i, j))
                REQUIRE(gen.observed.values(i, j) == gen.truth.theta(i, j));
}

TEST_CASE("factors live in [-0.5, 0.5]") {
    Generated gen = generate(base_config(50, 50, 0.5, 3));
    for (int i = 0; i < 50; ++i) {
        REQUIRE(gen.model.u(i, 0) >= -0.5);
        REQUIRE(gen.model.u(i, 0) <= 0.5);
    }
}

TEST_CASE("empirical MCAR rate over one million cells") {
    SimConfig config = base_config(1000, 1000, 1.0, 4);
    Generated gen = generate(config);
    const double p = 0.75;
    const double rate = observed_fraction(gen.observed);
    const double se = std::sqrt(p * (1 - p) / 1e6);
    REQUIRE(std::abs(rate - p) <= 3 * se);
}

TEST_CASE("MNAR conditional observation rates") {
    SimConfig config = base_config(800, 800, 1.0, 5);
    config.mechanism = Mechanism::mnar();
    Generated gen = generate(config);
    long pos_total = 0, pos_seen = 0, neg_total = 0, neg_seen = 0;
    for (int i = 0; i < config.n; ++i)
        for (int j = 0; j < config.m; ++j) {
            const bool positive = gen.model.u(i, 0) + gen.model.v(j, 0) > 0.0;
            (positive ? pos_total : neg_total) += 1;
            if (gen.observed.observed(i, j)) (positive ? pos_seen : neg_seen) += 1;
        }
    // 0.8 * 0.6 given a positive signal, 0.8 * 0.4 otherwise
    const double p_pos = static_cast<double>(pos_seen) / pos_total;
    const double p_neg = static_cast<double>(neg_seen) / neg_total;
    REQUIRE(p_pos == Catch::Approx(0.48).margin(3 * std::sqrt(0.48 * 0.52 / pos_total)));
    REQUIRE(p_neg == Catch::Approx(0.32).margin(3 * std::sqrt(0.32 * 0.68 / neg_total)));
}

TEST_CASE("snr on hand cases") {
    GroundTruth constant;
    constant.theta = Grid<double>(3, 3, -2.0);
    REQUIRE(snr(constant, 2.0) == Catch::Approx(1.0));

    GroundTruth g;
    g.theta = Grid<double>(2, 2, 0.0);
    g.theta(0, 0) = 3.0;
    g.theta(0, 1) = 4.0;
    REQUIRE(snr(g, 2.5) == Catch::Approx(1.0));
}

TEST_CASE("noise sd inversion round-trips the target snr") {
    GroundTruth ones;
    ones.theta = Grid<double>(4, 4, 1.0);
    REQUIRE(noise_sd_for_target_snr(ones, 1.0) == Catch::Approx(1.0));
    REQUIRE(noise_sd_for_target_snr(ones, 2.0) == Catch::Approx(0.5));

    Rng rng(6);
    GroundTruth random;
    random.theta = Grid<double>(5, 7, 0.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) random.theta(i, j) = rng.uniform(-4, 4);
    for (double target : {0.5, 1.0, 31.0}) {
        const double sd = noise_sd_for_target_snr(random, target);
        REQUIRE(snr(random, sd) == Catch::Approx(target).epsilon(1e-12));
    }
}

TEST_CASE("the paper regime: snr^2 = 2 at lambda 0.75 and n = m = 200") {
    SimConfig config = base_config(200, 200, 0.75, 7);
    config.target_snr = std::sqrt(2.0);
    Generated gen = generate(config);
    REQUIRE(snr(gen.truth, gen.model.noise_sd) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("the latent function is (lambda, 2) Holder on a dense grid") {
    for (double lambda : {0.5, 0.75, 1.0}) {
        for (int a = -40; a <= 40; ++a) {
            for (int b = -40; b <= 40; ++b) {
                const double x = a / 40.0, y = b / 40.0;
                const double lhs = std::abs(holder_signal(x, 0.0, lambda) - holder_signal(y, 0.0, lambda));
                REQUIRE(lhs <= 2.0 * std::pow(std::abs(x - y), lambda) + 1e-12);
            }
        }
    }
}

TEST_CASE("the signal is odd in the factors") {
    Generated gen = generate(base_config(12, 9, 0.6, 8));
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 9; ++j) {
            const double flipped = holder_signal(-gen.model.u(i, 0), -gen.model.v(j, 0), 0.6);
            REQUIRE(flipped == Catch::Approx(-gen.truth.theta(i, j)).margin(1e-15));
        }
}

TEST_CASE("identical seeds reproduce the draw; different seeds differ") {
    SimConfig config = base_config(30, 30, 0.75, 99);
    config.noise_sd = 0.3;
    Generated a = generate(config);
    Generated b = generate(config);
    REQUIRE(a.truth.theta == b.truth.theta);
    REQUIRE(a.observed.values == b.observed.values);
    REQUIRE(a.observed.mask == b.observed.mask);

    config.seed = 100;
    Generated c = generate(config);
    REQUIRE(!(a.observed.mask == c.observed.mask));
}

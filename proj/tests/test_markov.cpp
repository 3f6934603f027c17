#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tandemfluid/markov.hpp"

using namespace tandemfluid;

TEST_SUITE("markov") {

TEST_CASE("steady state closed form") {
    auto pi = steady_state(1.0, 1.0);
    CHECK(pi.p1 == doctest::Approx(0.5));
    CHECK(pi.p2 == doctest::Approx(0.5));
    pi = steady_state(1.0, 3.0);
    CHECK(pi.p1 == doctest::Approx(0.75));
    CHECK(pi.p2 == doctest::Approx(0.25));
    pi = steady_state(2.0, 2.0);
    CHECK(pi.p1 == doctest::Approx(0.5));
    CHECK(pi[Mode::Low] == doctest::Approx(0.5));
}

TEST_CASE("steady state annihilates the generator") {
    for (auto [lambda, mu] : {std::pair{1.0, 1.0}, {0.3, 7.0}, {1e-3, 2.5}, {40.0, 0.01}}) {
        const auto pi = steady_state(lambda, mu);
        const auto g = TransitionMatrix::from_rates(lambda, mu);
        CHECK(g.m[0][0] + g.m[0][1] == 0.0);
        CHECK(g.m[1][0] + g.m[1][1] == 0.0);
        CHECK(std::abs(pi.p1 * g.m[0][0] + pi.p2 * g.m[1][0]) < 1e-15 * (lambda + mu));
        CHECK(std::abs(pi.p1 * g.m[0][1] + pi.p2 * g.m[1][1]) < 1e-15 * (lambda + mu));
        CHECK(pi.p1 + pi.p2 == doctest::Approx(1.0));
    }
}

TEST_CASE("non-positive rates are rejected") {
    CHECK_THROWS_AS((void)steady_state(0.0, 1.0), ModelError);
    CHECK_THROWS_AS((void)steady_state(1.0, -2.0), ModelError);
}

TEST_CASE("generator output matches the reference xoshiro256** sequence") {
    Rng rng(42);
    CHECK(rng() == 0x15780b2e0c2ec716ULL);
    CHECK(rng() == 0x6104d9866d113a7eULL);
    CHECK(rng() == 0xae17533239e499a1ULL);
}

TEST_CASE("holding times are reproducible per seed") {
    const auto p = SystemParams::nominal();
    Rng a(7), b(7), c(8);
    const double x = sample_holding_time(Mode::High, p, a);
    CHECK(x > 0.0);
    CHECK(x == sample_holding_time(Mode::High, p, b));
    CHECK(x != sample_holding_time(Mode::High, p, c));
}

TEST_CASE("streams are distinct and reproducible") {
    Rng s0 = Rng::stream(5, 0), s1 = Rng::stream(5, 1), s1b = Rng::stream(5, 1);
    const auto x1 = s1();
    CHECK(x1 == s1b());
    CHECK(s0() != x1);
    Rng base(5);
    CHECK(Rng::stream(5, 0)() == base());
}

TEST_CASE("uniforms lie in [0, 1)") {
    Rng rng(3);
    for (int k = 0; k < 100000; ++k) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("exponential sample mean is within 3 sigma") {
    SystemParams p;
    p.lambda = 2.0;
    Rng rng(2024);
    constexpr int n = 1000000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sample_holding_time(Mode::High, p, rng);
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 3 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("exponential empirical CDF passes a KS check") {
    SystemParams p;
    Rng rng(99);
    constexpr int n = 1000000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_holding_time(Mode::Low, p, rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int k = 0; k < n; ++k) {
        const double cdf = 1.0 - std::exp(-xs[k]);
        ks = std::max({ks, std::abs(cdf - double(k) / n), std::abs(cdf - double(k + 1) / n)});
    }
    CHECK(ks < 0.002);
}

}

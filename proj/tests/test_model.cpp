#include <doctest.h>

#include <random>

#include "tandemfluid/model.hpp"

using namespace tandemfluid;

TEST_SUITE("model") {

TEST_CASE("nominal parameters are valid") {
    CHECK(validate_params(SystemParams::nominal()).valid());
}

TEST_CASE("parameter violations are reported") {
    SystemParams p;
    p.u2 = 0.8;
    auto rep = validate_params(p);
    CHECK_FALSE(rep.valid());
    CHECK(rep.violations.size() == 1);

    p = SystemParams{};
    p.lambda = 0.0;
    CHECK_FALSE(validate_params(p).valid());

    p = SystemParams{};
    p.v = 1.2;
    CHECK_FALSE(validate_params(p).valid());

    p = SystemParams{};
    p.theta = -1.0;
    CHECK_FALSE(validate_params(p).valid());

    p = SystemParams{};
    p.mu = std::nan("");
    CHECK_FALSE(validate_params(p).valid());

    p = SystemParams{};
    p.u2 = -0.1;
    p.lambda = -1.0;
    CHECK(validate_params(p).violations.size() == 2);
}

TEST_CASE("inflow validation") {
    CHECK(validate_inflow(ConstantInflow{0.0}).valid());
    CHECK_FALSE(validate_inflow(ConstantInflow{-0.1}).valid());
    CHECK_FALSE(validate_inflow(ModeResponsiveInflow{0.5, -1.0}).valid());
    CHECK(inflow_in(ModeResponsiveInflow{0.75, 0.5}, Mode::High) == 0.75);
    CHECK(inflow_in(ModeResponsiveInflow{0.75, 0.5}, Mode::Low) == 0.5);
}

TEST_CASE("discharge rates on the documented states") {
    const auto p = SystemParams::nominal();
    auto s = discharge_rates(Mode::High, 0.0, 0.0, 0.6, p);
    CHECK(s.s1 == doctest::Approx(0.6));
    CHECK(s.s2 == doctest::Approx(0.6));

    s = discharge_rates(Mode::Low, 1.0, 1.0, 0.7, p);
    CHECK(s.s1 == doctest::Approx(0.5));
    CHECK(s.s2 == doctest::Approx(0.5));

    s = discharge_rates(Mode::High, 1.0, 0.5, 0.7, p);
    CHECK(s.s1 == doctest::Approx(0.75));
    CHECK(s.s2 == doctest::Approx(1.0));
}

TEST_CASE("spillback engages only on a full buffer with v above the capacity") {
    const auto p = SystemParams::nominal();
    // Full buffer in High: v <= u1, no cap.
    CHECK(discharge_rates(Mode::High, 1.0, 1.0, 0.7, p).s1 == doctest::Approx(0.75));
    // Buffer not full in Low: link 1 discharges at v.
    CHECK(discharge_rates(Mode::Low, 1.0, 0.99, 0.7, p).s1 == doctest::Approx(0.75));
    // Empty link 1 with the buffer full and r < u2: nothing to cap.
    CHECK(discharge_rates(Mode::Low, 0.0, 1.0, 0.4, p).s1 == doctest::Approx(0.4));
}

TEST_CASE("vector field on the documented states") {
    const auto p = SystemParams::nominal();
    auto f = vector_field(Mode::High, 0.0, 0.0, 0.6, p);
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[1] == doctest::Approx(0.0));
    f = vector_field(Mode::Low, 1.0, 1.0, 0.7, p);
    CHECK(f[0] == doctest::Approx(0.2));
    CHECK(f[1] == doctest::Approx(0.0));
    f = vector_field(Mode::High, 1.0, 0.5, 0.7, p);
    CHECK(f[0] == doctest::Approx(-0.05));
    CHECK(f[1] == doctest::Approx(-0.25));
}

TEST_CASE("states outside the state space are rejected") {
    const auto p = SystemParams::nominal();
    CHECK_THROWS_AS((void)discharge_rates(Mode::High, -0.1, 0.0, 0.5, p), ModelError);
    CHECK_THROWS_AS((void)discharge_rates(Mode::High, 0.0, 1.1, 0.5, p), ModelError);
    CHECK_NOTHROW((void)discharge_rates(Mode::High, 0.0, 1.0 + 1e-13, 0.5, p));
}

TEST_CASE("boundaries are flow-invariant and rates come from the case table") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 5000; ++k) {
        SystemParams p;
        p.u2 = 0.6 * unit(gen);
        p.v = p.u2 + (1.0 - p.u2) * unit(gen);
        p.u1 = p.v + unit(gen);
        p.theta = 2.0 * unit(gen);
        const double r = 1.5 * unit(gen);
        // Bias towards the boundaries.
        const double q1 = unit(gen) < 0.5 ? 0.0 : 3.0 * unit(gen);
        const double pick = unit(gen);
        const double q2 = pick < 0.33 ? 0.0 : pick < 0.66 ? p.theta : p.theta * unit(gen);
        for (Mode i : {Mode::High, Mode::Low}) {
            const auto s = discharge_rates(i, q1, q2, r, p);
            const auto f = vector_field(i, q1, q2, r, p);
            INFO("q=(" << q1 << "," << q2 << ") r=" << r << " mode " << mode_index(i));
            CHECK(s.s1 >= 0.0);
            CHECK(s.s2 >= 0.0);
            if (q1 == 0.0) CHECK(f[0] >= -1e-15);
            if (q2 == 0.0) CHECK(f[1] >= -1e-15);
            if (q2 == p.theta) CHECK(f[1] <= 1e-15);
            const double u = p.capacity(i);
            const auto in_table = [&](double x) {
                return x == doctest::Approx(r) || x == doctest::Approx(p.v) || x == doctest::Approx(u);
            };
            CHECK(in_table(s.s1));
            CHECK(in_table(s.s2));
        }
    }
}

TEST_CASE("mass is conserved over an affine piece") {
    const auto p = SystemParams::nominal();
    const double r = 0.7, dt = 0.3;
    const auto s = discharge_rates(Mode::High, 1.0, 0.5, r, p);
    const auto f = vector_field(Mode::High, 1.0, 0.5, r, p);
    CHECK((f[0] + f[1]) * dt == doctest::Approx((r - s.s2) * dt));
}

}

#include <doctest.h>

#include "tandemfluid/simulate.hpp"
#include "tandemfluid/spectral.hpp"
#include "tandemfluid/stability.hpp"

using namespace tandemfluid;

TEST_SUITE("stability") {

TEST_CASE("necessary condition verdicts") {
    const auto p = SystemParams::nominal();
    auto v = check_necessary(0.0, p);
    CHECK(v.prerequisite_ok);
    CHECK(v.holds);
    CHECK(*v.p_hat == 0.0);

    v = check_necessary(0.75, p);
    CHECK_FALSE(v.prerequisite_ok);
    CHECK_FALSE(v.holds);
    CHECK_FALSE(v.p_hat.has_value());
    CHECK_FALSE(v.rhs.has_value());

    v = check_necessary(0.70, p);
    const double ph = finite_buffer_spectrum(0.70, p).p_hat;
    CHECK(*v.p_hat == doctest::Approx(ph));
    CHECK(*v.rhs == doctest::Approx((1 - ph) * 0.75 + ph * 0.5));
    CHECK(v.holds == (0.70 <= (1 - ph) * 0.75 + ph * 0.5));
}

TEST_CASE("singular drift surfaces as an error") {
    CHECK_THROWS_AS((void)check_necessary(0.5, SystemParams::nominal()), SpectralError);
}

TEST_CASE("sufficient condition verdicts") {
    const auto p = SystemParams::nominal();
    const auto c60 = check_sufficient(0.60, p);
    const auto c65 = check_sufficient(0.65, p);
    REQUIRE(c60);
    REQUIRE(c65);
    CHECK_FALSE(check_sufficient(0.70, p));
    for (const auto& c : {*c60, *c65}) {
        CHECK(c.a1 >= kStrictEps);
        CHECK(c.a2 >= kStrictEps);
        CHECK(c.b1 >= kStrictEps);
        CHECK(c.b2 >= kStrictEps);
        CHECK(c.c > 0.0);
        CHECK(c.c <= 1.0);
        CHECK(c.queue_bound() >= p.theta - 1e-9);
    }
    CHECK(certificate_violation(*c60, 0.60, 0.60, p) < 1e-8);
}

TEST_CASE("printed rows come first in the certificate program") {
    const auto prog = certificate_program(0.6, 0.6, SystemParams::nominal());
    CHECK(prog.constraints.size() > kPrintedCertRows);
    CHECK(prog.num_vars() == kNumCertVars);
    // Row 8: d >= c theta.
    const auto& last_printed = prog.constraints[kPrintedCertRows - 1];
    CHECK(last_printed.coeffs[kC] == doctest::Approx(1.0));
    CHECK(last_printed.coeffs[kD] == doctest::Approx(-1.0));
}

TEST_CASE("feedback verdicts") {
    const auto p = SystemParams::nominal();
    for (double r : {0.3, 0.6, 0.65, 0.7}) {
        const auto a = check_necessary(r, p), b = check_necessary_feedback(r, r, p);
        CHECK(a.holds == b.holds);
        CHECK(*a.p_hat == doctest::Approx(*b.p_hat));
    }
    CHECK_FALSE(check_necessary_feedback(0.75, 0.75, p).holds);
    const auto s2 = check_necessary_feedback(0.75, 0.5, p);
    CHECK(s2.holds);
    CHECK(s2.lhs == doctest::Approx(0.625));

    CHECK(check_sufficient_feedback(0.75, 0.5, p).has_value());
    CHECK(check_sufficient_feedback(0.6, 0.6, p).has_value() == check_sufficient(0.6, p).has_value());
    CHECK_FALSE(check_sufficient_feedback(1.0, 1.0, p));
}

TEST_CASE("drift verifier accepts certificates and rejects inflated ones") {
    const auto p = SystemParams::nominal();
    const auto cert = check_sufficient(0.60, p);
    REQUIRE(cert);
    DriftGrid grid{200, 50, 50.0};
    const auto ok = verify_drift(*cert, ConstantInflow{0.60}, p, grid);
    CHECK(ok.pass);
    CHECK(ok.points >= 200 * 50 * 2);

    auto inflated = *cert;
    inflated.c *= 10;
    CHECK_FALSE(verify_drift(inflated, ConstantInflow{0.60}, p, grid).pass);

    const StabilityCertificate tiny{kStrictEps, kStrictEps, kStrictEps, kStrictEps, kStrictEps, kStrictEps};
    CHECK_FALSE(verify_drift(tiny, ConstantInflow{0.74}, p, grid).pass);
}

TEST_CASE("every returned certificate passes the default grid") {
    for (double theta : {0.0, 0.5, 1.0, 3.0}) {
        SystemParams p;
        p.theta = theta;
        for (double r = 0.0; r <= 0.75; r += 0.05) {
            const auto cert = check_sufficient(r, p);
            if (!cert) continue;
            const auto rep = verify_drift(*cert, ConstantInflow{r}, p);
            INFO("theta=" << theta << " r=" << r << " excess=" << rep.max_excess);
            CHECK(rep.pass);
        }
    }
    const auto p = SystemParams::nominal();
    const auto cert = check_sufficient_feedback(0.75, 0.5, p);
    REQUIRE(cert);
    CHECK(verify_drift(*cert, ModeResponsiveInflow{0.75, 0.5}, p).pass);
}

TEST_CASE("malformed grids are rejected") {
    const StabilityCertificate c{1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS((void)verify_drift(c, ConstantInflow{0.5}, SystemParams::nominal(), DriftGrid{1, 5, 0}),
                    ModelError);
    CHECK_THROWS_AS((void)verify_drift(c, ConstantInflow{0.5}, SystemParams::nominal(), DriftGrid{5, 5, -1}),
                    ModelError);
}

TEST_CASE("certificate feasibility is monotone in the inflow") {
    const auto p = SystemParams::nominal();
    bool seen_infeasible = false;
    for (double r = 0.0; r <= 0.75 + 1e-12; r += 0.005) {
        const bool feasible = check_sufficient(r, p).has_value();
        if (seen_infeasible) CHECK_FALSE(feasible);
        seen_infeasible = seen_infeasible || !feasible;
    }
    CHECK(seen_infeasible);
}

TEST_CASE("simulated mean queue respects the certified bound") {
    const auto p = SystemParams::nominal();
    const auto cert = check_sufficient(0.65, p);
    REQUIRE(cert);
    SimConfig cfg;
    cfg.horizon = 1e6;
    cfg.replications = 20;
    cfg.seed = 9;
    const auto stats = simulate(TwoLink{}, ConstantInflow{0.65}, p, cfg);
    CHECK(stats.time_avg_total_queue.mean <= cert->queue_bound() + 3 * stats.time_avg_total_queue.std_error);
}

TEST_CASE("failed necessary condition shows linear queue growth") {
    const auto p = SystemParams::nominal();
    REQUIRE_FALSE(check_necessary(0.74, p).holds);
    SimConfig cfg;
    cfg.horizon = 1e5;
    cfg.replications = 20;
    cfg.seed = 4;
    const auto stats = simulate(TwoLink{}, ConstantInflow{0.74}, p, cfg);
    CHECK(stats.terminal_q_over_t.mean > 3 * stats.terminal_q_over_t.std_error);
}

}

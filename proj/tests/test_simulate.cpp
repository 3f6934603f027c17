#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "tandemfluid/simulate.hpp"
#include "tandemfluid/spectral.hpp"

using namespace tandemfluid;

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

std::vector<double> event_times(const Topology& topo, const InflowSpec& inflow, const SystemParams& p,
                                const SimConfig& cfg) {
    std::vector<double> times;
    (void)simulate_replication(topo, inflow, p, cfg, 0, [&](const Segment& s) { times.push_back(s.t1); });
    return times;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("next event on the documented states") {
    const auto p = SystemParams::nominal();
    auto ev = next_event(HybridState{Mode::Low, 1.0, 0.9}, 0.7, kNever, p);
    CHECK(ev.kind == EventKind::Q2Fills);
    CHECK(ev.dt == doctest::Approx(0.4));

    ev = next_event(HybridState{Mode::High, 0.0, 0.0}, 0.6, 2.5, p);
    CHECK(ev.kind == EventKind::ModeSwitch);
    CHECK(ev.dt == 2.5);

    ev = next_event(HybridState{Mode::Low, 1.0, 0.9}, 0.7, 0.05, p);
    CHECK(ev.kind == EventKind::ModeSwitch);
    CHECK(ev.dt == 0.05);

    // q1 drains at 0.05 while q2 drains at 0.25: q2 empties first at 0.5 / 0.25 = 2.
    ev = next_event(HybridState{Mode::High, 1.0, 0.5}, 0.7, kNever, p);
    CHECK(ev.kind == EventKind::Q2Empties);
    CHECK(ev.dt == doctest::Approx(2.0));

    CHECK_THROWS_AS((void)next_event(HybridState{Mode::High, -1.0, 0.0}, 0.5, 1.0, p), ModelError);
}

TEST_CASE("zero inflow drains to empty") {
    SimConfig cfg;
    cfg.horizon = 1000;
    cfg.warmup = 100;
    cfg.initial.q = {1.0, 0.0, 0.0};
    const auto stats = simulate(TwoLink{}, ConstantInflow{0.0}, SystemParams::nominal(), cfg);
    CHECK(stats.time_avg_total_queue.mean == 0.0);
    CHECK(stats.mean_throughput.mean == 0.0);
    CHECK(stats.replications[0].final_total == 0.0);
}

TEST_CASE("configuration validation") {
    SimConfig cfg;
    CHECK(validate_config(cfg).valid());
    cfg.warmup = cfg.horizon;
    CHECK_FALSE(validate_config(cfg).valid());
    cfg = SimConfig{};
    cfg.replications = 0;
    CHECK_FALSE(validate_config(cfg).valid());
    cfg = SimConfig{};
    cfg.initial.q[0] = -1;
    CHECK_FALSE(validate_config(cfg).valid());
    CHECK_THROWS_AS((void)simulate(TwoLink{}, ConstantInflow{0.5}, SystemParams::nominal(), cfg), ModelError);
    CHECK_THROWS_AS((void)simulate(Split{-1.0, 1.0}, ConstantInflow{0.5}, SystemParams::nominal(), SimConfig{}),
                    ModelError);
}

TEST_CASE("halving the horizon reproduces the trajectory prefix") {
    const auto p = SystemParams::nominal();
    SimConfig cfg;
    cfg.horizon = 2000;
    cfg.seed = 77;
    const auto full = event_times(TwoLink{}, ConstantInflow{0.68}, p, cfg);
    cfg.horizon = 1000;
    const auto half = event_times(TwoLink{}, ConstantInflow{0.68}, p, cfg);
    REQUIRE(half.size() > 100);
    for (std::size_t k = 0; k + 1 < half.size(); ++k) CHECK(half[k] == full[k]);
    CHECK(half.back() == 1000.0);
}

TEST_CASE("state space and mass balance on random runs") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        SystemParams p;
        p.u2 = 0.2 + 0.4 * unit(gen);
        p.v = p.u2 + 0.4 * unit(gen);
        p.u1 = p.v + 0.5 * unit(gen);
        p.lambda = 0.2 + 2 * unit(gen);
        p.mu = 0.2 + 2 * unit(gen);
        p.theta = trial % 5 == 0 ? 0.0 : 2 * unit(gen);
        const double r = 1.2 * p.u1 * unit(gen);
        SimConfig cfg;
        cfg.horizon = 2000;
        cfg.seed = trial;
        cfg.initial = {Mode::Low, {3 * unit(gen), p.theta * unit(gen), 0.0}};
        const auto st = simulate_replication(TwoLink{}, ConstantInflow{r}, p, cfg, 0);
        INFO("trial " << trial);
        CHECK(st.max_state_violation == 0.0);
        const double lhs = st.total_admitted - st.total_exit;
        const double rhs = st.final_total - st.initial_total;
        CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, st.total_admitted));
        CHECK(st.frac_time_q2_full >= 0.0);
        CHECK(st.frac_time_q2_full <= 1.0);
        CHECK(st.frac_time_q1_zero >= 0.0);
        CHECK(st.frac_time_q1_zero <= 1.0 + 1e-12);
    }
}

TEST_CASE("mode occupation matches the steady state") {
    SystemParams p;
    p.lambda = 0.7;
    p.mu = 1.9;
    SimConfig cfg;
    cfg.horizon = 2e4;
    cfg.replications = 20;
    const auto stats = simulate(TwoLink{}, ConstantInflow{0.6}, p, cfg);
    const auto pi = steady_state(p.lambda, p.mu);
    CHECK(std::abs(stats.frac_time_mode[0].mean - pi.p1) < 3 * stats.frac_time_mode[0].std_error);
    CHECK(stats.frac_time_mode[0].mean + stats.frac_time_mode[1].mean == doctest::Approx(1.0));
}

TEST_CASE("results do not depend on the worker count") {
    SimConfig cfg;
    cfg.horizon = 5000;
    cfg.replications = 6;
    cfg.threads = 1;
    const auto a = simulate(TwoLink{}, ConstantInflow{0.66}, SystemParams::nominal(), cfg);
    cfg.threads = 4;
    const auto b = simulate(TwoLink{}, ConstantInflow{0.66}, SystemParams::nominal(), cfg);
    CHECK(a.time_avg_total_queue.mean == b.time_avg_total_queue.mean);
    CHECK(a.time_avg_total_queue.std_error == b.time_avg_total_queue.std_error);
}

TEST_CASE("split counterexample grows without bound") {
    SystemParams p;
    p.theta = 0.0;
    SimConfig cfg;
    cfg.horizon = 1e5;
    cfg.replications = 20;
    const auto stats = simulate(Split{2.0, 1.0}, ConstantInflow{1.6}, p, cfg);
    CHECK(stats.terminal_q_over_t.mean > 3 * stats.terminal_q_over_t.std_error);
    CHECK(stats.terminal_q_over_t.mean > 0.05);
}

TEST_CASE("merge stability depends on how the inflow is distributed") {
    const auto p = SystemParams::nominal();
    SimConfig cfg;
    cfg.horizon = 2e4;
    cfg.replications = 10;
    const auto [bad, good] = simulate_merge_stability_demo(0.4, {0.35, 0.05}, {0.2, 0.2}, 0.3, 0.5, p, cfg);
    CHECK(bad.terminal_q_over_t.mean == doctest::Approx(0.05).epsilon(0.01));
    CHECK(good.terminal_q_over_t.mean < 1e-3);
    CHECK(good.time_avg_total_queue.mean < 1.0);

    cfg.initial.q = {1.0, 1.0, 0.5};
    const auto [idle_a, idle_b] = simulate_merge_stability_demo(0.0, {0.0, 0.0}, {0.0, 0.0}, 0.3, 0.5, p, cfg);
    CHECK(idle_a.replications[0].final_total == 0.0);
    CHECK(idle_b.replications[0].final_total == 0.0);

    CHECK_THROWS_AS((void)simulate_merge_stability_demo(0.4, {0.2, 0.1}, {0.2, 0.2}, 0.3, 0.5, p, cfg), ModelError);
    CHECK_THROWS_AS((void)simulate_merge_stability_demo(0.4, {0.25, 0.15}, {0.2, 0.2}, 0.3, 0.5, p, cfg),
                    ModelError);
    CHECK_THROWS_AS((void)simulate_merge_stability_demo(0.4, {0.35, 0.05}, {0.05, 0.35}, 0.3, 0.3, p, cfg),
                    ModelError);
}

TEST_CASE("network flows honour the junction rules") {
    const auto p = SystemParams::nominal();
    // Merge with a full link 3 in Low: link 1 takes priority for u2 = 0.5.
    auto f = network_flows(Merge{0.4, 0.4, 0.3}, NetState{Mode::Low, {1.0, 1.0, 1.0}}, ConstantInflow{0.3}, p);
    CHECK(f.s[0] == doctest::Approx(0.4));
    CHECK(f.s[1] == doctest::Approx(0.1));
    CHECK(f.dq[2] == doctest::Approx(0.0));
    // Split with a full link 3 in Low: s1 capped at 2 u2.
    f = network_flows(Split{2.0, 1.0}, NetState{Mode::Low, {1.0, 0.0, 0.0}}, ConstantInflow{1.6}, SystemParams{0.75, 1, 0.5, 1, 1, 0});
    CHECK(f.s[0] == doctest::Approx(1.0));
    CHECK(f.dq[0] == doctest::Approx(0.6));
    CHECK(f.exit == doctest::Approx(1.0));
}

TEST_CASE("occupation measure integrates affine pieces exactly") {
    OccupationMeasure occ(2.0, 4);
    occ.add(0.0, 0.0, 1.0);   // atom
    occ.add(0.0, 1.0, 2.0);   // uniform over [0, 2]
    occ.add(3.0, 0.0, 1.0);   // beyond range
    CHECK(occ.total_time() == doctest::Approx(4.0));
    CHECK(occ.atom_at_zero() == doctest::Approx(0.25));
    CHECK(occ.cdf_at_edge(0) == doctest::Approx(0.25));
    CHECK(occ.cdf_at_edge(2) == doctest::Approx(0.5));
    CHECK(occ.cdf_at_edge(4) == doctest::Approx(0.75));
    CHECK(occ.edge(2) == doctest::Approx(1.0));
    const double ks = occ.ks_distance([](double x) { return x < 2.0 ? 0.25 + 0.25 * x : 1.0; });
    CHECK(ks == doctest::Approx(0.25));
    CHECK_THROWS_AS(OccupationMeasure(0.0, 4), ModelError);
}

TEST_CASE("infinite-buffer link matches its invariant law") {
    const auto p = SystemParams::nominal();
    const auto m = bpdq_invariant_measure(0.7, p);
    OccupationMeasure occ(30.0, 6000);
    SimConfig cfg;
    cfg.horizon = 1e6;
    cfg.seed = 12;
    const auto st = simulate_replication(SingleInfinite{}, ConstantInflow{0.7}, p, cfg, 0,
                                         [&](const Segment& s) { occ.add(s.start.q[0], s.flows.dq[0], s.t1 - s.t0); });
    CHECK(occ.ks_distance([&](double x) { return m.cdf(x); }) < 0.01);
    CHECK(occ.atom_at_zero() == doctest::Approx(m.z1).epsilon(0.05));
    CHECK(st.time_avg_total_queue == doctest::Approx(m.mean()).epsilon(0.05));
}

TEST_CASE("full-fraction estimator") {
    const auto p = SystemParams::nominal();
    for (double r : {0.55, 0.65}) {
        const auto est = estimate_full_fraction(r, p, 2e5, 3);
        const double ph = finite_buffer_spectrum(r, p).p_hat;
        CHECK(est.tilt > 0.0);
        CHECK(std::abs(est.value - ph) < 4 * est.std_error);
        CHECK(est.std_error < 0.05 * ph);
    }
    SystemParams zero = p;
    zero.theta = 0.0;
    CHECK(estimate_full_fraction(0.6, zero, 1e5, 1).value == doctest::Approx(0.5).epsilon(0.02));
    CHECK(estimate_full_fraction(0.4, p, 1e4, 1).value == 0.0);
    CHECK_THROWS_AS((void)estimate_full_fraction(0.76, p, 1e4, 1), ModelError);
    CHECK_THROWS_AS((void)estimate_full_fraction(0.6, p, 0.0, 1), ModelError);
}

TEST_CASE("trajectory dump") {
    SimConfig cfg;
    cfg.horizon = 50;
    std::string rows = trajectory_header(TwoLink{});
    (void)simulate_replication(TwoLink{}, ConstantInflow{0.7}, SystemParams::nominal(), cfg, 0,
                               trajectory_writer(TwoLink{}, rows));
    CHECK(rows.rfind("t,mode,q1,q2,s1,s2\n", 0) == 0);
    CHECK(rows.find("\n0,1,0,0,0.7,0.7\n") != std::string::npos);
    CHECK(trajectory_header(Merge{}) == "t,mode,q1,q2,q3,s1,s2,s3\n");
}

TEST_CASE("parallel_for covers every index and propagates errors") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t k) { if (k == 5) throw ModelError("boom"); }), ModelError);
    CHECK(worker_count(3) <= 3);
    CHECK(worker_count() >= 1);
}

}

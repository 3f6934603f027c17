#include "tandemfluid/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>
#include <tuple>

#include "tandemfluid/format.hpp"

namespace tandemfluid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool at_zero(double q) { return q <= kBoundaryTol; }
bool at_cap(double q, double cap) { return q >= cap - kBoundaryTol; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::array<double, 3> caps_of(const Topology& topo, const SystemParams& p) {
    return std::visit(overloaded{
                          [&](const TwoLink&) { return std::array<double, 3>{kInf, p.theta, kInf}; },
                          [&](const SingleFinite&) { return std::array<double, 3>{kInf, p.theta, kInf}; },
                          [&](const SingleInfinite&) { return std::array<double, 3>{kInf, kInf, kInf}; },
                          [&](const Merge&) { return std::array<double, 3>{kInf, kInf, p.theta}; },
                          [&](const Split&) { return std::array<double, 3>{kInf, kInf, p.theta}; },
                      },
                      topo);
}

// Index of the finite-buffer link, or 3 when there is none.
std::size_t finite_link(const Topology& topo) {
    if (std::holds_alternative<TwoLink>(topo) || std::holds_alternative<SingleFinite>(topo)) return 1;
    if (std::holds_alternative<SingleInfinite>(topo)) return 3;
    return 2;
}

// Queue whose growth rate is reported as terminal_q_over_t.
std::size_t growth_link(const Topology& topo) {
    return std::holds_alternative<SingleFinite>(topo) ? 1 : 0;
}

EventKind empties_kind(std::size_t k) {
    static constexpr EventKind kinds[] = {EventKind::Q1Empties, EventKind::Q2Empties,
                                          EventKind::Q3Empties};
    return kinds[k];
}

EventKind fills_kind(std::size_t k) {
    return k == 2 ? EventKind::Q3Fills : EventKind::Q2Fills;
}

void snap(NetState& s, const std::array<double, 3>& caps) {
    for (std::size_t k = 0; k < 3; ++k) {
        if (at_zero(s.q[k])) s.q[k] = 0.0;
        if (std::isfinite(caps[k]) && at_cap(s.q[k], caps[k])) s.q[k] = caps[k];
    }
}

}  // namespace

const char* topology_name(const Topology& t) {
    static constexpr const char* names[] = {"two-link", "single-finite", "single-infinite", "merge",
                                            "split"};
    return names[t.index()];
}

std::size_t link_count(const Topology& t) {
    return std::holds_alternative<Merge>(t) || std::holds_alternative<Split>(t) ? 3 : 2;
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::ModeSwitch: return "mode-switch";
        case EventKind::Q1Empties: return "q1-empties";
        case EventKind::Q2Empties: return "q2-empties";
        case EventKind::Q2Fills: return "q2-fills";
        case EventKind::Q3Empties: return "q3-empties";
        case EventKind::Q3Fills: return "q3-fills";
        case EventKind::Horizon: return "horizon";
    }
    return "unknown";
}

ValidationReport validate_config(const SimConfig& cfg) {
    ValidationReport report;
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        report.violations.emplace_back("horizon must be positive and finite");
    }
    if (!(cfg.warmup >= 0.0) || !(cfg.warmup < cfg.horizon)) {
        report.violations.emplace_back("warmup must satisfy 0 <= warmup < horizon");
    }
    if (cfg.replications < 1) report.violations.emplace_back("replications must be at least 1");
    for (double q : cfg.initial.q) {
        if (!(q >= 0.0) || !std::isfinite(q)) {
            report.violations.emplace_back("initial queues must be finite and non-negative");
            break;
        }
    }
    return report;
}

Flows network_flows(const Topology& topo, const NetState& state, const InflowSpec& inflow,
                    const SystemParams& p) {
    const double r = inflow_in(inflow, state.mode);
    const double u = p.capacity(state.mode);
    const auto& q = state.q;
    Flows f;
    std::visit(overloaded{
                   [&](const TwoLink&) {
                       const auto s = discharge_rates(state.mode, q[0], q[1], r, p);
                       f.s = {s.s1, s.s2, 0.0};
                       f.dq = {r - s.s1, s.s1 - s.s2, 0.0};
                       f.admitted = r;
                       f.exit = s.s2;
                   },
                   [&](const SingleFinite&) {
                       const double in = at_cap(q[1], p.theta) ? std::min(r, u) : r;
                       const double out = at_zero(q[1]) ? std::min(in, u) : u;
                       f.s = {in, out, 0.0};
                       f.dq = {0.0, in - out, 0.0};
                       f.admitted = in;
                       f.exit = out;
                   },
                   [&](const SingleInfinite&) {
                       const double out = at_zero(q[0]) ? std::min(r, u) : u;
                       f.s = {out, 0.0, 0.0};
                       f.dq = {r - out, 0.0, 0.0};
                       f.admitted = r;
                       f.exit = out;
                   },
                   [&](const Merge& m) {
                       double s1 = at_zero(q[0]) ? std::min(r, m.v1) : m.v1;
                       double s2 = at_zero(q[1]) ? std::min(m.r2, m.v2) : m.v2;
                       if (at_cap(q[2], p.theta)) {
                           s1 = std::min(s1, u);
                           s2 = std::min(s2, u - s1);
                       }
                       const double s3 = at_zero(q[2]) ? std::min(s1 + s2, u) : u;
                       f.s = {s1, s2, s3};
                       f.dq = {r - s1, m.r2 - s2, s1 + s2 - s3};
                       f.admitted = r + m.r2;
                       f.exit = s3;
                   },
                   [&](const Split& sp) {
                       double s1 = at_zero(q[0]) ? std::min(r, sp.v1) : sp.v1;
                       // Half of link 1's outflow must fit into a full link 3.
                       if (at_cap(q[2], p.theta)) s1 = std::min(s1, 2.0 * u);
                       const double half = 0.5 * s1;
                       const double s2 = at_zero(q[1]) ? std::min(half, sp.v2) : sp.v2;
                       const double s3 = at_zero(q[2]) ? std::min(half, u) : u;
                       f.s = {s1, s2, s3};
                       f.dq = {r - s1, half - s2, half - s3};
                       f.admitted = r;
                       f.exit = s2 + s3;
                   },
               },
               topo);
    return f;
}

Event next_event(const Topology& topo, const NetState& state, const InflowSpec& inflow,
                 double time_to_switch, const SystemParams& p) {
    const auto caps = caps_of(topo, p);
    const auto flows = network_flows(topo, state, inflow, p);
    Event ev{time_to_switch, EventKind::ModeSwitch};
    for (std::size_t k = 0; k < 3; ++k) {
        const double dq = flows.dq[k];
        const double q = state.q[k];
        if (dq < 0.0 && !at_zero(q)) {
            const double t = q / -dq;
            if (t < ev.dt) ev = {t, empties_kind(k)};
        } else if (dq > 0.0 && std::isfinite(caps[k]) && !at_cap(q, caps[k])) {
            const double t = (caps[k] - q) / dq;
            if (t < ev.dt) ev = {t, fills_kind(k)};
        }
    }
    return ev;
}

Event next_event(const HybridState& state, double r, double time_to_switch, const SystemParams& p) {
    require_in_state_space(state.q1, state.q2, p);
    const NetState net{state.mode, {state.q1, state.q2, 0.0}};
    return next_event(Topology{TwoLink{}}, net, InflowSpec{ConstantInflow{r}}, time_to_switch, p);
}

Estimate summarize(const std::vector<double>& samples) {
    Estimate e;
    if (samples.empty()) return e;
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double n = static_cast<double>(samples.size());
    e.mean = sum / n;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

ReplicationStats simulate_replication(const Topology& topo, const InflowSpec& inflow,
                                      const SystemParams& p, const SimConfig& cfg,
                                      std::size_t replication, const SegmentObserver& observer) {
    const auto caps = caps_of(topo, p);
    const std::size_t full_link = finite_link(topo);
    const std::size_t grow_link = growth_link(topo);

    Rng rng = Rng::stream(cfg.seed, replication);
    NetState state = cfg.initial;
    for (std::size_t k = 0; k < 3; ++k) state.q[k] = std::min(state.q[k], caps[k]);
    if (std::holds_alternative<SingleFinite>(topo)) state.q[0] = 0.0;
    snap(state, caps);

    ReplicationStats st;
    st.initial_total = state.q[0] + state.q[1] + state.q[2];

    const double window_lo = cfg.warmup, window_hi = cfg.horizon;
    double queue_area = 0.0, full_time = 0.0, zero_time = 0.0, exit_area = 0.0;
    std::array<double, 2> mode_time{};

    double t = 0.0;
    double to_switch = sample_holding_time(state.mode, p, rng);
    while (t < cfg.horizon) {
        const auto flows = network_flows(topo, state, inflow, p);
        Event ev = next_event(topo, state, inflow, to_switch, p);
        if (t + ev.dt >= cfg.horizon) ev = {cfg.horizon - t, EventKind::Horizon};
        const double dt = ev.dt;

        const double lo = std::max(t, window_lo), hi = std::min(t + dt, window_hi);
        if (hi > lo) {
            const double len = hi - lo;
            double sum_dq = 0.0, sum_q = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                sum_dq += flows.dq[k];
                sum_q += state.q[k];
            }
            const double at_lo = sum_q + sum_dq * (lo - t);
            queue_area += len * (at_lo + 0.5 * sum_dq * len);
            if (full_link < 3 && at_cap(state.q[full_link], caps[full_link]) &&
                flows.dq[full_link] >= 0.0) {
                full_time += len;
            }
            if (at_zero(state.q[0]) && flows.dq[0] <= 0.0) zero_time += len;
            mode_time[mode_index(state.mode)] += len;
            exit_area += flows.exit * len;
        }
        st.total_admitted += flows.admitted * dt;
        st.total_exit += flows.exit * dt;

        if (observer) observer(Segment{replication, t, t + dt, state, flows, ev.kind});

        for (std::size_t k = 0; k < 3; ++k) {
            double next = state.q[k] + flows.dq[k] * dt;
            const double excess = std::max(-next, next - caps[k]);
            st.max_state_violation = std::max(st.max_state_violation, excess - kBoundaryTol);
            state.q[k] = std::clamp(next, 0.0, caps[k]);
        }
        switch (ev.kind) {
            case EventKind::Q1Empties: state.q[0] = 0.0; break;
            case EventKind::Q2Empties: state.q[1] = 0.0; break;
            case EventKind::Q3Empties: state.q[2] = 0.0; break;
            case EventKind::Q2Fills: state.q[1] = caps[1]; break;
            case EventKind::Q3Fills: state.q[2] = caps[2]; break;
            default: break;
        }
        snap(state, caps);

        t += dt;
        to_switch -= dt;
        if (ev.kind == EventKind::ModeSwitch) {
            state.mode = other(state.mode);
            to_switch = sample_holding_time(state.mode, p, rng);
        }
        ++st.events;
    }
    st.max_state_violation = std::max(st.max_state_violation, 0.0);

    const double window = window_hi - window_lo;
    st.time_avg_total_queue = queue_area / window;
    st.frac_time_q2_full = full_time / window;
    st.frac_time_q1_zero = zero_time / window;
    st.frac_time_mode = {mode_time[0] / window, mode_time[1] / window};
    st.mean_throughput = exit_area / window;
    st.final_total = state.q[0] + state.q[1] + state.q[2];
    st.terminal_q_over_t = state.q[grow_link] / cfg.horizon;
    return st;
}

SimStats simulate(const Topology& topo, const InflowSpec& inflow, const SystemParams& p,
                  const SimConfig& cfg) {
    if (auto rep = validate_params(p); !rep) throw ModelError(rep.violations.front());
    if (auto rep = validate_inflow(inflow); !rep) throw ModelError(rep.violations.front());
    if (auto rep = validate_config(cfg); !rep) throw ModelError(rep.violations.front());
    if (const auto* m = std::get_if<Merge>(&topo)) {
        if (!(m->v1 >= 0 && m->v2 >= 0 && m->r2 >= 0)) {
            throw ModelError("merge capacities and inflow must be non-negative");
        }
    }
    if (const auto* s = std::get_if<Split>(&topo)) {
        if (!(s->v1 >= 0 && s->v2 >= 0)) throw ModelError("split capacities must be non-negative");
    }

    SimStats out;
    out.replications.resize(cfg.replications);
    parallel_for(cfg.replications, worker_count(cfg.threads), [&](std::size_t k) {
        out.replications[k] = simulate_replication(topo, inflow, p, cfg, k);
    });

    auto collect = [&](auto field) {
        std::vector<double> xs;
        xs.reserve(out.replications.size());
        for (const auto& r : out.replications) xs.push_back(field(r));
        return summarize(xs);
    };
    out.time_avg_total_queue = collect([](const ReplicationStats& r) { return r.time_avg_total_queue; });
    out.frac_time_q2_full = collect([](const ReplicationStats& r) { return r.frac_time_q2_full; });
    out.frac_time_q1_zero = collect([](const ReplicationStats& r) { return r.frac_time_q1_zero; });
    out.frac_time_mode[0] = collect([](const ReplicationStats& r) { return r.frac_time_mode[0]; });
    out.frac_time_mode[1] = collect([](const ReplicationStats& r) { return r.frac_time_mode[1]; });
    out.terminal_q_over_t = collect([](const ReplicationStats& r) { return r.terminal_q_over_t; });
    out.mean_throughput = collect([](const ReplicationStats& r) { return r.mean_throughput; });
    return out;
}

std::pair<SimStats, SimStats> simulate_merge_stability_demo(double total,
                                                            std::pair<double, double> unbalanced,
                                                            std::pair<double, double> balanced,
                                                            double v1, double v2,
                                                            const SystemParams& p,
                                                            const SimConfig& cfg) {
    constexpr double kSumTol = 1e-9;
    const auto sums_to = [&](std::pair<double, double> s) {
        return s.first >= 0 && s.second >= 0 && std::abs(s.first + s.second - total) <= kSumTol;
    };
    if (!sums_to(unbalanced) || !sums_to(balanced)) {
        throw ModelError("merge inflow pairs must be non-negative and sum to the total");
    }
    if (total > 0.0 && !(unbalanced.first > v1)) {
        throw ModelError("unbalanced merge split must send more than v1 to link 1");
    }
    if (!(balanced.first <= v1 && balanced.second <= v2)) {
        throw ModelError("balanced merge split must respect both upstream capacities");
    }
    auto run = [&](std::pair<double, double> split) {
        return simulate(Merge{v1, v2, split.second}, ConstantInflow{split.first}, p, cfg);
    };
    return {run(unbalanced), run(balanced)};
}

OccupationMeasure::OccupationMeasure(double x_max, std::size_t bins)
    : x_max_(x_max), mass_(bins, 0.0) {
    if (!(x_max > 0.0) || bins == 0) throw ModelError("occupation measure needs x_max > 0 and bins > 0");
}

void OccupationMeasure::add(double q_start, double slope, double duration) {
    if (!(duration > 0.0)) return;
    total_ += duration;
    const double width = x_max_ / static_cast<double>(bins());
    if (slope == 0.0) {
        if (at_zero(q_start)) {
            atom_ += duration;
        } else if (q_start >= x_max_) {
            overflow_ += duration;
        } else {
            mass_[static_cast<std::size_t>(q_start / width)] += duration;
        }
        return;
    }
    const double q_end = q_start + slope * duration;
    const double lo = std::max(0.0, std::min(q_start, q_end));
    const double hi = std::max(q_start, q_end);
    const double inv_speed = 1.0 / std::abs(slope);
    if (hi > x_max_) overflow_ += (hi - std::max(lo, x_max_)) * inv_speed;
    if (lo >= x_max_) return;
    const double top = std::min(hi, x_max_);
    auto k = static_cast<std::size_t>(lo / width);
    for (; k < bins(); ++k) {
        const double b_lo = width * static_cast<double>(k);
        const double b_hi = b_lo + width;
        if (b_lo >= top) break;
        const double overlap = std::min(top, b_hi) - std::max(lo, b_lo);
        if (overlap > 0.0) mass_[k] += overlap * inv_speed;
    }
}

double OccupationMeasure::cdf_at_edge(std::size_t k) const {
    double cum = atom_;
    for (std::size_t j = 0; j < k && j < bins(); ++j) cum += mass_[j];
    return total_ > 0 ? cum / total_ : 0.0;
}

double OccupationMeasure::ks_distance(const std::function<double(double)>& reference_cdf) const {
    if (!(total_ > 0.0)) return 1.0;
    double cum = atom_;
    double worst = 0.0;
    for (std::size_t k = 0; k <= bins(); ++k) {
        worst = std::max(worst, std::abs(cum / total_ - reference_cdf(edge(k))));
        if (k < bins()) cum += mass_[k];
    }
    return worst;
}

namespace {

// Largest eigenvalue of Lambda + eta * D for the 2-state switching chain.
double perron_root(double eta, double d1, double d2, double lambda, double mu) {
    const double a = -lambda + eta * d1, b = lambda, c = mu, d = -mu + eta * d2;
    const double half_trace = 0.5 * (a + d);
    const double det = a * d - b * c;
    return half_trace + std::sqrt(std::max(half_trace * half_trace - det, 0.0));
}

}  // namespace

FullFractionEstimate estimate_full_fraction(double r, const SystemParams& p, double budget,
                                            std::uint64_t seed) {
    const double d1 = r - p.u1, d2 = r - p.u2;
    const double lambda = p.lambda, mu = p.mu;
    if (!(d1 < 0.0)) throw ModelError("full-fraction estimator needs r < u1");
    if (!(mu * d1 + lambda * d2 < 0.0)) throw ModelError("full-fraction estimator needs negative mean drift");
    if (!(budget > 0.0)) throw ModelError("simulation budget must be positive");
    FullFractionEstimate est;
    if (d2 <= 0.0) return est;

    // Tilt eta > 0 with zero Perron root; switching rates become lambda - eta d1 and mu - eta d2.
    double eta = 0.0;
    if (p.theta > 0.0) {
        double lo = 0.0, hi = 1.0;
        while (perron_root(hi, d1, d2, lambda, mu) <= 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (perron_root(mid, d1, d2, lambda, mu) < 0.0 ? lo : hi) = mid;
        }
        eta = hi;
    }
    est.tilt = eta;
    const double tilted_rate[2] = {lambda - eta * d1, mu - eta * d2};
    const double rate[2] = {lambda, mu};
    const double drift[2] = {d1, d2};

    Rng rng = Rng::stream(seed, 0);

    // A cycle is an idle High period at q = 0 (mean 1/lambda), an excursion from
    // (Low, 0) until it fills or empties, and, if it filled, a run from (Low, theta)
    // back to empty. By the strong Markov property every such run is identically
    // distributed, so
    //   p = P(fill) E[full] / (1/lambda + E[pre-fill time] + P(fill) E[post-fill time]).
    // P(fill) is estimated under the tilted rates with likelihood-ratio weights; the
    // excursion and post-fill times use the original rates.
    const double share = budget / 3.0;

    // Runs the excursion from (Low, 0); returns (filled, duration, log likelihood ratio).
    const auto excursion = [&](const double* rates) {
        double q = 0.0, log_lr = 0.0, elapsed = 0.0;
        int m = 1;
        while (true) {
            const double x = rng.exponential(rates[m]);
            const double to_boundary = m == 1 ? (p.theta - q) / d2 : q / -d1;
            if (x >= to_boundary) {
                // Censored sojourn: survival ratio of the original to the sampling rate.
                log_lr += -(rate[m] - rates[m]) * to_boundary;
                return std::tuple{m == 1, elapsed + to_boundary, log_lr};
            }
            q += drift[m] * x;
            log_lr += std::log(rate[m] / rates[m]) - (rate[m] - rates[m]) * x;
            elapsed += x;
            m = 1 - m;
        }
    };

    // Each sample is charged the idle period of its cycle as well, so runs of zero
    // length (theta = 0) still consume budget.
    const double idle = 1.0 / lambda;
    std::vector<double> fill_weights;
    double used = 0.0;
    while (used < share) {
        const auto [filled, elapsed, log_lr] = excursion(tilted_rate);
        used += idle + elapsed;
        fill_weights.push_back(filled ? std::exp(log_lr) : 0.0);
    }

    std::vector<double> pre_times;
    used = 0.0;
    while (used < share) {
        const double elapsed = std::get<1>(excursion(rate));
        used += idle + elapsed;
        pre_times.push_back(elapsed);
    }

    // Time spent full in a Low sojourn is an independent Exp(mu) residual that does
    // not affect the rest of the run, so its mean replaces the draw.
    const double full_stint = 1.0 / mu;
    std::vector<std::array<double, 2>> post;  // (full time, duration)
    used = 0.0;
    while (used < share) {
        double q = p.theta, full = full_stint, elapsed = full_stint;
        int m = 0;
        while (true) {
            const double x = rng.exponential(rate[m]);
            if (m == 0) {
                if (const double to_empty = q / -d1; x >= to_empty) {
                    elapsed += to_empty;
                    break;
                }
                q += d1 * x;
                elapsed += x;
            } else if (const double to_fill = (p.theta - q) / d2; x >= to_fill) {
                q = p.theta;
                full += full_stint;
                elapsed += to_fill + full_stint;
            } else {
                q += d2 * x;
                elapsed += x;
            }
            m = 1 - m;
        }
        used += idle + elapsed;
        post.push_back({full, elapsed});
    }

    const auto fill = summarize(fill_weights), pre = summarize(pre_times);
    double full = 0.0, post_time = 0.0;
    const double n = static_cast<double>(post.size());
    for (const auto& [f, d] : post) {
        full += f / n;
        post_time += d / n;
    }
    double var_full = 0.0, var_post = 0.0, cov = 0.0;
    if (post.size() > 1) {
        for (const auto& [f, d] : post) {
            var_full += (f - full) * (f - full);
            var_post += (d - post_time) * (d - post_time);
            cov += (f - full) * (d - post_time);
        }
        const double scale = 1.0 / ((n - 1) * n);
        var_full *= scale;
        var_post *= scale;
        cov *= scale;
    }

    const double cycle = idle + pre.mean + fill.mean * post_time;
    est.value = fill.mean * full / cycle;

    // Delta method over the three independent sample sets.
    const double g_fill = full / cycle - est.value * post_time / cycle;
    const double g_pre = -est.value / cycle;
    const double g_full = fill.mean / cycle;
    const double g_post = -est.value * fill.mean / cycle;
    const double var = g_fill * g_fill * fill.std_error * fill.std_error +
                       g_pre * g_pre * pre.std_error * pre.std_error + g_full * g_full * var_full +
                       g_post * g_post * var_post + 2 * g_full * g_post * cov;
    est.std_error = std::sqrt(std::max(var, 0.0));
    est.tilted_cycles = fill_weights.size();
    est.plain_cycles = pre_times.size() + post.size();
    return est;
}

unsigned worker_count(unsigned requested) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (requested > 0) n = requested;
    if (const char* env = std::getenv("TANDEMFLUID_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), n);
    if (threads <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < n && !failed;) {
                try {
                    fn(k);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string trajectory_header(const Topology& topo) {
    return link_count(topo) == 3 ? "t,mode,q1,q2,q3,s1,s2,s3\n" : "t,mode,q1,q2,s1,s2\n";
}

SegmentObserver trajectory_writer(const Topology& topo, std::string& out) {
    const std::size_t links = link_count(topo);
    return [links, &out](const Segment& seg) {
        std::ostringstream row;
        row << format_number(seg.t0) << ',' << static_cast<int>(seg.start.mode);
        for (std::size_t k = 0; k < links; ++k) row << ',' << format_number(seg.start.q[k]);
        for (std::size_t k = 0; k < links; ++k) row << ',' << format_number(seg.flows.s[k]);
        row << '\n';
        out += row.str();
    };
}

}  // namespace tandemfluid

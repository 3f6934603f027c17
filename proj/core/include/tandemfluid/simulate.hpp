#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tandemfluid/markov.hpp"
#include "tandemfluid/model.hpp"

namespace tandemfluid {

/// The two-link tandem: q[0] upstream (unbounded), q[1] downstream (capacity theta).
struct TwoLink {};
/// The downstream link in isolation, fed at the inflow rate; queue in q[1].
struct SingleFinite {};
/// Bimodal link with an infinite buffer fed at the inflow rate; queue in q[0].
struct SingleInfinite {};
/// Links 1 and 2 (capacities v1, v2, unbounded) merge into the switching link 3
/// (q[2], capacity theta). Link 1 takes the inflow spec, link 2 the constant `r2`.
/// Link 1 has strict priority for space on link 3.
struct Merge {
    double v1 = 0.0;
    double v2 = 0.0;
    double r2 = 0.0;
};
/// Link 1 (capacity v1) splits evenly into link 2 (capacity v2, unbounded) and the
/// switching link 3 (q[2], capacity theta).
struct Split {
    double v1 = 0.0;
    double v2 = 0.0;
};

using Topology = std::variant<TwoLink, SingleFinite, SingleInfinite, Merge, Split>;

[[nodiscard]] const char* topology_name(const Topology& t);
/// Number of queues reported for the topology (2 or 3).
[[nodiscard]] std::size_t link_count(const Topology& t);

/// Mode and queue vector for any topology; unused slots stay at zero.
struct NetState {
    Mode mode = Mode::High;
    std::array<double, 3> q{};
};

struct SimConfig {
    double horizon = 1e5;
    double warmup = 0.0;
    std::uint64_t seed = 1;
    NetState initial{};
    std::size_t replications = 1;
    /// Worker cap; 0 uses the TANDEMFLUID_THREADS environment variable or the hardware count.
    unsigned threads = 0;
};

[[nodiscard]] ValidationReport validate_config(const SimConfig& cfg);

/// Per-link flows at a state: time derivatives, discharge rates and the
/// admitted/exiting totals.
struct Flows {
    std::array<double, 3> dq{};
    std::array<double, 3> s{};
    double admitted = 0.0;
    double exit = 0.0;
};

[[nodiscard]] Flows network_flows(const Topology& topo, const NetState& state,
                                  const InflowSpec& inflow, const SystemParams& p);

enum class EventKind { ModeSwitch, Q1Empties, Q2Empties, Q2Fills, Q3Empties, Q3Fills, Horizon };

[[nodiscard]] const char* to_string(EventKind k);

struct Event {
    double dt = 0.0;
    EventKind kind = EventKind::ModeSwitch;
};

/// Earliest of the mode switch (after `time_to_switch`) and a boundary crossing
/// of the current affine flow. A derivative of exactly zero never produces a crossing.
[[nodiscard]] Event next_event(const HybridState& state, double r, double time_to_switch,
                               const SystemParams& p);
[[nodiscard]] Event next_event(const Topology& topo, const NetState& state,
                               const InflowSpec& inflow, double time_to_switch,
                               const SystemParams& p);

/// One affine piece of a trajectory, reported to observers.
struct Segment {
    std::size_t replication = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    NetState start{};
    Flows flows{};
    EventKind ends_with = EventKind::ModeSwitch;
};

using SegmentObserver = std::function<void(const Segment&)>;

struct ReplicationStats {
    double time_avg_total_queue = 0.0;
    double frac_time_q2_full = 0.0;  ///< fraction of time the finite-buffer link is full
    double frac_time_q1_zero = 0.0;
    std::array<double, 2> frac_time_mode{};
    double terminal_q_over_t = 0.0;  ///< q1(T) / T
    double mean_throughput = 0.0;    ///< time average of the exit flow
    // Mass-balance bookkeeping over [0, T].
    double total_admitted = 0.0;
    double total_exit = 0.0;
    double initial_total = 0.0;
    double final_total = 0.0;
    /// Largest excursion outside the state space seen at any event (0 when none).
    double max_state_violation = 0.0;
    std::uint64_t events = 0;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SimStats {
    Estimate time_avg_total_queue;
    Estimate frac_time_q2_full;
    Estimate frac_time_q1_zero;
    std::array<Estimate, 2> frac_time_mode{};
    Estimate terminal_q_over_t;
    Estimate mean_throughput;
    std::vector<ReplicationStats> replications;
};

[[nodiscard]] Estimate summarize(const std::vector<double>& samples);

/// One replication on its own RNG stream; `observer` sees every affine segment.
[[nodiscard]] ReplicationStats simulate_replication(const Topology& topo, const InflowSpec& inflow,
                                                    const SystemParams& p, const SimConfig& cfg,
                                                    std::size_t replication,
                                                    const SegmentObserver& observer = {});

/// All replications, in parallel, aggregated in replication order.
[[nodiscard]] SimStats simulate(const Topology& topo, const InflowSpec& inflow,
                                const SystemParams& p, const SimConfig& cfg);

/// Runs the merge with `unbalanced` (r(1) > v1) and `balanced` (r(i) <= v_i)
/// inflow pairs of equal total. Throws ModelError if the pairs do not qualify.
[[nodiscard]] std::pair<SimStats, SimStats> simulate_merge_stability_demo(
    double total, std::pair<double, double> unbalanced, std::pair<double, double> balanced,
    double v1, double v2, const SystemParams& p, const SimConfig& cfg);

/// Time-weighted occupation law of one queue, accumulated exactly over affine segments.
class OccupationMeasure {
public:
    OccupationMeasure(double x_max, std::size_t bins);

    void add(double q_start, double slope, double duration);
    /// Fraction of observed time with queue <= x_max * k / bins.
    [[nodiscard]] double cdf_at_edge(std::size_t k) const;
    [[nodiscard]] double edge(std::size_t k) const { return x_max_ * static_cast<double>(k) / static_cast<double>(bins()); }
    [[nodiscard]] std::size_t bins() const { return mass_.size(); }
    [[nodiscard]] double atom_at_zero() const { return total_ > 0 ? atom_ / total_ : 0.0; }
    [[nodiscard]] double total_time() const { return total_; }
    /// Sup over bin edges of |empirical - reference|.
    [[nodiscard]] double ks_distance(const std::function<double(double)>& reference_cdf) const;

private:
    double x_max_;
    double atom_ = 0.0;
    double total_ = 0.0;
    double overflow_ = 0.0;
    std::vector<double> mass_;
};

/// Long-run full fraction of the isolated finite-buffer link from a regenerative
/// simulation: cycles start when the buffer empties. The numerator (full time per
/// cycle) is estimated under exponentially tilted switching rates until the buffer
/// first fills, with exact likelihood ratios, then under the original rates; the
/// denominator (cycle length) under the original rates. `budget` caps the total
/// simulated time of both parts.
struct FullFractionEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t tilted_cycles = 0;
    std::size_t plain_cycles = 0;
    double tilt = 0.0;
};

[[nodiscard]] FullFractionEstimate estimate_full_fraction(double r, const SystemParams& p,
                                                          double budget, std::uint64_t seed);

/// Worker count from the TANDEMFLUID_THREADS cap and the hardware.
[[nodiscard]] unsigned worker_count(unsigned requested = 0);

/// Runs fn(k) for k in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Appends one CSV row per segment (t, mode, q..., s...) to `out`; header via trajectory_header.
[[nodiscard]] std::string trajectory_header(const Topology& topo);
[[nodiscard]] SegmentObserver trajectory_writer(const Topology& topo, std::string& out);

}  // namespace tandemfluid

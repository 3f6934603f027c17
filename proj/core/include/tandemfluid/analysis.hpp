#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tandemfluid/model.hpp"
#include "tandemfluid/stability.hpp"

namespace tandemfluid {

inline constexpr double kDefaultTol = 1e-4;
inline constexpr int kMaxBisections = 40;
inline constexpr double kThetaCap = 100.0;

/// Largest inflow passing the necessary condition (upper) and the largest inflow
/// with a certificate (lower), each resolved to `tol`.
struct ThroughputBounds {
    double upper = 0.0;
    double lower = 0.0;
    double tol = kDefaultTol;
};

[[nodiscard]] double throughput_upper_bound(const SystemParams& p, double tol = kDefaultTol);
[[nodiscard]] double throughput_lower_bound(const SystemParams& p, double tol = kDefaultTol);
[[nodiscard]] ThroughputBounds throughput_bounds(const SystemParams& p, double tol = kDefaultTol);

enum class SweepParameter { DeltaU, LambdaMu, Theta };

[[nodiscard]] const char* to_string(SweepParameter s);
/// Throws ModelError for names other than delta_u, lambda_mu and theta.
[[nodiscard]] SweepParameter parse_sweep_parameter(const std::string& name);

/// `base` with one parameter replaced. Delta u keeps the capacities centred on 0.75.
[[nodiscard]] SystemParams with_parameter(const SystemParams& base, SweepParameter s, double value);

struct SweepRow {
    SweepParameter parameter = SweepParameter::Theta;
    double value = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

/// One row per value, computed in parallel; throws ModelError on an inadmissible value.
[[nodiscard]] std::vector<SweepRow> sweep(const SystemParams& base, SweepParameter s,
                                          const std::vector<double>& values,
                                          double tol = kDefaultTol);

/// Smallest buffer size certifying stability at r; 0 when already certified at
/// theta = tol, empty when not certified at theta = 100.
[[nodiscard]] std::optional<double> theta_min(double r, const SystemParams& p,
                                              double tol = kDefaultTol);

struct ResilienceResult {
    double r_hat = 0.0;
    double theta_hat = 0.0;
    std::optional<double> theta_min;
    /// (theta_hat - theta_min) / theta_hat; empty means no guarantee.
    std::optional<double> alpha;
};

[[nodiscard]] ResilienceResult resilience_alpha(double r_hat, double theta_hat,
                                                const SystemParams& p, double tol = kDefaultTol);

/// Resilience margins over an inflow grid, evaluated in parallel.
[[nodiscard]] std::vector<ResilienceResult> resilience_curve(const std::vector<double>& r_hats,
                                                             double theta_hat, const SystemParams& p,
                                                             double tol = kDefaultTol);

struct QueueBound {
    double bound = 0.0;
    StabilityCertificate certificate;
};

inline constexpr int kQueueBoundGrid = 32;

/// Best d/c over a log grid of fixed c in [eps, c*]. Throws ModelError when r has no certificate.
[[nodiscard]] QueueBound queue_bound(double r, const SystemParams& p);
[[nodiscard]] QueueBound queue_bound_feedback(double r1, double r2, const SystemParams& p);

/// Largest x in [lo, hi] (to `tol`) with pred(x) true, assuming pred is true below
/// some threshold. Falls back to a linear scan when the bracket is not monotone.
/// Returns `lo` - 1 when pred(lo) is false everywhere scanned.
template <class Pred>
[[nodiscard]] double largest_true(Pred&& pred, double lo, double hi, double tol) {
    const auto scan = [&] {
        double best = lo - 1.0;
        const auto steps = static_cast<long>(std::ceil((hi - lo) / tol));
        for (long k = 0; k <= steps; ++k) {
            const double x = std::min(hi, lo + static_cast<double>(k) * tol);
            if (pred(x)) best = x;
        }
        return best;
    };
    if (pred(hi)) return hi;
    if (!pred(lo)) return scan();
    double a = lo, b = hi;
    for (int it = 0; it < kMaxBisections && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        (pred(mid) ? a : b) = mid;
    }
    if (!pred(a) || pred(b)) return scan();
    return a;
}

}  // namespace tandemfluid

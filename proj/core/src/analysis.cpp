#include "tandemfluid/analysis.hpp"

#include <limits>

#include "tandemfluid/simulate.hpp"
#include "tandemfluid/spectral.hpp"

namespace tandemfluid {

namespace {

void require_tol(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ModelError("tolerance must be positive");
}

void require_valid(const SystemParams& p) {
    if (auto rep = validate_params(p); !rep) throw ModelError(rep.violations.front());
}

bool certified(double r, const SystemParams& p) { return check_sufficient(r, p).has_value(); }

}  // namespace

double throughput_upper_bound(const SystemParams& p, double tol) {
    require_tol(tol);
    require_valid(p);
    const auto holds = [&](double r) {
        for (double probe : {r, r + 10 * tol, r - 10 * tol}) {
            try {
                return check_necessary(probe, p).holds;
            } catch (const SpectralError& e) {
                if (e.kind() != SpectralError::Kind::SingularDrift) throw;
            }
        }
        return false;
    };
    return std::max(0.0, largest_true(holds, 0.0, std::min(p.v, p.mean_capacity()), tol));
}

double throughput_lower_bound(const SystemParams& p, double tol) {
    require_tol(tol);
    require_valid(p);
    return std::max(0.0, largest_true([&](double r) { return certified(r, p); }, 0.0, p.v, tol));
}

ThroughputBounds throughput_bounds(const SystemParams& p, double tol) {
    return {throughput_upper_bound(p, tol), throughput_lower_bound(p, tol), tol};
}

const char* to_string(SweepParameter s) {
    switch (s) {
        case SweepParameter::DeltaU: return "delta_u";
        case SweepParameter::LambdaMu: return "lambda_mu";
        case SweepParameter::Theta: return "theta";
    }
    return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    for (auto s : {SweepParameter::DeltaU, SweepParameter::LambdaMu, SweepParameter::Theta}) {
        if (name == to_string(s)) return s;
    }
    throw ModelError("unknown sweep parameter '" + name + "' (expected delta_u, lambda_mu or theta)");
}

SystemParams with_parameter(const SystemParams& base, SweepParameter s, double value) {
    constexpr double kCentre = 0.75;
    SystemParams p = base;
    switch (s) {
        case SweepParameter::DeltaU:
            if (!(value >= 0.0 && value <= 1.5)) throw ModelError("delta_u must lie in [0, 1.5]");
            p.u1 = kCentre + value / 2;
            p.u2 = kCentre - value / 2;
            break;
        case SweepParameter::LambdaMu:
            if (!(value > 0.0) || !std::isfinite(value)) throw ModelError("lambda_mu must be positive");
            p.lambda = p.mu = value;
            break;
        case SweepParameter::Theta:
            if (!(value >= 0.0) || !std::isfinite(value)) throw ModelError("theta must be non-negative");
            p.theta = value;
            break;
    }
    require_valid(p);
    return p;
}

std::vector<SweepRow> sweep(const SystemParams& base, SweepParameter s,
                            const std::vector<double>& values, double tol) {
    require_tol(tol);
    std::vector<SystemParams> params;
    params.reserve(values.size());
    for (double x : values) params.push_back(with_parameter(base, s, x));

    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), worker_count(), [&](std::size_t k) {
        const auto b = throughput_bounds(params[k], tol);
        rows[k] = {s, values[k], b.upper, b.lower};
    });
    return rows;
}

std::optional<double> theta_min(double r, const SystemParams& p, double tol) {
    require_tol(tol);
    require_valid(p);
    const auto feasible = [&](double theta) {
        SystemParams q = p;
        q.theta = theta;
        return certified(r, q);
    };
    if (feasible(tol)) return 0.0;
    if (!feasible(kThetaCap)) return std::nullopt;
    double a = tol, b = kThetaCap;
    for (int it = 0; it < kMaxBisections && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        (feasible(mid) ? b : a) = mid;
    }
    if (feasible(a) || !feasible(b)) {
        // Not monotone in theta on this bracket: scan upward for the first feasible size.
        for (double theta = tol; theta <= kThetaCap; theta += tol) {
            if (feasible(theta)) return theta;
        }
        return std::nullopt;
    }
    return b;
}

ResilienceResult resilience_alpha(double r_hat, double theta_hat, const SystemParams& p, double tol) {
    if (!(theta_hat > 0.0)) throw ModelError("theta_hat must be positive");
    ResilienceResult out{r_hat, theta_hat, theta_min(r_hat, p, tol), std::nullopt};
    if (out.theta_min && *out.theta_min <= theta_hat) {
        out.alpha = *out.theta_min == 0.0 ? 1.0 : (theta_hat - *out.theta_min) / theta_hat;
    }
    return out;
}

std::vector<ResilienceResult> resilience_curve(const std::vector<double>& r_hats, double theta_hat,
                                               const SystemParams& p, double tol) {
    std::vector<ResilienceResult> out(r_hats.size());
    parallel_for(r_hats.size(), worker_count(), [&](std::size_t k) {
        out[k] = resilience_alpha(r_hats[k], theta_hat, p, tol);
    });
    return out;
}

QueueBound queue_bound_feedback(double r1, double r2, const SystemParams& p) {
    require_valid(p);
    auto c_star = max_certificate_rate(r1, r2, p);
    if (!c_star) throw ModelError("no stability certificate exists at this inflow");
    if (!std::isfinite(*c_star)) c_star = 1e3;

    std::optional<QueueBound> best;
    const double ratio = *c_star / kStrictEps;
    for (int k = 0; k < kQueueBoundGrid; ++k) {
        const double c = kStrictEps * std::pow(ratio, static_cast<double>(k) / (kQueueBoundGrid - 1));
        const auto cert = certificate_at_fixed_c(r1, r2, p, std::min(c, *c_star));
        if (!cert) continue;
        if (!best || cert->queue_bound() < best->bound) best = QueueBound{cert->queue_bound(), *cert};
    }
    if (!best) throw ModelError("no stability certificate exists at this inflow");
    return *best;
}

QueueBound queue_bound(double r, const SystemParams& p) { return queue_bound_feedback(r, r, p); }

}  // namespace tandemfluid

#include "tandemfluid/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tandemfluid/markov.hpp"
#include "tandemfluid/spectral.hpp"

namespace tandemfluid {

namespace {

using lp::Relation;

std::vector<double> as_vector(const StabilityCertificate& c) {
    return {c.a1, c.a2, c.b1, c.b2, c.c, c.d};
}

StabilityCertificate from_vector(const std::vector<double>& x) {
    return {x[kA1], x[kA2], x[kB1], x[kB2], x[kC], x[kD]};
}

NecessaryVerdict necessary_from(double lhs, double p_hat, const SystemParams& p) {
    NecessaryVerdict verdict;
    verdict.prerequisite_ok = true;
    verdict.lhs = lhs;
    verdict.p_hat = p_hat;
    verdict.rhs = (1.0 - p_hat) * p.v + p_hat * p.u2;
    verdict.holds = lhs <= *verdict.rhs;
    return verdict;
}

}  // namespace

lp::LinearProgram certificate_program(double r1, double r2, const SystemParams& p) {
    const double v = p.v, u1 = p.u1, u2 = p.u2, th = p.theta;
    const double lam = p.lambda, mu = p.mu;

    lp::LinearProgram prog;
    prog.objective.assign(kNumCertVars, 0.0);
    prog.lower_bounds.assign(kNumCertVars, kStrictEps);

    // Drift of the q1-coefficient on each boundary/interior piece.
    prog.add({0, 0, -lam, lam, 1, 0}, Relation::LessEqual, -2 * (r1 - v));
    prog.add({(v - u1) - lam * th, lam * th, -lam, lam, 1, 0}, Relation::LessEqual, -2 * (r1 - v));
    prog.add({0, v - u2, mu, -mu, 1, 0}, Relation::LessEqual, -2 * (r2 - v));
    prog.add({mu * th, (v - u2) - mu * th, mu, -mu, 1, 0}, Relation::LessEqual, -2 * (r2 - v));
    prog.add({mu * th, -mu * th, mu, -mu, 1, 0}, Relation::LessEqual, -2 * (r2 - u2));
    // Constant part.
    prog.add({r1 - v, 0, 0, 0, th, -1}, Relation::LessEqual, 0);
    prog.add({0, r2 - u2, 0, 0, th, -1}, Relation::LessEqual, 0);
    prog.add({0, 0, 0, 0, th, -1}, Relation::LessEqual, 0);

    // The b_i (r - s1) term of the generator and the q2 <= theta scaling of the
    // a_i (r - s1) q2 term, evaluated at the ends of each region.
    prog.add({(r1 - v) * th, 0, r1 - v, 0, th, -1}, Relation::LessEqual, 0);
    prog.add({0, 0, r1 - v, 0, 0, -1}, Relation::LessEqual, 0);
    prog.add({0, (r2 - v) * th, 0, r2 - v, th, -1}, Relation::LessEqual, 0);
    prog.add({0, 0, 0, r2 - v, 0, -1}, Relation::LessEqual, 0);
    prog.add({0, (r2 - u2) * th, 0, r2 - u2, th, -1}, Relation::LessEqual, 0);
    return prog;
}

double certificate_violation(const StabilityCertificate& cert, double r1, double r2,
                             const SystemParams& p) {
    return lp::max_violation(certificate_program(r1, r2, p), as_vector(cert));
}

NecessaryVerdict check_necessary(double r, const SystemParams& p) {
    if (!(r < std::min(p.v, p.mean_capacity()))) {
        NecessaryVerdict verdict;
        verdict.lhs = r;
        return verdict;
    }
    return necessary_from(r, finite_buffer_spectrum(r, p).p_hat, p);
}

NecessaryVerdict check_necessary_feedback(double r1, double r2, const SystemParams& p) {
    const auto pi = steady_state(p.lambda, p.mu);
    const double lhs = pi.p1 * std::min(r1, p.v) + pi.p2 * std::min(r2, p.v);
    try {
        if (!(lhs < p.v)) throw SpectralError(SpectralError::Kind::Prerequisite, "");
        return necessary_from(lhs, feedback_spectrum(r1, r2, p).p_hat, p);
    } catch (const SpectralError& e) {
        if (e.kind() != SpectralError::Kind::Prerequisite) throw;
        NecessaryVerdict verdict;
        verdict.lhs = lhs;
        return verdict;
    }
}

std::optional<double> max_certificate_rate(double r1, double r2, const SystemParams& p) {
    auto prog = certificate_program(r1, r2, p);
    prog.objective[kC] = 1.0;
    const auto out = lp::maximize(prog);
    if (out.status == lp::Status::Unbounded) return std::numeric_limits<double>::infinity();
    if (!out.optimal() || !(out.solution[kC] > 2 * kStrictEps)) return std::nullopt;
    return out.solution[kC];
}

std::optional<StabilityCertificate> certificate_at_fixed_c(double r1, double r2,
                                                           const SystemParams& p, double c) {
    auto prog = certificate_program(r1, r2, p);
    std::vector<double> pin(kNumCertVars, 0.0);
    pin[kC] = 1.0;
    prog.add(std::move(pin), Relation::Equal, c);
    prog.objective[kD] = -1.0;
    const auto out = lp::maximize(prog);
    if (!out.optimal()) return std::nullopt;
    auto cert = from_vector(out.solution);
    cert.c = c;
    return cert;
}

std::optional<StabilityCertificate> check_sufficient_feedback(double r1, double r2,
                                                              const SystemParams& p) {
    const auto c_star = max_certificate_rate(r1, r2, p);
    if (!c_star) return std::nullopt;
    return certificate_at_fixed_c(r1, r2, p, std::min(1.0, *c_star / 2));
}

std::optional<StabilityCertificate> check_sufficient(double r, const SystemParams& p) {
    return check_sufficient_feedback(r, r, p);
}

double lyapunov_generator(const StabilityCertificate& cert, Mode i, double q1, double q2,
                          const InflowSpec& inflow, const SystemParams& p) {
    const double r = inflow_in(inflow, i);
    const auto s = discharge_rates(i, q1, q2, r, p);
    const bool high = i == Mode::High;
    const double a = high ? cert.a1 : cert.a2, b = high ? cert.b1 : cert.b2;
    const double a_other = high ? cert.a2 : cert.a1, b_other = high ? cert.b2 : cert.b1;
    const double rate = p.switch_rate(i);
    return (2 * q1 + a * q2 + b) * (r - s.s1) + a * q1 * (s.s1 - s.s2) +
           rate * ((a_other - a) * q1 * q2 + (b_other - b) * q1);
}

DriftReport verify_drift(const StabilityCertificate& cert, const InflowSpec& inflow,
                         const SystemParams& p, const DriftGrid& grid) {
    if (grid.q1_points < 2 || grid.q2_points < 2 || grid.q1_max < 0.0 ||
        !std::isfinite(grid.q1_max)) {
        throw ModelError("drift grid needs at least 2 points per axis and a finite q1 range");
    }
    const double q1_max = grid.q1_max > 0.0 ? grid.q1_max : 20.0 * p.theta + 10.0;
    constexpr double kInside = 1e-9;

    std::vector<double> q1s;
    for (std::size_t k = 0; k < grid.q1_points; ++k) {
        q1s.push_back(q1_max * static_cast<double>(k) / static_cast<double>(grid.q1_points - 1));
    }
    q1s.push_back(kInside);
    std::vector<double> q2s;
    if (p.theta > 0.0) {
        for (std::size_t k = 0; k < grid.q2_points; ++k) {
            q2s.push_back(p.theta * static_cast<double>(k) / static_cast<double>(grid.q2_points - 1));
        }
        if (p.theta > 2 * kInside) {
            q2s.push_back(kInside);
            q2s.push_back(p.theta - kInside);
        }
    } else {
        q2s.push_back(0.0);
    }

    DriftReport report;
    report.max_excess = -std::numeric_limits<double>::infinity();
    report.region_max.fill(-std::numeric_limits<double>::infinity());
    for (Mode i : {Mode::High, Mode::Low}) {
        for (double q1 : q1s) {
            for (double q2 : q2s) {
                const double excess =
                    lyapunov_generator(cert, i, q1, q2, inflow, p) + cert.c * (q1 + q2) - cert.d;
                std::size_t region = 0;
                if (q1 <= kBoundaryTol) {
                    region = 4;
                } else if (i == Mode::High) {
                    region = q2 <= kBoundaryTol ? 0 : 1;
                } else {
                    region = q2 >= p.theta - kBoundaryTol ? 3 : 2;
                }
                report.region_max[region] = std::max(report.region_max[region], excess);
                if (excess > report.max_excess) {
                    report.max_excess = excess;
                    report.worst_mode = i;
                    report.worst_q1 = q1;
                    report.worst_q2 = q2;
                }
                ++report.points;
            }
        }
    }
    report.pass = report.max_excess <= kDriftPassTol;
    return report;
}

}  // namespace tandemfluid

#include "tandemfluid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tandemfluid/markov.hpp"

namespace tandemfluid {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Vec2 = std::array<double, 2>;

Vec2 normalized(Vec2 v) {
    const double scale = std::max(std::abs(v[0]), std::abs(v[1]));
    return {v[0] / scale, v[1] / scale};
}

// Left null vector of the 2x2 matrix w*D - Lambda, picking the better-conditioned
// of the two column equations.
Vec2 left_null(double w, const Vec2& d, double lambda, double mu) {
    const double m00 = w * d[0] + lambda;
    const double m11 = w * d[1] + mu;
    const Vec2 from_col0{mu, m00};
    const Vec2 from_col1{m11, lambda};
    const auto norm = [](const Vec2& v) { return std::hypot(v[0], v[1]); };
    return normalized(norm(from_col0) >= norm(from_col1) ? from_col0 : from_col1);
}

// Assumes d[0] < 0 and d[1] != 0 with nonzero mean drift; returns the nonzero root.
double nonzero_root(const Vec2& d, double lambda, double mu) {
    return -(mu * d[0] + lambda * d[1]) / (d[0] * d[1]);
}

SpectralSolution solve(const Vec2& d, const SystemParams& p) {
    const double lambda = p.lambda;
    const double mu = p.mu;
    const auto pi = steady_state(lambda, mu);

    SpectralSolution sol;
    sol.drift = d;
    sol.w1 = 0.0;
    sol.phi1 = normalized({mu, lambda});

    if (d[1] <= 0.0) {
        sol.regime = SpectralSolution::Regime::NoSpillback;
        if (std::abs(d[1]) < kSingularDriftTol) {
            sol.w2 = kNaN;
            sol.phi2 = {kNaN, kNaN};
        } else {
            sol.w2 = nonzero_root(d, lambda, mu);
            sol.phi2 = left_null(sol.w2, d, lambda, mu);
        }
        return sol;
    }

    sol.regime = SpectralSolution::Regime::Spillback;
    sol.w2 = nonzero_root(d, lambda, mu);
    sol.phi2 = left_null(sol.w2, d, lambda, mu);

    const double e1 = std::exp(sol.w1 * p.theta);
    const double e2 = std::exp(sol.w2 * p.theta);
    // [phi12      phi22     ] [k1]   [0 ]
    // [phi11 e1   phi21 e2  ] [k2] = [p1]
    const double a = sol.phi1[1], b = sol.phi2[1];
    const double c = sol.phi1[0] * e1, dd = sol.phi2[0] * e2;
    const double det = a * dd - b * c;
    sol.k1 = -b * pi.p1 / det;
    sol.k2 = a * pi.p1 / det;

    // Closed form of p2 - k1 phi12 e1 - k2 phi22 e2 without the cancellation
    // between p2 and the boundary term, which matters once p_hat << 1e-12.
    const double ratio = -d[1] / d[0];
    sol.p_hat = lambda * e2 * (mu - lambda * ratio) / ((lambda + mu) * (mu - lambda * ratio * e2));
    return sol;
}

void check_residuals(const SpectralSolution& sol, const SystemParams& p) {
    const double res = sol.max_residual(p);
    if (!(res <= kResidualTol) || !(sol.p_hat >= 0.0 && sol.p_hat <= 1.0)) {
        std::ostringstream os;
        os << "spectral solution failed its residual checks (max residual " << res
           << ", p_hat " << sol.p_hat << ")";
        throw ModelError(os.str());
    }
}

}  // namespace

double SpectralSolution::max_residual(const SystemParams& p) const {
    const double lambda = p.lambda, mu = p.mu;
    double worst = 0.0;
    const auto eigen_residual = [&](double w, const Vec2& phi) {
        if (std::isnan(w)) return;
        const double m00 = w * drift[0] + lambda, m01 = -lambda;
        const double m10 = -mu, m11 = w * drift[1] + mu;
        const double scale = std::max({std::abs(m00), std::abs(m11), lambda, mu});
        worst = std::max(worst, std::abs(m00 * m11 - m01 * m10) / (scale * scale));
        worst = std::max(worst, std::abs(phi[0] * m00 + phi[1] * m10) / scale);
        worst = std::max(worst, std::abs(phi[0] * m01 + phi[1] * m11) / scale);
    };
    eigen_residual(w1, phi1);
    eigen_residual(w2, phi2);

    if (regime == Regime::Spillback) {
        const auto pi = steady_state(lambda, mu);
        const double e1 = std::exp(w1 * p.theta), e2 = std::exp(w2 * p.theta);
        const double t1 = k1 * phi1[1], t2 = k2 * phi2[1];
        worst = std::max(worst, std::abs(t1 + t2) / std::max(1.0, std::abs(t1)));
        worst = std::max(worst, std::abs(k1 * phi1[0] * e1 + k2 * phi2[0] * e2 - pi.p1));
        worst = std::max(worst, std::abs(pi.p2 - t1 * e1 - t2 * e2 - p_hat));
    }
    return worst;
}

SpectralSolution finite_buffer_spectrum(double r, const SystemParams& p) {
    const double ubar = p.mean_capacity();
    if (!(r < std::min(p.v, ubar))) {
        std::ostringstream os;
        os << "inflow " << r << " is not strictly below min{v, mean capacity} = "
           << std::min(p.v, ubar);
        throw SpectralError(SpectralError::Kind::Prerequisite, os.str());
    }
    const Vec2 d{r - p.u1, r - p.u2};
    if (std::abs(d[0]) < kSingularDriftTol || std::abs(d[1]) < kSingularDriftTol) {
        std::ostringstream os;
        os << "drift matrix is singular at r = " << r;
        throw SpectralError(SpectralError::Kind::SingularDrift, os.str());
    }
    // Mean drift zero means r equals the mean capacity, already excluded above.
    auto sol = solve(d, p);
    check_residuals(sol, p);
    return sol;
}

SpectralSolution feedback_spectrum(double r1, double r2, const SystemParams& p) {
    const Vec2 d{std::min(r1, p.v) - p.u1, std::min(r2, p.v) - p.u2};
    const auto pi = steady_state(p.lambda, p.mu);
    const double mean_drift = pi.p1 * d[0] + pi.p2 * d[1];
    if (std::abs(d[0]) < kSingularDriftTol) {
        throw SpectralError(SpectralError::Kind::SingularDrift,
                            "High-mode drift of the feedback link is zero");
    }
    // Strict analogue of the constant-inflow prerequisite: a zero mean drift
    // (where the two eigenroots coincide) is rejected together with positive drift.
    if (!(mean_drift < -kSingularDriftTol)) {
        throw SpectralError(SpectralError::Kind::Prerequisite,
                            "mean admitted inflow is not strictly below the mean downstream capacity");
    }
    auto sol = solve(d, p);
    check_residuals(sol, p);
    return sol;
}

double spillback_prob_feedback(double r1, double r2, const SystemParams& p) {
    return feedback_spectrum(r1, r2, p).p_hat;
}

double BpdqInvariantMeasure::cdf(double x) const {
    if (x < 0.0) return 0.0;
    return z1 + (a1 + a2) / s * -std::expm1(-s * x);
}

BpdqInvariantMeasure bpdq_invariant_measure(double f, const SystemParams& p) {
    const double ubar = p.mean_capacity();
    if (!(f > p.u2 && f < ubar)) {
        std::ostringstream os;
        os << "inflow " << f << " outside (u2, mean capacity) = (" << p.u2 << ", " << ubar << ")";
        throw ModelError(os.str());
    }
    const double lambda = p.lambda, mu = p.mu;
    BpdqInvariantMeasure m;
    m.z1 = (mu - lambda * (f - p.u2) / (p.u1 - f)) / (lambda + mu);
    // Coefficients that cancel the g(1,0), g(2,0) and Laplace-transform terms
    // of the stationary generator equation.
    m.a1 = lambda * m.z1 / (p.u1 - f);
    m.a2 = lambda * m.z1 / (f - p.u2);
    m.s = mu / (f - p.u2) - lambda / (p.u1 - f);
    return m;
}

bool bpdq_is_stable(double f, const SystemParams& p) { return f < p.mean_capacity(); }

}  // namespace tandemfluid

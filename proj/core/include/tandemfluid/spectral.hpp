#pragma once

#include <array>

#include "tandemfluid/model.hpp"

namespace tandemfluid {

/// Raised when the isolated-link steady state is not defined at the requested inflow.
class SpectralError : public ModelError {
public:
    enum class Kind {
        Prerequisite,     ///< inflow not strictly below min{v, mean capacity}
        SingularDrift,    ///< r within 1e-9 of u1 or u2
        RootCoincidence,  ///< mean drift exactly zero, eigenroots collapse
    };

    SpectralError(Kind kind, const std::string& what) : ModelError(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Drifts closer to zero than this are treated as singular.
inline constexpr double kSingularDriftTol = 1e-9;

/// Steady-state solution of the isolated finite-buffer downstream link fed at
/// a constant (or mode-dependent) rate.
///
/// In the `Spillback` regime the Low mode fills the buffer and the High mode
/// drains it; `p_hat` is the long-run fraction of time the buffer is full. In
/// the `NoSpillback` regime both drifts are non-positive, the buffer is never
/// full in steady state and `p_hat` is 0 (k1 = k2 = 0).
struct SpectralSolution {
    enum class Regime { Spillback, NoSpillback };

    Regime regime = Regime::Spillback;
    std::array<double, 2> drift{};  ///< diagonal of D
    double w1 = 0.0;
    double w2 = 0.0;
    std::array<double, 2> phi1{};
    std::array<double, 2> phi2{};
    double k1 = 0.0;
    double k2 = 0.0;
    double p_hat = 0.0;

    /// Largest residual over the eigen, eigenvector and boundary equations.
    [[nodiscard]] double max_residual(const SystemParams& p) const;
};

/// Spillback probability machinery for a constant inflow `r`.
///
/// Requires r < min{v, mean capacity} and |r - u_i| >= 1e-9; otherwise throws
/// SpectralError. Every returned solution has passed its residual checks.
[[nodiscard]] SpectralSolution finite_buffer_spectrum(double r, const SystemParams& p);

/// Same construction with mode-wise drifts min{r_i, v} - u_i.
[[nodiscard]] SpectralSolution feedback_spectrum(double r1, double r2, const SystemParams& p);

/// Full-buffer probability under the mode-responsive inflow (r1, r2).
[[nodiscard]] double spillback_prob_feedback(double r1, double r2, const SystemParams& p);

/// Invariant law of the infinite-buffer bimodal link fed at rate f:
/// an atom z1 at q = 0 in the High mode plus densities a_i * exp(-s q).
struct BpdqInvariantMeasure {
    double z1 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double s = 0.0;

    [[nodiscard]] double total_mass() const { return z1 + (a1 + a2) / s; }
    /// P(q <= x), both modes combined.
    [[nodiscard]] double cdf(double x) const;
    /// Stationary mean queue length (a1 + a2) / s^2.
    [[nodiscard]] double mean() const { return (a1 + a2) / (s * s); }
};

/// Requires u2 < f < mean capacity; throws ModelError otherwise. Ignores v and theta.
[[nodiscard]] BpdqInvariantMeasure bpdq_invariant_measure(double f, const SystemParams& p);

/// True iff f is strictly below the mean capacity p1*u1 + p2*u2.
[[nodiscard]] bool bpdq_is_stable(double f, const SystemParams& p);

}  // namespace tandemfluid

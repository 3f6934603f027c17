#pragma once

#include <array>
#include <optional>

#include "tandemfluid/lp.hpp"
#include "tandemfluid/model.hpp"

namespace tandemfluid {

/// Outcome of the spillback-adjusted necessary condition.
///
/// `lhs` is the (mean) admitted inflow and `rhs` the spillback-adjusted
/// capacity (1 - p)v + p u2. When the prerequisite fails, `p_hat` and `rhs`
/// are empty and `holds` is false.
struct NecessaryVerdict {
    bool prerequisite_ok = false;
    double lhs = 0.0;
    std::optional<double> p_hat;
    std::optional<double> rhs;
    bool holds = false;
};

/// Positive multipliers of V(i, q) = q1^2 + a_i q1 q2 + b_i q1 together with
/// the drift constants c, d. Implies a long-run mean total queue of at most d / c.
struct StabilityCertificate {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double c = 0.0;
    double d = 0.0;

    [[nodiscard]] double queue_bound() const { return d / c; }
};

/// Lower bound used to encode the strict positivity of every multiplier.
inline constexpr double kStrictEps = 1e-9;

/// Variable order of the certificate programs.
enum CertVar : std::size_t { kA1 = 0, kA2, kB1, kB2, kC, kD, kNumCertVars };

/// Number of leading rows that are the eight printed certificate inequalities;
/// the remaining rows bound d by the exact generator on the boundary regions.
inline constexpr std::size_t kPrintedCertRows = 8;

/// Feasibility program over (a1, a2, b1, b2, c, d) with r1 used in the High-mode
/// rows and r2 in the Low-mode rows. The objective is left at zero.
[[nodiscard]] lp::LinearProgram certificate_program(double r1, double r2, const SystemParams& p);

/// Largest violation of the certificate program at the given certificate.
[[nodiscard]] double certificate_violation(const StabilityCertificate& cert, double r1, double r2,
                                           const SystemParams& p);

/// Throws SpectralError (SingularDrift) when the spectral solution is indeterminate at r.
[[nodiscard]] NecessaryVerdict check_necessary(double r, const SystemParams& p);
[[nodiscard]] NecessaryVerdict check_necessary_feedback(double r1, double r2, const SystemParams& p);

/// Maximizes c; if c* > 0, fixes c = min(1, c*/2) and minimizes d.
[[nodiscard]] std::optional<StabilityCertificate> check_sufficient(double r, const SystemParams& p);
[[nodiscard]] std::optional<StabilityCertificate> check_sufficient_feedback(double r1, double r2,
                                                                            const SystemParams& p);

/// Certificate with c held at `c` and d minimized; empty if infeasible.
[[nodiscard]] std::optional<StabilityCertificate> certificate_at_fixed_c(double r1, double r2,
                                                                         const SystemParams& p,
                                                                         double c);
/// Optimal c of the phase-1 program, empty when no positive c exists.
[[nodiscard]] std::optional<double> max_certificate_rate(double r1, double r2, const SystemParams& p);

struct DriftGrid {
    std::size_t q1_points = 201;
    std::size_t q2_points = 51;
    double q1_max = 0.0;  ///< 0 selects 20 * theta + 10
};

struct DriftReport {
    double max_excess = 0.0;  ///< max of LV + c(q1 + q2) - d over the grid
    Mode worst_mode = Mode::High;
    double worst_q1 = 0.0;
    double worst_q2 = 0.0;
    /// Per-region maxima: {High,q2=0}, {High,q2>0}, {Low,q2<theta}, {Low,q2=theta}, {q1=0}.
    std::array<double, 5> region_max{};
    std::size_t points = 0;
    bool pass = false;
};

inline constexpr double kDriftPassTol = 1e-6;

/// Generator of V applied at (i, q) with the model's exact discharge rates.
[[nodiscard]] double lyapunov_generator(const StabilityCertificate& cert, Mode i, double q1,
                                        double q2, const InflowSpec& inflow, const SystemParams& p);

/// Grid check of the Foster-Lyapunov drift inequality. Throws ModelError on a malformed grid.
[[nodiscard]] DriftReport verify_drift(const StabilityCertificate& cert, const InflowSpec& inflow,
                                       const SystemParams& p, const DriftGrid& grid = {});

}  // namespace tandemfluid

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tandemfluid {

/// Absolute tolerance used when classifying a queue as sitting on a boundary.
inline constexpr double kBoundaryTol = 1e-12;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Capacity mode of the downstream link. `High` uses u1, `Low` uses u2.
enum class Mode : int { High = 1, Low = 2 };

[[nodiscard]] constexpr int mode_index(Mode m) { return m == Mode::High ? 0 : 1; }
[[nodiscard]] constexpr Mode other(Mode m) { return m == Mode::High ? Mode::Low : Mode::High; }

/// Model constants of the two-link system.
///
/// `v` is the upstream capacity, `u1`/`u2` the high/low downstream capacities,
/// `lambda` (High->Low) and `mu` (Low->High) the switching rates and `theta`
/// the downstream buffer size.
struct SystemParams {
    double v = 0.75;
    double u1 = 1.0;
    double u2 = 0.5;
    double lambda = 1.0;
    double mu = 1.0;
    double theta = 1.0;

    [[nodiscard]] double capacity(Mode m) const { return m == Mode::High ? u1 : u2; }
    [[nodiscard]] double switch_rate(Mode m) const { return m == Mode::High ? lambda : mu; }
    /// Stationary-weighted downstream capacity p1*u1 + p2*u2.
    [[nodiscard]] double mean_capacity() const { return (mu * u1 + lambda * u2) / (lambda + mu); }

    static SystemParams nominal() { return {}; }
};

struct ConstantInflow {
    double r = 0.0;
};

/// Inflow chosen by the current mode: r1 in High, r2 in Low.
struct ModeResponsiveInflow {
    double r1 = 0.0;
    double r2 = 0.0;
};

using InflowSpec = std::variant<ConstantInflow, ModeResponsiveInflow>;

[[nodiscard]] double inflow_in(const InflowSpec& inflow, Mode m);

struct HybridState {
    Mode mode = Mode::High;
    double q1 = 0.0;
    double q2 = 0.0;
};

struct DischargeRates {
    double s1 = 0.0;
    double s2 = 0.0;
};

struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool valid() const { return violations.empty(); }
    explicit operator bool() const { return valid(); }
};

[[nodiscard]] ValidationReport validate_params(const SystemParams& p);
[[nodiscard]] ValidationReport validate_inflow(const InflowSpec& inflow);

/// Throws ModelError when (q1, q2) lies outside [0, inf) x [0, theta].
void require_in_state_space(double q1, double q2, const SystemParams& p);

/// Discharge rates of both links including the spillback cap on link 1.
[[nodiscard]] DischargeRates discharge_rates(Mode i, double q1, double q2, double r,
                                             const SystemParams& p);

/// Time derivative (r - s1, s1 - s2) of the queue vector.
[[nodiscard]] std::array<double, 2> vector_field(Mode i, double q1, double q2, double r,
                                                 const SystemParams& p);

}  // namespace tandemfluid

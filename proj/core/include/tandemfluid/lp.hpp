#pragma once

#include <stdexcept>
#include <vector>

namespace tandemfluid::lp {

class LpError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Relation { LessEqual, GreaterEqual, Equal };

struct Constraint {
    std::vector<double> coeffs;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

/// maximize objective . x  subject to constraints, x >= lower_bounds.
///
/// An empty `lower_bounds` means every variable is bounded below by zero.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower_bounds;

    [[nodiscard]] std::size_t num_vars() const { return objective.size(); }
    void add(std::vector<double> coeffs, Relation rel, double rhs) {
        constraints.push_back({std::move(coeffs), rel, rhs});
    }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    Status status = Status::Infeasible;
    std::vector<double> solution;
    double objective = 0.0;

    [[nodiscard]] bool optimal() const { return status == Status::Optimal; }
};

/// Two-phase dense simplex with Bland's rule. Throws LpError on malformed input.
[[nodiscard]] LpOutcome maximize(const LinearProgram& prog);

/// Largest violation of any constraint or lower bound at `x` (0 when feasible).
[[nodiscard]] double max_violation(const LinearProgram& prog, const std::vector<double>& x);

[[nodiscard]] const char* to_string(Status s);

}  // namespace tandemfluid::lp

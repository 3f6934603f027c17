#include "tandemfluid/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tandemfluid::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxIterations = 50000;

// Dense tableau [A | b] with an explicit basis; the objective is kept outside
// and reduced costs are recomputed each iteration (problems are tiny).
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double rhs(std::size_t i) const { return at(i, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const double inv = 1.0 / at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    enum class Result { Optimal, Unbounded };

    // Maximizes cost . y over the current basis using Bland's rule.
    Result optimize(const std::vector<double>& cost, const std::vector<bool>& allowed) {
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            std::size_t entering = cols_;
            for (std::size_t j = 0; j < cols_ && entering == cols_; ++j) {
                if (!allowed[j]) continue;
                double reduced = cost[j];
                for (std::size_t i = 0; i < rows_; ++i) reduced -= cost[basis_[i]] * at(i, j);
                if (reduced > kCostTol) entering = j;
            }
            if (entering == cols_) return Result::Optimal;

            std::size_t leaving = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_; ++i) {
                const double a = at(i, entering);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(rhs(i), 0.0) / a;
                if (leaving == rows_ || ratio < best - 1e-14) {
                    best = ratio;
                    leaving = i;
                } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leaving]) {
                    leaving = i;
                }
            }
            if (leaving == rows_) return Result::Unbounded;
            pivot(leaving, entering);
        }
        throw LpError("simplex iteration limit reached");
    }

    double value(const std::vector<double>& cost) const {
        double v = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) v += cost[basis_[i]] * rhs(i);
        return v;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

void validate(const LinearProgram& prog) {
    const std::size_t n = prog.num_vars();
    if (n == 0) throw LpError("linear program has no variables");
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(prog.objective.begin(), prog.objective.end(), finite)) {
        throw LpError("objective has non-finite coefficients");
    }
    if (!prog.lower_bounds.empty()) {
        if (prog.lower_bounds.size() != n) throw LpError("lower bound count does not match variables");
        if (!std::all_of(prog.lower_bounds.begin(), prog.lower_bounds.end(), finite)) {
            throw LpError("lower bounds must be finite");
        }
    }
    for (std::size_t k = 0; k < prog.constraints.size(); ++k) {
        const auto& c = prog.constraints[k];
        if (c.coeffs.size() != n) {
            throw LpError("constraint " + std::to_string(k) + " has wrong dimension");
        }
        if (!std::all_of(c.coeffs.begin(), c.coeffs.end(), finite) || !finite(c.rhs)) {
            throw LpError("constraint " + std::to_string(k) + " has non-finite coefficients");
        }
    }
}

}  // namespace

LpOutcome maximize(const LinearProgram& prog) {
    validate(prog);
    const std::size_t n = prog.num_vars();
    const std::size_t m = prog.constraints.size();
    std::vector<double> lower = prog.lower_bounds.empty() ? std::vector<double>(n, 0.0)
                                                          : prog.lower_bounds;

    // Shift x = lower + y and orient every row to a non-negative right-hand side.
    struct Row {
        std::vector<double> a;
        Relation rel;
        double b;
    };
    std::vector<Row> rows;
    rows.reserve(m);
    std::size_t n_slack = 0, n_art = 0;
    for (const auto& c : prog.constraints) {
        Row row{c.coeffs, c.relation, c.rhs};
        for (std::size_t j = 0; j < n; ++j) row.b -= row.a[j] * lower[j];
        if (row.b < 0.0) {
            for (double& a : row.a) a = -a;
            row.b = -row.b;
            if (row.rel == Relation::LessEqual) {
                row.rel = Relation::GreaterEqual;
            } else if (row.rel == Relation::GreaterEqual) {
                row.rel = Relation::LessEqual;
            }
        }
        if (row.rel != Relation::Equal) ++n_slack;
        if (row.rel != Relation::LessEqual) ++n_art;
        rows.push_back(std::move(row));
    }

    const std::size_t art_begin = n + n_slack;
    const std::size_t cols = art_begin + n_art;
    Tableau t(m, cols);
    std::size_t slack = n, art = art_begin;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = rows[i];
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = row.a[j];
        t.rhs(i) = row.b;
        switch (row.rel) {
            case Relation::LessEqual:
                t.at(i, slack) = 1.0;
                t.basis()[i] = slack++;
                break;
            case Relation::GreaterEqual:
                t.at(i, slack++) = -1.0;
                t.at(i, art) = 1.0;
                t.basis()[i] = art++;
                break;
            case Relation::Equal:
                t.at(i, art) = 1.0;
                t.basis()[i] = art++;
                break;
        }
    }

    LpOutcome out;
    std::vector<bool> allowed(cols, true);

    if (n_art > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = art_begin; j < cols; ++j) phase1[j] = -1.0;
        t.optimize(phase1, allowed);
        if (t.value(phase1) < -kFeasTol) {
            out.status = Status::Infeasible;
            return out;
        }
        // Pivot zero-level artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis()[i] < art_begin) continue;
            for (std::size_t j = 0; j < art_begin; ++j) {
                if (std::abs(t.at(i, j)) > 1e-9) {
                    t.pivot(i, j);
                    break;
                }
            }
        }
        for (std::size_t j = art_begin; j < cols; ++j) allowed[j] = false;
    }

    std::vector<double> phase2(cols, 0.0);
    std::copy(prog.objective.begin(), prog.objective.end(), phase2.begin());
    if (t.optimize(phase2, allowed) == Tableau::Result::Unbounded) {
        out.status = Status::Unbounded;
        return out;
    }

    out.status = Status::Optimal;
    out.solution = lower;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t b = t.basis()[i];
        if (b < n) out.solution[b] += std::max(t.rhs(i), 0.0);
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.objective += prog.objective[j] * out.solution[j];
    return out;
}

double max_violation(const LinearProgram& prog, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < prog.lower_bounds.size() && j < x.size(); ++j) {
        worst = std::max(worst, prog.lower_bounds[j] - x[j]);
    }
    if (prog.lower_bounds.empty()) {
        for (double xj : x) worst = std::max(worst, -xj);
    }
    for (const auto& c : prog.constraints) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < c.coeffs.size() && j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
        switch (c.relation) {
            case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
            case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
            case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
    }
    return "unknown";
}

}  // namespace tandemfluid::lp

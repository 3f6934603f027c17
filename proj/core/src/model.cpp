#include "tandemfluid/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tandemfluid {

namespace {

bool at_zero(double q) { return q <= kBoundaryTol; }
bool at_cap(double q, double cap) { return q >= cap - kBoundaryTol; }

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
}

}  // namespace

double inflow_in(const InflowSpec& inflow, Mode m) {
    if (const auto* c = std::get_if<ConstantInflow>(&inflow)) {
        return c->r;
    }
    const auto& f = std::get<ModeResponsiveInflow>(inflow);
    return m == Mode::High ? f.r1 : f.r2;
}

ValidationReport validate_params(const SystemParams& p) {
    ValidationReport report;
    auto& out = report.violations;
    const double fields[] = {p.v, p.u1, p.u2, p.lambda, p.mu, p.theta};
    for (double x : fields) {
        if (!std::isfinite(x)) {
            out.emplace_back("all parameters must be finite");
            return report;
        }
    }
    if (p.u2 < 0.0) out.push_back(describe("u2 must be non-negative", p.u2));
    if (p.u2 > p.v) out.push_back(describe("u2 must not exceed v", p.u2));
    if (p.v > p.u1) out.push_back(describe("v must not exceed u1", p.v));
    if (!(p.lambda > 0.0)) out.push_back(describe("lambda must be positive", p.lambda));
    if (!(p.mu > 0.0)) out.push_back(describe("mu must be positive", p.mu));
    if (p.theta < 0.0) out.push_back(describe("theta must be non-negative", p.theta));
    return report;
}

ValidationReport validate_inflow(const InflowSpec& inflow) {
    ValidationReport report;
    auto check = [&](const char* name, double r) {
        if (!std::isfinite(r) || r < 0.0) {
            report.violations.push_back(describe(name, r));
        }
    };
    if (const auto* c = std::get_if<ConstantInflow>(&inflow)) {
        check("inflow r must be a finite non-negative rate", c->r);
    } else {
        const auto& f = std::get<ModeResponsiveInflow>(inflow);
        check("inflow r1 must be a finite non-negative rate", f.r1);
        check("inflow r2 must be a finite non-negative rate", f.r2);
    }
    return report;
}

void require_in_state_space(double q1, double q2, const SystemParams& p) {
    if (!(q1 >= -kBoundaryTol) || !(q2 >= -kBoundaryTol) || !(q2 <= p.theta + kBoundaryTol)) {
        std::ostringstream os;
        os << "state (" << q1 << ", " << q2 << ") outside [0, inf) x [0, " << p.theta << "]";
        throw ModelError(os.str());
    }
}

DischargeRates discharge_rates(Mode i, double q1, double q2, double r, const SystemParams& p) {
    require_in_state_space(q1, q2, p);
    const double u = p.capacity(i);

    // Link 1 sends at capacity while queued, otherwise passes the inflow through.
    double s1 = at_zero(q1) ? std::min(r, p.v) : p.v;
    // A full downstream buffer can only absorb what it discharges.
    if (at_cap(q2, p.theta)) {
        s1 = std::min(s1, u);
    }
    const double s2 = at_zero(q2) ? std::min(s1, u) : u;
    return {s1, s2};
}

std::array<double, 2> vector_field(Mode i, double q1, double q2, double r, const SystemParams& p) {
    const auto s = discharge_rates(i, q1, q2, r, p);
    return {r - s.s1, s.s1 - s.s2};
}

}  // namespace tandemfluid

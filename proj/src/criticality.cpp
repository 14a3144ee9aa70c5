#include "gdfractal/criticality.hpp"

#include <cmath>
#include <limits>

namespace gdfractal {

namespace {

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Qbar(u,v) = S + sqrt(S^2 - 16 y (u.v - y)); the unscaled Q of the quotient.
double q_bar(double y, const ScalarState& s) {
    const double nsq = s.norm_sq_total();
    const double rad = nsq * nsq - 16.0 * y * (dot(s.u, s.v) - y);
    return nsq + std::sqrt(std::max(rad, 0.0));
}

}  // namespace

MinimizerSet minimizer_set(const ScalarProblem& p) {
    p.validate();
    if (p.lambda == 0.0) return {MinimizerKind::Hyperboloid, 0.0};
    if (p.lambda >= std::abs(p.y)) return {MinimizerKind::OriginOnly, 0.0};
    return {MinimizerKind::Sphere, std::abs(p.y) - p.lambda};
}

double critical_step_size(double y, const Vec& u0, const Vec& v0) {
    if (u0.size() != v0.size()) throw std::invalid_argument("critical_step_size: length mismatch");
    const ScalarState s{u0, v0};
    const double qb = q_bar(y, s);
    const double inv_y = (y == 0.0) ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(y);
    const double second =
        (qb == 0.0) ? std::numeric_limits<double>::infinity() : 8.0 / qb;
    return std::min(inv_y, second);
}

bool in_domain_dprime(double y, double eta, const ScalarState& s) {
    if (!(eta > 0.0)) throw std::invalid_argument("in_domain_dprime: eta > 0 required");
    if (!(eta * std::abs(y) < 1.0))
        throw std::domain_error("in_domain_dprime: eta |y| < 1 required");
    return q_bar(y, s) < 8.0 / eta;
}

std::pair<double, double> small_step_thresholds(double y, double lambda, const ScalarState& s) {
    const double denom = 4.0 * lambda + q_bar(y, s);
    if (denom <= 0.0) return {std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()};
    return {8.0 / denom, 4.0 / denom};
}

std::pair<ScalarState, ScalarState> p_minus_p_plus(const ScalarProblem& p, const ScalarState& s) {
    check_dims(p, s);
    const MinimizerSet m = minimizer_set(p);
    if (m.kind != MinimizerKind::Sphere)
        throw std::domain_error("p_minus_p_plus: defined only for 0 < lambda < |y|");
    const double sy = sgn(p.y);
    Vec dir(p.d);
    for (int i = 0; i < p.d; ++i) dir[i] = s.u[i] + sy * s.v[i];
    const double n = norm2(dir);
    if (n < 1e-12)
        throw std::domain_error("p_minus_p_plus: degenerate direction u + sgn(y) v = 0");
    const double r = std::sqrt(m.radius_sq);
    ScalarState pm{Vec(p.d), Vec(p.d)}, pp{Vec(p.d), Vec(p.d)};
    for (int i = 0; i < p.d; ++i) {
        const double ni = dir[i] / n;
        pm.u[i] = r * ni;
        pm.v[i] = sy * r * ni;
        pp.u[i] = -r * ni;
        pp.v[i] = -sy * r * ni;
    }
    return {std::move(pm), std::move(pp)};
}

ClassifiedOutcome classify_outcome(const ScalarProblem& p, const StepConfig& c,
                                   const ScalarState& s0) {
    ClassifiedOutcome r;
    r.outcome = simulate(p, c, s0);
    const ScalarState& f = r.outcome.final_state;
    if (f.finite()) {
        r.squared_norm = f.norm_sq_total();
        r.imbalance = gdfractal::imbalance(f);
    } else {
        r.squared_norm = std::numeric_limits<double>::infinity();
        r.imbalance = std::numeric_limits<double>::infinity();
    }
    if (r.outcome.kind == OutcomeKind::ConvergedMinimizer) {
        r.stable = r.squared_norm < 2.0 / c.eta;
        if (minimizer_set(p).kind == MinimizerKind::Sphere) {
            try {
                auto [pm, pp] = p_minus_p_plus(p, s0);
                double dm = 0.0, dp = 0.0;
                for (int i = 0; i < p.d; ++i) {
                    dm += (f.u[i] - pm.u[i]) * (f.u[i] - pm.u[i]) +
                          (f.v[i] - pm.v[i]) * (f.v[i] - pm.v[i]);
                    dp += (f.u[i] - pp.u[i]) * (f.u[i] - pp.u[i]) +
                          (f.v[i] - pp.v[i]) * (f.v[i] - pp.v[i]);
                }
                r.selection = dm <= dp ? MinimizerSelection::PMinus : MinimizerSelection::PPlus;
                r.selection_dist = std::sqrt(std::min(dm, dp));
            } catch (const std::domain_error&) {
                r.selection = MinimizerSelection::None;  // degenerate direction
            }
        }
    }
    return r;
}

}  // namespace gdfractal

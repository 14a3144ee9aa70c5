#include "gdfractal/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdfractal/polyroots.hpp"

namespace gdfractal {

namespace {

double cone_slack(const QuotientParams& q, const QuotientState& s) {
    return s.w - 2.0 * std::abs(s.z + q.mu);
}

double cone_scale(const QuotientParams& q, const QuotientState& s) {
    return std::max({1.0, std::abs(s.w), 2.0 * std::abs(s.z + q.mu)});
}

const char* branch_name(BranchId b) {
    switch (b) {
        case BranchId::G0: return "G0";
        case BranchId::G1: return "G1";
        default: return "G2";
    }
}

// Newton refinement of F(x) = target with the analytic 2x2 Jacobian; the
// quintic root alone leaves ~1e-12 residuals, which deep branch compositions
// amplify past tolerance.
QuotientState newton_polish_preimage(const QuotientParams& q, QuotientState x,
                                     const QuotientState& target, int iters = 3) {
    for (int k = 0; k < iters; ++k) {
        const QuotientState f = F_step(q, x);
        const double rz = f.z - target.z, rw = f.w - target.w;
        const double one = 1.0 - q.nu;
        const double a = 3.0 * x.z * x.z + 2.0 * q.mu * x.z + one * one - x.w + q.nu * x.w;
        const double b = x.z * (q.nu - 1.0);
        const double c = 2.0 * x.z * x.w - 4.0 * one * (2.0 * x.z + q.mu);
        const double d = one * one + x.z * x.z;
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) break;
        const QuotientState next{x.z - (d * rz - b * rw) / det, x.w - (-c * rz + a * rw) / det};
        if (!std::isfinite(next.z) || !std::isfinite(next.w)) break;
        x = next;
    }
    return x;
}

}  // namespace

std::pair<double, double> project_raw(const ScalarState& s) {
    return {dot(s.u, s.v), norm_sq(s.u) + norm_sq(s.v)};
}

QuotientState project_scaled(const ScalarState& s, const ScalarProblem& p, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("project_scaled: eta > 0 required");
    auto [uv, nsq] = project_raw(s);
    return {eta * (uv - p.y), eta * nsq};
}

std::pair<double, double> f_step(double eta, double y, double lambda,
                                 std::pair<double, double> zw) {
    const auto [z, w] = zw;
    const double e = eta, l = lambda;
    const double zp = e * e * z * z * z + e * e * y * z * z +
                      ((1.0 - e * l) * (1.0 - e * l) - e * w + e * e * l * w) * z +
                      y * e * e * l * l - 2.0 * y * e * l;
    const double wp = ((1.0 - e * l) * (1.0 - e * l) + e * e * z * z) * w -
                      4.0 * e * z * (1.0 - e * l) * (z + y);
    return {zp, wp};
}

QuotientState F_step(const QuotientParams& q, const QuotientState& s) {
    const double z = s.z, w = s.w, mu = q.mu, nu = q.nu;
    const double one = 1.0 - nu;
    const double zp = z * z * z + mu * z * z + (one * one - w + nu * w) * z +
                      nu * nu * mu - 2.0 * mu * nu;
    const double wp = (one * one + z * z) * w - 4.0 * z * one * (z + mu);
    return {zp, wp};
}

double Q_value(const QuotientParams& q, const QuotientState& s, const QuotientTolerances& tol) {
    const double rad = s.w * s.w - 16.0 * q.mu * s.z;
    const double scale = std::max({1.0, s.w * s.w, std::abs(16.0 * q.mu * s.z)});
    if (rad < -tol.radicand_clamp * scale)
        throw std::domain_error("Q_value: point outside the cone beyond tolerance");
    return s.w + std::sqrt(std::max(rad, 0.0));
}

RegionClass omega_membership(const QuotientParams& q, const QuotientState& s, double tol_geom) {
    const double slack = cone_slack(q, s);
    const double scale = cone_scale(q, s);
    if (std::abs(slack) <= tol_geom * scale) return RegionClass::Boundary;
    return slack > 0.0 ? RegionClass::Interior : RegionClass::Outside;
}

MonotonicityClass monotonicity_class(const QuotientParams& q, const QuotientState& s,
                                     double tol_geom) {
    if (omega_membership(q, s, tol_geom) == RegionClass::Outside)
        throw std::domain_error("monotonicity_class: state outside the cone");
    const double z = s.z, w = s.w, mu = q.mu, nu = q.nu;

    if (q.nu == 0.0) {
        const double line = w - mu * z - 4.0;
        const double scale = std::max({1.0, std::abs(w), std::abs(mu * z)});
        const bool on_line = std::abs(line) <= tol_geom * scale;
        const bool on_fiber = std::abs(z) <= tol_geom * std::max(1.0, std::abs(w));
        // {Q = 4|mu|} is the lower piece of the cone edge w = 2 sgn(mu)(z+mu).
        const bool on_floor = mu != 0.0 &&
                              std::abs(w - 2.0 * (mu > 0 ? 1.0 : -1.0) * (z + mu)) <=
                                  tol_geom * cone_scale(q, s) &&
                              w <= 4.0 * std::abs(mu) + tol_geom;
        if (on_line || on_fiber || on_floor) return MonotonicityClass::InvariantSet;
        return line < 0.0 ? MonotonicityClass::Decrease : MonotonicityClass::Increase;
    }

    // nu > 0: sign of Q(F) - Q from the closed-form expression; mu < 0 via mirror.
    double zz = z, m = mu;
    if (m < 0.0) {
        zz = -z;
        m = -mu;
    }
    double expr;
    if (m == 0.0) {
        expr = 4.0 * zz * zz * (nu - 1.0) + w * (zz * zz + nu * nu - 2.0 * nu);
    } else {
        const double rad = std::max(w * w - 16.0 * m * zz, 0.0);
        const double srt = w - std::sqrt(rad);
        expr = 2.0 * m * (zz * zz + nu * nu - 2.0 * nu) - (1.0 - nu) * zz * srt;
    }
    return expr <= 0.0 ? MonotonicityClass::Decrease : MonotonicityClass::Increase;
}

std::vector<QuotientState> preimage_all(const QuotientParams& q, const QuotientState& target,
                                        const QuotientTolerances& tol) {
    q.require_branch_domain();
    if (omega_membership(q, target, tol.tol_geom) == RegionClass::Outside)
        throw std::domain_error("preimage_all: target outside the cone");

    const double mu = q.mu, nu = q.nu;
    const double z0 = target.z, w0 = target.w;
    const double nm1 = nu - 1.0;

    // Quintic from eliminating w in the two-component system (valid for z != 0).
    Vec coeffs(6);
    coeffs[5] = 1.0;
    coeffs[4] = mu;
    coeffs[3] = -2.0 * nm1 * nm1;
    coeffs[2] = (-2.0 * nu * nu + 4.0 * nu - 3.0) * mu - z0;
    coeffs[1] = nm1 * (nu * nu * nu - 3.0 * nu * nu + 3.0 * nu + w0 - 1.0);
    coeffs[0] = nm1 * nm1 * (mu * nu * (nu - 2.0) - z0);

    std::vector<double> zs;
    try {
        zs = real_poly_roots(coeffs);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("preimage_all: root finding failed: ") + e.what());
    }

    const double target_scale = std::max({1.0, std::abs(z0), std::abs(w0)});
    const double z_zero_tol = 1e-9;

    std::vector<QuotientState> found;
    auto consider = [&](double z, double w) {
        QuotientState cand{z, w};
        if (!std::isfinite(z) || !std::isfinite(w)) return;
        if (omega_membership(q, cand, 1e-9) == RegionClass::Outside) return;
        const QuotientState fwd = F_step(q, cand);
        const double resid = std::max(std::abs(fwd.z - z0), std::abs(fwd.w - w0));
        if (resid > tol.tol_verify * target_scale) return;
        for (const auto& prev : found)
            if (state_dist(prev, cand) <= 1e-7 * std::max(1.0, std::abs(w))) return;
        found.push_back(cand);
    };

    for (double z : zs) {
        if (std::abs(z) <= z_zero_tol) continue;  // z = 0 handled below
        const double w = (4.0 * z * (1.0 - nu) * (z + mu) + w0) / (z * z + (1.0 - nu) * (1.0 - nu));
        consider(z, w);
    }

    // z = 0 maps to (mu nu (nu-2), (1-nu)^2 w); a preimage only when the
    // z-component matches the target.
    if (std::abs(z0 - mu * nu * (nu - 2.0)) <= tol.tol_verify * target_scale) {
        const double w = w0 / ((1.0 - nu) * (1.0 - nu));
        consider(0.0, w);
    }

    std::sort(found.begin(), found.end(),
              [](const QuotientState& a, const QuotientState& b) { return a.z < b.z; });
    return found;
}

QuotientState branch_inverse(const QuotientParams& q, BranchId b, const QuotientState& target,
                             const QuotientTolerances& tol) {
    return branch_inverse(q, b, target, preimage_all(q, target, tol), tol);
}

QuotientState branch_inverse(const QuotientParams& q, BranchId b, const QuotientState& target,
                             const std::vector<QuotientState>& pre,
                             const QuotientTolerances& tol) {
    q.require_branch_domain();
    const double edge = 1.0 - q.nu;
    if (b == BranchId::G1) {
        const double qv = Q_value(q, target, tol);
        if (qv < 6.0 - 4.0 * q.nu - tol.tol_geom * std::max(1.0, std::abs(qv)))
            throw std::domain_error("branch_inverse: G1 requires Q(target) >= 6 - 4 nu");
    }

    const double tie = 1e-9 * std::max(1.0, edge);

    const QuotientState* best = nullptr;
    double best_resid = std::numeric_limits<double>::infinity();
    for (const auto& c : pre) {
        // Shared lines z = +-(1-nu) belong to G1's closure.
        const bool on_line = std::abs(c.z + edge) <= tie || std::abs(c.z - edge) <= tie;
        bool in_range = false;
        switch (b) {
            case BranchId::G0: in_range = c.z < -edge && !on_line; break;
            case BranchId::G2: in_range = c.z > edge && !on_line; break;
            case BranchId::G1: in_range = std::abs(c.z) <= edge + tie || on_line; break;
        }
        if (!in_range) continue;
        const QuotientState fwd = F_step(q, c);
        const double resid = std::max(std::abs(fwd.z - target.z), std::abs(fwd.w - target.w));
        if (resid < best_resid) {
            best = &c;
            best_resid = resid;
        }
    }
    if (best == nullptr)
        throw std::domain_error(std::string("branch_inverse: no verified preimage in range of ") +
                                branch_name(b));
    return newton_polish_preimage(q, *best, target);
}

QuotientState deep_preimage_limit(const QuotientParams& q) {
    q.require_branch_domain();
    const double am = std::abs(q.mu);
    const double w = 4.0 - 2.0 * (q.nu + am);
    const double z = 2.0 - q.nu;
    return q.mu >= 0.0 ? QuotientState{-z, w} : QuotientState{z, w};
}

QuotientState g0_limit(const QuotientParams& q, const QuotientState& start, int n,
                       const QuotientTolerances& tol) {
    if (!(q.nu >= 0.0 && q.nu < std::min(0.5, 1.0 - std::abs(q.mu))))
        throw std::domain_error("g0_limit: 0 <= nu < min(1/2, 1-|mu|) required");
    const BranchId b = q.mu >= 0.0 ? BranchId::G0 : BranchId::G2;
    QuotientState s = start;
    for (int k = 0; k < n; ++k) s = branch_inverse(q, b, s, tol);
    return s;
}

QuotientState reach_initial(const QuotientParams& q, const QuotientState& target,
                            const std::vector<BranchId>& suffix, int n_g0,
                            const QuotientTolerances& tol) {
    if (n_g0 < 0) throw std::invalid_argument("reach_initial: n_g0 >= 0 required");
    const BranchId contracting = q.mu >= 0.0 ? BranchId::G0 : BranchId::G2;
    QuotientState s = target;
    int step = 0;
    try {
        for (; step < n_g0; ++step) s = branch_inverse(q, contracting, s, tol);
        for (const BranchId b : suffix) {
            s = branch_inverse(q, b, s, tol);
            ++step;
        }
    } catch (const std::exception& e) {
        throw std::domain_error("reach_initial: branch failure at step " + std::to_string(step) +
                                ": " + e.what());
    }
    return s;
}

ScalarState fiber_lift(double uv_dot, double nsq, int d) {
    if (d < 1) throw std::invalid_argument("fiber_lift: d >= 1 required");
    const double psq = nsq + 2.0 * uv_dot;
    const double qsq = nsq - 2.0 * uv_dot;
    const double scale = std::max(1.0, std::abs(nsq));
    if (psq < -1e-9 * scale || qsq < -1e-9 * scale)
        throw std::domain_error("fiber_lift: target outside the cone");
    const double pn = std::sqrt(std::max(psq, 0.0));
    const double qn = std::sqrt(std::max(qsq, 0.0));
    ScalarState s{Vec(d, 0.0), Vec(d, 0.0)};
    if (d == 1) {
        s.u[0] = 0.5 * (pn + qn);
        s.v[0] = 0.5 * (pn - qn);
    } else {
        s.u[0] = 0.5 * pn;
        s.v[0] = 0.5 * pn;
        s.u[1] = 0.5 * qn;
        s.v[1] = -0.5 * qn;
    }
    return s;
}

}  // namespace gdfractal

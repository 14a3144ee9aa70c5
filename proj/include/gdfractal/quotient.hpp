#pragma once

// Planar quotient of the descent dynamics: the projection T, the raw map f
// and its scaled conjugate F(z,w) with parameters (mu, nu) = (eta*y, eta*lambda),
// the Lyapunov-like function Q, region classifiers, the preimage quintic, and
// the three inverse branches G0/G1/G2 with the boundary-reaching construction.

#include <utility>
#include <vector>

#include "gdfractal/scalar.hpp"

namespace gdfractal {

struct QuotientParams {
    double mu = 0.0;
    double nu = 0.0;

    // Branch and limit machinery require 0 <= nu < 1 - |mu|.
    bool branch_domain_ok() const { return nu >= 0.0 && nu < 1.0 - std::abs(mu); }
    void require_branch_domain() const {
        if (!branch_domain_ok())
            throw std::domain_error("QuotientParams: 0 <= nu < 1 - |mu| required");
    }
};

struct QuotientState {
    double z = 0.0;
    double w = 0.0;
};

inline double state_dist(const QuotientState& a, const QuotientState& b) {
    return std::hypot(a.z - b.z, a.w - b.w);
}

enum class BranchId { G0, G1, G2 };

enum class RegionClass { Interior, Boundary, Outside };

enum class MonotonicityClass { Decrease, Increase, InvariantSet };

struct QuotientTolerances {
    double tol_geom = 1e-12;    // cone membership / invariant-set width
    double tol_verify = 1e-9;   // F round-trip residual for accepted preimages
    double radicand_clamp = 1e-12;
};

// (u.v, |u|^2 + |v|^2) -- the unshifted projection of Section-3 form.
std::pair<double, double> project_raw(const ScalarState& s);

// (eta (u.v - y), eta (|u|^2 + |v|^2)) -- the canonical coordinates F acts in.
QuotientState project_scaled(const ScalarState& s, const ScalarProblem& p, double eta);

// The unscaled planar map in shifted coordinates (z = u.v - y, w = |u|^2+|v|^2).
std::pair<double, double> f_step(double eta, double y, double lambda,
                                 std::pair<double, double> zw);

QuotientState F_step(const QuotientParams& q, const QuotientState& s);

// Q(z,w) = w + sqrt(w^2 - 16 mu z); >= 4|mu| on the cone. Radicand values in
// [-clamp*scale, 0) are flattened to 0, more negative ones are a domain error.
double Q_value(const QuotientParams& q, const QuotientState& s,
               const QuotientTolerances& tol = {});

RegionClass omega_membership(const QuotientParams& q, const QuotientState& s,
                             double tol_geom = 1e-12);

MonotonicityClass monotonicity_class(const QuotientParams& q, const QuotientState& s,
                                     double tol_geom = 1e-12);

// All verified F-preimages of target (target in cone required). Real quintic
// roots via the companion matrix + Newton polish; the z=0 candidate is tested
// against the original system separately; every candidate must pass the
// F-round-trip check and cone membership.
std::vector<QuotientState> preimage_all(const QuotientParams& q, const QuotientState& target,
                                        const QuotientTolerances& tol = {});

// The unique preimage with z <= nu-1 (G0), |z| <= 1-nu (G1, needs Q >= 6-4nu),
// or z >= 1-nu (G2). Ties at the shared lines go to G1.
QuotientState branch_inverse(const QuotientParams& q, BranchId b, const QuotientState& target,
                             const QuotientTolerances& tol = {});

// Same selection over a precomputed preimage_all(q, target) list.
QuotientState branch_inverse(const QuotientParams& q, BranchId b, const QuotientState& target,
                             const std::vector<QuotientState>& preimages,
                             const QuotientTolerances& tol = {});

// n-fold iterate of the contracting boundary branch: G0 for mu >= 0, G2 for
// mu < 0 (exact mirror). Converges to deep_preimage_limit(q).
QuotientState g0_limit(const QuotientParams& q, const QuotientState& start, int n,
                       const QuotientTolerances& tol = {});

// Limit of the deep-preimage iteration: (-2+nu, 4-2(nu+|mu|)) for mu >= 0,
// mirrored in z for mu < 0. Lies on the invariant cone boundary, Q = 8-4nu.
QuotientState deep_preimage_limit(const QuotientParams& q);

// G_{suffix.back()} o ... o G_{suffix.front()} o G0^{n_g0} (target). Forward
// iteration of F for n_g0 + suffix.size() steps recovers target; branch-domain
// violations are reported with the failing step index.
QuotientState reach_initial(const QuotientParams& q, const QuotientState& target,
                            const std::vector<BranchId>& suffix, int n_g0,
                            const QuotientTolerances& tol = {});

// A scalar state with u.v = uv_dot and |u|^2+|v|^2 = nsq (requires
// nsq >= 2|uv_dot| up to rounding). u+v along e1, u-v along e2 (e1 if d=1).
ScalarState fiber_lift(double uv_dot, double nsq, int d);

}  // namespace gdfractal

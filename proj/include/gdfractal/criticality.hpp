#pragma once

// Critical step size (the exact two-term formula), convergence-region
// membership, small-step selection thresholds, the minimizer set with
// nearest/farthest solutions, and the enriched trajectory classifier.

#include "gdfractal/scalar.hpp"

namespace gdfractal {

enum class MinimizerKind { Sphere, OriginOnly, Hyperboloid };

struct MinimizerSet {
    MinimizerKind kind = MinimizerKind::Hyperboloid;
    double radius_sq = 0.0;  // |y| - lambda when kind == Sphere
};

MinimizerSet minimizer_set(const ScalarProblem& p);

// min{1/|y|, 8 / (S + sqrt(S^2 - 16 y (u0.v0 - y)))} with S = |u0|^2 + |v0|^2;
// 1/0 = +inf when y = 0. Unregularized problem only.
double critical_step_size(double y, const Vec& u0, const Vec& v0);

// Strict membership in the smooth convergence region for step size eta.
bool in_domain_dprime(double y, double eta, const ScalarState& s);

// (8/(4 lambda + Qbar), 4/(4 lambda + Qbar)); below the first value descent
// converges to a global minimizer, below the second it selects the nearest one.
std::pair<double, double> small_step_thresholds(double y, double lambda, const ScalarState& s);

// Nearest and farthest global minimizers from s (Sphere problems only).
// Degenerate direction u + sgn(y) v = 0 is a measure-zero error.
std::pair<ScalarState, ScalarState> p_minus_p_plus(const ScalarProblem& p, const ScalarState& s);

enum class MinimizerSelection { None, PMinus, PPlus };

struct ClassifiedOutcome {
    Outcome outcome;
    double squared_norm = 0.0;  // of the final state
    double imbalance = 0.0;
    bool stable = false;  // |u|^2 + |v|^2 < 2/eta at the limit
    MinimizerSelection selection = MinimizerSelection::None;
    double selection_dist = 0.0;  // distance to the selected minimizer
};

ClassifiedOutcome classify_outcome(const ScalarProblem& p, const StepConfig& c,
                                   const ScalarState& s0);

}  // namespace gdfractal

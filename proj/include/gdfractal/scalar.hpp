#pragma once

// Scalar-vector factorization: loss L(u,v) = (u.v - y)^2/2 + lambda/2 (|u|^2+|v|^2),
// its gradient, the fixed-step descent map, trajectory simulation with
// outcome classification, and the closed-form Hessian spectrum for lambda=0.

#include <limits>
#include <vector>

#include "gdfractal/linalg.hpp"

namespace gdfractal {

struct ScalarProblem {
    double y = 0.0;
    double lambda = 0.0;
    int d = 1;

    void validate() const {
        if (d < 1) throw std::invalid_argument("ScalarProblem: d >= 1 required");
        if (lambda < 0.0) throw std::invalid_argument("ScalarProblem: lambda >= 0 required");
    }
};

struct ScalarState {
    Vec u;
    Vec v;

    bool finite() const { return all_finite(u) && all_finite(v); }
    double norm_sq_total() const { return norm_sq(u) + norm_sq(v); }
};

inline void check_dims(const ScalarProblem& p, const ScalarState& s) {
    if (static_cast<int>(s.u.size()) != p.d || static_cast<int>(s.v.size()) != p.d)
        throw std::invalid_argument("scalar state dimension mismatch");
}

struct StepConfig {
    double eta = 0.1;
    long max_iters = 10000;
    double loss_tol = 1e-8;               // slack above the global minimum
    double divergence_threshold = 100.0;  // loss value declaring divergence
    double saddle_tol = 1e-8;             // norm radius declaring saddle capture

    static StepConfig tol8(double eta_) {
        StepConfig c;
        c.eta = eta_;
        return c;
    }
    static StepConfig tol6(double eta_) {
        StepConfig c;
        c.eta = eta_;
        c.loss_tol = 1e-6;
        return c;
    }

    void validate() const {
        if (!(eta > 0.0)) throw std::invalid_argument("StepConfig: eta > 0 required");
        if (!(loss_tol > 0.0)) throw std::invalid_argument("StepConfig: loss_tol > 0 required");
        if (!(divergence_threshold > loss_tol))
            throw std::invalid_argument("StepConfig: divergence_threshold > loss_tol required");
    }
};

enum class OutcomeKind { ConvergedMinimizer, ConvergedSaddle, Diverged, Undecided };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Undecided;
    ScalarState final_state;
    long iterations = 0;
    double final_loss = std::numeric_limits<double>::quiet_NaN();
};

double scalar_loss(const ScalarProblem& p, const ScalarState& s);

// Returns (grad_u, grad_v) = ((u.v - y) v + lambda u, (u.v - y) u + lambda v).
std::pair<Vec, Vec> scalar_gradient(const ScalarProblem& p, const ScalarState& s);

// One descent step; both blocks update from the pre-step state.
ScalarState gd_step(const ScalarProblem& p, double eta, const ScalarState& s);

// Closed-form value of min L: 0 for lambda=0, y^2/2 for lambda >= |y|,
// lambda |y| - lambda^2/2 otherwise.
double global_minimum(const ScalarProblem& p);

Outcome simulate(const ScalarProblem& p, const StepConfig& c, const ScalarState& s0);

// Eigenvalues of the 2d x 2d Hessian for lambda=0, sorted ascending:
// +-(u.v - y), each d-1 fold, plus the two explicit roots.
Vec hessian_eigenvalues_unregularized(const ScalarProblem& p, const ScalarState& s);

// |u u^T - v v^T|_F = sqrt(|u|^4 + |v|^4 - 2 (u.v)^2), clamped at 0.
double imbalance(const ScalarState& s);

// Dense 2d x 2d Hessian of L at s (any lambda); block order (u, v).
Mat scalar_hessian(const ScalarProblem& p, const ScalarState& s);

}  // namespace gdfractal

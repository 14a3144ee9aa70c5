#include "gdfractal/scalar.hpp"

#include <cmath>

namespace gdfractal {

double scalar_loss(const ScalarProblem& p, const ScalarState& s) {
    check_dims(p, s);
    const double r = dot(s.u, s.v) - p.y;
    return 0.5 * r * r + 0.5 * p.lambda * (norm_sq(s.u) + norm_sq(s.v));
}

std::pair<Vec, Vec> scalar_gradient(const ScalarProblem& p, const ScalarState& s) {
    check_dims(p, s);
    const double r = dot(s.u, s.v) - p.y;
    Vec gu(p.d), gv(p.d);
    for (int i = 0; i < p.d; ++i) {
        gu[i] = r * s.v[i] + p.lambda * s.u[i];
        gv[i] = r * s.u[i] + p.lambda * s.v[i];
    }
    return {std::move(gu), std::move(gv)};
}

ScalarState gd_step(const ScalarProblem& p, double eta, const ScalarState& s) {
    if (!(eta > 0.0)) throw std::invalid_argument("gd_step: eta > 0 required");
    auto [gu, gv] = scalar_gradient(p, s);
    ScalarState out = s;
    for (int i = 0; i < p.d; ++i) {
        out.u[i] = s.u[i] - eta * gu[i];
        out.v[i] = s.v[i] - eta * gv[i];
    }
    return out;
}

double global_minimum(const ScalarProblem& p) {
    p.validate();
    const double ay = std::abs(p.y);
    if (p.lambda == 0.0) return 0.0;
    if (p.lambda >= ay) return 0.5 * p.y * p.y;
    return p.lambda * ay - 0.5 * p.lambda * p.lambda;
}

Outcome simulate(const ScalarProblem& p, const StepConfig& c, const ScalarState& s0) {
    p.validate();
    c.validate();
    check_dims(p, s0);

    const double gmin = global_minimum(p);
    const bool saddle_exists = p.lambda < std::abs(p.y);

    Outcome out;
    out.final_state = s0;
    for (long t = 0; t <= c.max_iters; ++t) {
        const ScalarState& s = out.final_state;
        double loss;
        if (!s.finite()) {
            out.kind = OutcomeKind::Diverged;
            out.iterations = t;
            out.final_loss = std::numeric_limits<double>::infinity();
            return out;
        }
        loss = scalar_loss(p, s);
        if (!std::isfinite(loss) || loss >= c.divergence_threshold) {
            out.kind = OutcomeKind::Diverged;
            out.iterations = t;
            out.final_loss = loss;
            return out;
        }
        if (loss <= gmin + c.loss_tol) {
            out.kind = OutcomeKind::ConvergedMinimizer;
            out.iterations = t;
            out.final_loss = loss;
            return out;
        }
        if (saddle_exists && std::sqrt(s.norm_sq_total()) <= c.saddle_tol) {
            out.kind = OutcomeKind::ConvergedSaddle;
            out.iterations = t;
            out.final_loss = loss;
            return out;
        }
        if (t == c.max_iters) {
            out.kind = OutcomeKind::Undecided;
            out.iterations = t;
            out.final_loss = loss;
            return out;
        }
        out.final_state = gd_step(p, c.eta, s);
    }
    return out;  // unreachable
}

Vec hessian_eigenvalues_unregularized(const ScalarProblem& p, const ScalarState& s) {
    if (p.lambda != 0.0)
        throw std::invalid_argument("hessian_eigenvalues_unregularized: lambda = 0 required");
    check_dims(p, s);
    const double r = dot(s.u, s.v) - p.y;
    const double nsq = norm_sq(s.u) + norm_sq(s.v);
    Vec eig;
    eig.reserve(2 * p.d);
    for (int k = 0; k < p.d - 1; ++k) {
        eig.push_back(r);
        eig.push_back(-r);
    }
    double rad = nsq * nsq + 4.0 * r * r + 8.0 * r * (r + p.y);  // 8 r u.v with u.v = r + y
    if (rad < 0.0) rad = 0.0;                                    // symmetric Hessian: rounding only
    const double root = std::sqrt(rad);
    eig.push_back(0.5 * (nsq - root));
    eig.push_back(0.5 * (nsq + root));
    std::sort(eig.begin(), eig.end());
    return eig;
}

double imbalance(const ScalarState& s) {
    const double nu = norm_sq(s.u), nv = norm_sq(s.v), c = dot(s.u, s.v);
    const double rad = nu * nu + nv * nv - 2.0 * c * c;
    return std::sqrt(std::max(rad, 0.0));
}

Mat scalar_hessian(const ScalarProblem& p, const ScalarState& s) {
    check_dims(p, s);
    const double r = dot(s.u, s.v) - p.y;
    const int d = p.d;
    Mat h(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            h(i, j) = s.v[i] * s.v[j] + (i == j ? p.lambda : 0.0);
            h(d + i, d + j) = s.u[i] * s.u[j] + (i == j ? p.lambda : 0.0);
            h(i, d + j) = s.v[i] * s.u[j] + (i == j ? r : 0.0);
            h(d + i, j) = s.u[i] * s.v[j] + (i == j ? r : 0.0);
        }
    return h;
}

}  // namespace gdfractal

#include "gdfractal/polyroots.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdfractal {

std::vector<double> real_poly_roots(Vec coeffs, double imag_tol, int newton_steps) {
    // Trim leading coefficients that are negligible against the rest.
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw std::invalid_argument("real_poly_roots: zero polynomial");
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-14 * scale) coeffs.pop_back();
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};
    if (n == 1) return {-coeffs[0] / coeffs[1]};

    const double lead = coeffs[n];
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[i] / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("real_poly_roots: companion eigensolver failed");

    std::vector<double> roots;
    double root_scale = 1.0;
    for (int i = 0; i < n; ++i)
        root_scale = std::max(root_scale, std::abs(solver.eigenvalues()[i]));
    for (int i = 0; i < n; ++i) {
        const auto ev = solver.eigenvalues()[i];
        if (std::abs(ev.imag()) > imag_tol * root_scale) continue;
        double x = ev.real();
        for (int k = 0; k < newton_steps; ++k) {
            const double d = poly_eval_deriv(coeffs, x);
            if (d == 0.0) break;
            const double step = poly_eval(coeffs, x) / d;
            if (!std::isfinite(step)) break;
            x -= step;
        }
        if (std::isfinite(x)) roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace gdfractal

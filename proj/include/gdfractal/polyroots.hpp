#pragma once

// Real roots of a low-degree real polynomial via the companion-matrix
// eigenvalue route, polished with two Newton steps on the original
// coefficients.

#include <vector>

#include "gdfractal/linalg.hpp"

namespace gdfractal {

// Evaluates p(x) = coeffs[0] + coeffs[1] x + ... + coeffs[n] x^n (Horner).
inline double poly_eval(const Vec& coeffs, double x) {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
    return v;
}

inline double poly_eval_deriv(const Vec& coeffs, double x) {
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;)
        v = v * x + static_cast<double>(k) * coeffs[k];
    return v;
}

// Real roots of p, ascending-coefficient input, degree >= 1 after trimming
// negligible leading coefficients. Roots with |imag| <= imag_tol * scale are
// kept. Throws on a zero polynomial or eigensolver failure.
std::vector<double> real_poly_roots(Vec coeffs, double imag_tol = 1e-8,
                                    int newton_steps = 2);

}  // namespace gdfractal

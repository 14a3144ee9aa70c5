#include "gdfractal/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace gdfractal {

namespace {

// 2x2 symmetric Jacobi rotation zeroing the off-diagonal of [[app, apq], [apq, aqq]].
void sym_rotation(double app, double aqq, double apq, double& c, double& s) {
    if (apq == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    const double tau = (aqq - app) / (2.0 * apq);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = t * c;
}

// Applies G(p,q,c,s)^T * A (rotation of rows p,q).
void rotate_rows(Mat& A, int p, int q, double c, double s) {
    for (int j = 0; j < A.cols; ++j) {
        const double ap = A(p, j), aq = A(q, j);
        A(p, j) = c * ap - s * aq;
        A(q, j) = s * ap + c * aq;
    }
}

// Applies A * G(p,q,c,s) (rotation of columns p,q).
void rotate_cols(Mat& A, int p, int q, double c, double s) {
    for (int i = 0; i < A.rows; ++i) {
        const double ap = A(i, p), aq = A(i, q);
        A(i, p) = c * ap - s * aq;
        A(i, q) = s * ap + c * aq;
    }
}

}  // namespace

SvdResult jacobi_svd(const Mat& m, int max_sweeps, double off_tol) {
    if (m.rows != m.cols) throw std::invalid_argument("jacobi_svd: square input required");
    const int n = m.rows;
    Mat A = m;
    Mat P = Mat::identity(n);
    Mat Q = Mat::identity(n);

    const double scale = std::max(1.0, std::sqrt(A.frob_sq()));
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) off = std::max(off, std::abs(A(i, j)));
        if (off <= off_tol * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                // Left rotation symmetrizing the (p,q) block: choose theta with
                // tan(theta) = (A_pq - A_qp) / (A_pp + A_qq).
                double c1 = 1.0, s1 = 0.0;
                const double denom = A(p, p) + A(q, q);
                const double numer = A(p, q) - A(q, p);
                if (numer != 0.0 || denom != 0.0) {
                    const double r = std::hypot(denom, numer);
                    if (r > 0.0) {
                        c1 = denom / r;
                        s1 = numer / r;
                    }
                }
                rotate_rows(A, p, q, c1, s1);
                rotate_cols(P, p, q, c1, s1);

                // Now A(p,q) == A(q,p) up to rounding; annihilate symmetrically.
                const double apq = 0.5 * (A(p, q) + A(q, p));
                double c2, s2;
                sym_rotation(A(p, p), A(q, q), apq, c2, s2);
                rotate_rows(A, p, q, c2, s2);
                rotate_cols(A, p, q, c2, s2);
                rotate_cols(P, p, q, c2, s2);
                rotate_cols(Q, p, q, c2, s2);
            }
        }
    }
    if (sweep >= max_sweeps) throw std::runtime_error("jacobi_svd: no convergence within sweep cap");

    SvdResult r;
    r.sweeps = sweep;
    r.sigma.resize(n);
    for (int i = 0; i < n; ++i) r.sigma[i] = A(i, i);

    // Fix signs, then order singular values descending.
    for (int i = 0; i < n; ++i) {
        if (r.sigma[i] < 0.0) {
            r.sigma[i] = -r.sigma[i];
            for (int k = 0; k < n; ++k) P(k, i) = -P(k, i);
        }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return r.sigma[i] > r.sigma[j]; });
    Mat Ps(n, n), Qs(n, n);
    Vec sig(n);
    for (int j = 0; j < n; ++j) {
        sig[j] = r.sigma[order[j]];
        for (int i = 0; i < n; ++i) {
            Ps(i, j) = P(i, order[j]);
            Qs(i, j) = Q(i, order[j]);
        }
    }
    r.p = std::move(Ps);
    r.q = std::move(Qs);
    r.sigma = std::move(sig);
    return r;
}

}  // namespace gdfractal

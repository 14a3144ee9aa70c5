#pragma once

// Small dense linear algebra kernels. Everything here is plain row-major
// double storage with sequential summation order; several callers rely on
// that order being deterministic (see matrixfac: the d_y=1 case must
// reproduce the scalar arithmetic bit for bit).

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdfractal {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline bool all_finite(std::span<const double> a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

// Row-major dense matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    Vec col(int j) const {
        Vec c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(int j, std::span<const double> v) {
        for (int i = 0; i < rows; ++i) (*this)(i, j) = v[i];
    }

    Mat transposed() const {
        Mat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frob_sq() const { return norm_sq(a); }
    bool finite() const { return all_finite(a); }
};

inline Mat operator*(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += A(i, k) * B(k, j);
            C(i, j) = s;
        }
    return C;
}

inline Mat operator+(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("mat add: shape mismatch");
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
    return C;
}

inline Mat operator-(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("mat sub: shape mismatch");
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
    return C;
}

inline Mat operator*(double s, const Mat& A) {
    Mat C = A;
    for (double& x : C.a) x *= s;
    return C;
}

inline double max_abs_diff(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < A.a.size(); ++i) m = std::max(m, std::abs(A.a[i] - B.a[i]));
    return m;
}

// Orthonormalizes the columns of A in place (modified Gram-Schmidt).
// Throws if a column is numerically dependent on the previous ones.
inline void orthonormalize_columns(Mat& A, double rank_tol = 1e-10) {
    for (int j = 0; j < A.cols; ++j) {
        Vec cj = A.col(j);
        for (int k = 0; k < j; ++k) {
            Vec ck = A.col(k);
            double p = dot(cj, ck);
            for (int i = 0; i < A.rows; ++i) cj[i] -= p * ck[i];
        }
        double n = norm2(cj);
        if (n < rank_tol) throw std::runtime_error("orthonormalize_columns: rank-deficient frame");
        for (double& x : cj) x /= n;
        A.set_col(j, cj);
    }
}

// Determinant via LU with partial pivoting.
inline double lu_det(Mat A) {
    if (A.rows != A.cols) throw std::invalid_argument("lu_det: not square");
    const int n = A.rows;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            det = -det;
        }
        const double akk = A(k, k);
        det *= akk;
        if (akk == 0.0) return 0.0;
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / akk;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return det;
}

struct SvdResult {
    Mat p;             // left orthogonal factor
    Vec sigma;         // singular values, descending, >= 0
    Mat q;             // right orthogonal factor; input = p * diag(sigma) * q^T
    int sweeps = 0;
};

// Two-sided Jacobi (Kogbetliantz) SVD for small square matrices.
// Each (i,j) step first symmetrizes the 2x2 pivot block with a left rotation,
// then annihilates it with a symmetric Jacobi rotation applied on both sides.
SvdResult jacobi_svd(const Mat& m, int max_sweeps = 100, double off_tol = 1e-13);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    if (sxx == 0.0) {  // degenerate: all abscissae equal
        f.slope = 0.0;
        f.intercept = my;
        f.r_squared = 0.0;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace gdfractal

#pragma once

// General matrix factorization |U^T V - Y|_F^2/2 + lambda/2 (|U|^2+|V|^2) with
// diagonal target: descent kernels, the SVD reduction to a diagonal target,
// the orthogonal-columns slice on which the dynamics decouples into scalar
// problems, measure-zero basin extraction procedures, the descent-map Jacobian
// determinant, and the depth-m product-chain variant.

#include <array>
#include <cstdint>
#include <optional>

#include "gdfractal/geometry.hpp"
#include "gdfractal/scalar.hpp"

namespace gdfractal {

struct MatrixProblem {
    Vec y_diag;           // diagonal target entries, length d_y
    double lambda = 0.0;
    int d = 1;
    int d_y = 1;

    void validate() const {
        if (d < 1 || d_y < 1) throw std::invalid_argument("MatrixProblem: d, d_y >= 1 required");
        if (lambda < 0.0) throw std::invalid_argument("MatrixProblem: lambda >= 0 required");
        if (static_cast<int>(y_diag.size()) != d_y)
            throw std::invalid_argument("MatrixProblem: y_diag length != d_y");
    }
};

struct MatrixState {
    Mat u;  // d x d_y
    Mat v;  // d x d_y
};

inline void check_dims(const MatrixProblem& p, const MatrixState& s) {
    if (s.u.rows != p.d || s.u.cols != p.d_y || s.v.rows != p.d || s.v.cols != p.d_y)
        throw std::invalid_argument("matrix state shape mismatch");
}

double matrix_loss(const MatrixProblem& p, const MatrixState& s);
std::pair<Mat, Mat> matrix_gradient(const MatrixProblem& p, const MatrixState& s);
MatrixState matrix_gd_step(const MatrixProblem& p, double eta, const MatrixState& s);

// Sum of the per-column scalar minima (the target is diagonal).
double matrix_global_minimum(const MatrixProblem& p);

struct MatrixOutcome {
    OutcomeKind kind = OutcomeKind::Undecided;
    MatrixState final_state;
    long iterations = 0;
    double final_loss = 0.0;
};

MatrixOutcome simulate_matrix(const MatrixProblem& p, const StepConfig& c, const MatrixState& s0);

struct TargetSvd {
    Mat p;      // left orthogonal
    Vec sigma;  // singular values, descending
    Mat q;      // right orthogonal; Y = p diag(sigma) q^T
};

// Two-sided Jacobi SVD of a square target; rotations reduce the problem to a
// diagonal one whose descent trajectory matches the original up to rotation.
TargetSvd diagonalize_target(const Mat& y_full);

// One column of a slice initialization: scalar pair coefficients over that
// column's private orthonormal frame vectors. A collinear pair (both second
// coefficients zero) consumes one frame column, a generic pair two.
struct WColumnInit {
    std::array<double, 2> u_coeff{0.0, 0.0};
    std::array<double, 2> v_coeff{0.0, 0.0};

    bool collinear() const { return u_coeff[1] == 0.0 && v_coeff[1] == 0.0; }
};

// Builds a state in the orthogonal-columns slice from per-column scalar pairs.
// frame: d x k with orthonormal columns, k >= total width consumed (checked).
// Cross-column inner products of the result vanish to rounding.
MatrixState slice_w_init(const MatrixProblem& p, const std::vector<WColumnInit>& columns,
                         const Mat& frame);

// alpha I, beta I (square case d == d_y).
MatrixState identity_w_init(const MatrixProblem& p, double alpha, double beta);

// Max |<col_i, col_j>| over distinct columns and the three block pairings.
double w_membership_error(const MatrixState& s);

// Runs matrix descent and the d_y decoupled scalar simulations side by side;
// returns the max entrywise trajectory deviation over all steps and columns.
double decoupling_check(const MatrixProblem& p, double eta, const MatrixState& s0, int steps);

// min over columns of the scalar critical step size (lambda = 0).
double matrix_critical_step_size(const MatrixProblem& p, const MatrixState& s);

struct BasinExtractOptions {
    long n_steps = 6;
    double level = 1e-12;      // loss level located for the unstable-basin set
    double keep_tol = 1e-9;    // forward-simulation loss filter on returned points
    int bisection_iters = 40;
    int n_threads = 0;
};

// Zero set of the distance to {u = -sgn(y) v} after n_steps, contoured by
// sign change between adjacent cell centers with bisection refinement,
// filtered to the smooth convergence region (lambda = 0) or to cells whose
// trajectories converge (lambda > 0). Scalar d = 1 problems.
std::vector<Point2> saddle_basin_points(const ScalarProblem& p, double eta, const GridSpec& spec,
                                        const BasinExtractOptions& opt = {});

// Level set {loss after n_steps = level}, kept only where the forward
// simulation reaches loss <= keep_tol with limit squared norm >= 2/eta - 1e-6
// (unstable minimizers). lambda = 0 only.
std::vector<Point2> unstable_basin_points(const ScalarProblem& p, double eta, const GridSpec& spec,
                                          const BasinExtractOptions& opt = {});

// Dense Hessian of the matrix loss at s; parameter order vec(U) then vec(V),
// column-major within each block.
Mat matrix_hessian(const MatrixProblem& p, const MatrixState& s);

// det(I - eta H(s)); sign changes mark the descent map's critical set.
double gd_jacobian_det(const MatrixProblem& p, double eta, const MatrixState& s);

// Depth-m chain W_1 W_2 ... W_m with Frobenius target fit and L2 penalty.
double deep_loss(const std::vector<Mat>& factors, const Mat& y, double lambda);
std::vector<Mat> deep_gradient(const std::vector<Mat>& factors, const Mat& y, double lambda);
std::vector<Mat> deep_gd_step(const std::vector<Mat>& factors, const Mat& y, double eta,
                              double lambda);

Mat diag_matrix(const Vec& diag);

}  // namespace gdfractal

#include "gdfractal/matrixfac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "gdfractal/criticality.hpp"

namespace gdfractal {

namespace {

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

Mat residual(const MatrixProblem& p, const MatrixState& s) {
    Mat r = s.u.transposed() * s.v;  // d_y x d_y
    for (int i = 0; i < p.d_y; ++i) r(i, i) -= p.y_diag[i];
    return r;
}

}  // namespace

Mat diag_matrix(const Vec& diag) {
    Mat m(static_cast<int>(diag.size()), static_cast<int>(diag.size()));
    for (int i = 0; i < m.rows; ++i) m(i, i) = diag[i];
    return m;
}

double matrix_loss(const MatrixProblem& p, const MatrixState& s) {
    p.validate();
    check_dims(p, s);
    const Mat r = residual(p, s);
    return 0.5 * r.frob_sq() + 0.5 * p.lambda * (s.u.frob_sq() + s.v.frob_sq());
}

std::pair<Mat, Mat> matrix_gradient(const MatrixProblem& p, const MatrixState& s) {
    p.validate();
    check_dims(p, s);
    const Mat r = residual(p, s);
    Mat gu = s.v * r.transposed();
    Mat gv = s.u * r;
    for (std::size_t i = 0; i < gu.a.size(); ++i) {
        gu.a[i] = gu.a[i] + p.lambda * s.u.a[i];
        gv.a[i] = gv.a[i] + p.lambda * s.v.a[i];
    }
    return {std::move(gu), std::move(gv)};
}

MatrixState matrix_gd_step(const MatrixProblem& p, double eta, const MatrixState& s) {
    if (!(eta > 0.0)) throw std::invalid_argument("matrix_gd_step: eta > 0 required");
    auto [gu, gv] = matrix_gradient(p, s);
    MatrixState out = s;
    for (std::size_t i = 0; i < out.u.a.size(); ++i) {
        out.u.a[i] = s.u.a[i] - eta * gu.a[i];
        out.v.a[i] = s.v.a[i] - eta * gv.a[i];
    }
    return out;
}

double matrix_global_minimum(const MatrixProblem& p) {
    p.validate();
    double total = 0.0;
    for (double y : p.y_diag) total += global_minimum(ScalarProblem{y, p.lambda, p.d});
    return total;
}

MatrixOutcome simulate_matrix(const MatrixProblem& p, const StepConfig& c, const MatrixState& s0) {
    p.validate();
    c.validate();
    check_dims(p, s0);
    const double gmin = matrix_global_minimum(p);
    double max_ay = 0.0;
    for (double y : p.y_diag) max_ay = std::max(max_ay, std::abs(y));
    const bool saddle_exists = p.lambda < max_ay;

    MatrixOutcome out;
    out.final_state = s0;
    for (long t = 0; t <= c.max_iters; ++t) {
        const MatrixState& s = out.final_state;
        if (!s.u.finite() || !s.v.finite()) {
            out.kind = OutcomeKind::Diverged;
            out.iterations = t;
            out.final_loss = std::numeric_limits<double>::infinity();
            return out;
        }
        const double loss = matrix_loss(p, s);
        out.final_loss = loss;
        out.iterations = t;
        if (!std::isfinite(loss) || loss >= c.divergence_threshold) {
            out.kind = OutcomeKind::Diverged;
            return out;
        }
        if (loss <= gmin + c.loss_tol) {
            out.kind = OutcomeKind::ConvergedMinimizer;
            return out;
        }
        if (saddle_exists && std::sqrt(s.u.frob_sq() + s.v.frob_sq()) <= c.saddle_tol) {
            out.kind = OutcomeKind::ConvergedSaddle;
            return out;
        }
        if (t == c.max_iters) {
            out.kind = OutcomeKind::Undecided;
            return out;
        }
        out.final_state = matrix_gd_step(p, c.eta, s);
    }
    return out;
}

TargetSvd diagonalize_target(const Mat& y_full) {
    if (y_full.rows != y_full.cols)
        throw std::invalid_argument("diagonalize_target: square target required");
    const SvdResult r = jacobi_svd(y_full, 100, 1e-13);
    return {r.p, r.sigma, r.q};
}

MatrixState slice_w_init(const MatrixProblem& p, const std::vector<WColumnInit>& columns,
                         const Mat& frame) {
    p.validate();
    if (static_cast<int>(columns.size()) != p.d_y)
        throw std::invalid_argument("slice_w_init: one coefficient pair per column required");
    if (frame.rows != p.d) throw std::invalid_argument("slice_w_init: frame rows != d");
    if (p.d < p.d_y) throw std::invalid_argument("slice_w_init: d >= d_y required");

    // Frame columns must be orthonormal.
    for (int i = 0; i < frame.cols; ++i)
        for (int j = i; j < frame.cols; ++j) {
            const double g = dot(frame.col(i), frame.col(j));
            if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-10)
                throw std::invalid_argument("slice_w_init: frame columns not orthonormal");
        }

    int width_total = 0;
    for (const auto& c : columns) width_total += c.collinear() ? 1 : 2;
    if (width_total > frame.cols)
        throw std::invalid_argument("slice_w_init: frame too narrow for the requested pairs");

    MatrixState s{Mat(p.d, p.d_y), Mat(p.d, p.d_y)};
    int offset = 0;
    for (int c = 0; c < p.d_y; ++c) {
        const auto& pair = columns[c];
        const int width = pair.collinear() ? 1 : 2;
        for (int k = 0; k < width; ++k) {
            for (int i = 0; i < p.d; ++i) {
                s.u(i, c) += pair.u_coeff[k] * frame(i, offset + k);
                s.v(i, c) += pair.v_coeff[k] * frame(i, offset + k);
            }
        }
        offset += width;
    }
    if (w_membership_error(s) > 1e-10)
        throw std::runtime_error("slice_w_init: construction left the orthogonal slice");
    return s;
}

MatrixState identity_w_init(const MatrixProblem& p, double alpha, double beta) {
    p.validate();
    if (p.d != p.d_y) throw std::invalid_argument("identity_w_init: square case d == d_y only");
    MatrixState s{Mat(p.d, p.d_y), Mat(p.d, p.d_y)};
    for (int i = 0; i < p.d; ++i) {
        s.u(i, i) = alpha;
        s.v(i, i) = beta;
    }
    return s;
}

double w_membership_error(const MatrixState& s) {
    double worst = 0.0;
    for (int i = 0; i < s.u.cols; ++i)
        for (int j = 0; j < s.u.cols; ++j) {
            if (i == j) continue;
            worst = std::max(worst, std::abs(dot(s.u.col(i), s.u.col(j))));
            worst = std::max(worst, std::abs(dot(s.u.col(i), s.v.col(j))));
            worst = std::max(worst, std::abs(dot(s.v.col(i), s.v.col(j))));
        }
    return worst;
}

double decoupling_check(const MatrixProblem& p, double eta, const MatrixState& s0, int steps) {
    p.validate();
    check_dims(p, s0);
    if (w_membership_error(s0) > 1e-10)
        throw std::invalid_argument("decoupling_check: initial state not in the slice");

    std::vector<ScalarState> scalar_states(p.d_y);
    std::vector<ScalarProblem> scalar_problems(p.d_y);
    for (int c = 0; c < p.d_y; ++c) {
        scalar_states[c] = ScalarState{s0.u.col(c), s0.v.col(c)};
        scalar_problems[c] = ScalarProblem{p.y_diag[c], p.lambda, p.d};
    }

    MatrixState m = s0;
    double deviation = 0.0;
    for (int t = 0; t < steps; ++t) {
        m = matrix_gd_step(p, eta, m);
        for (int c = 0; c < p.d_y; ++c) {
            scalar_states[c] = gd_step(scalar_problems[c], eta, scalar_states[c]);
            for (int i = 0; i < p.d; ++i) {
                deviation = std::max(deviation, std::abs(m.u(i, c) - scalar_states[c].u[i]));
                deviation = std::max(deviation, std::abs(m.v(i, c) - scalar_states[c].v[i]));
            }
        }
    }
    return deviation;
}

double matrix_critical_step_size(const MatrixProblem& p, const MatrixState& s) {
    p.validate();
    check_dims(p, s);
    if (p.lambda != 0.0)
        throw std::domain_error("matrix_critical_step_size: lambda = 0 required");
    double eta = std::numeric_limits<double>::infinity();
    for (int c = 0; c < p.d_y; ++c)
        eta = std::min(eta, critical_step_size(p.y_diag[c], s.u.col(c), s.v.col(c)));
    return eta;
}

namespace {

// Shared contour machinery: rasterizes a signed field at cell centers, finds
// sign changes between 4-adjacent cells, and refines each crossing by
// bisection on the field along the connecting segment.
std::vector<Point2> contour_zero_level(const GridSpec& spec,
                                       const std::function<double(double, double)>& field,
                                       int bisection_iters, int n_threads) {
    spec.validate();
    std::vector<double> f(static_cast<std::size_t>(spec.nx) * spec.ny);
    const int workers = std::min(resolve_thread_count(n_threads), spec.ny);
    auto run_rows = [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i)
                f[static_cast<std::size_t>(j) * spec.nx + i] = field(spec.cell_x(i), spec.cell_y(j));
    };
    if (workers <= 1) {
        run_rows(0, spec.ny);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (spec.ny + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const int lo = t * chunk, hi = std::min(spec.ny, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_rows, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    auto refine = [&](Point2 a, Point2 b, double fa, double fb) -> Point2 {
        for (int k = 0; k < bisection_iters; ++k) {
            const Point2 mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
            const double fm = field(mid[0], mid[1]);
            if (!std::isfinite(fm)) break;
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
        }
        (void)fb;
        return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    };

    std::vector<Point2> pts;
    auto value = [&](int i, int j) { return f[static_cast<std::size_t>(j) * spec.nx + i]; };
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            const double f0 = value(i, j);
            if (!std::isfinite(f0)) continue;
            if (i + 1 < spec.nx) {
                const double f1 = value(i + 1, j);
                if (std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0))
                    pts.push_back(refine({spec.cell_x(i), spec.cell_y(j)},
                                         {spec.cell_x(i + 1), spec.cell_y(j)}, f0, f1));
            }
            if (j + 1 < spec.ny) {
                const double f1 = value(i, j + 1);
                if (std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0))
                    pts.push_back(refine({spec.cell_x(i), spec.cell_y(j)},
                                         {spec.cell_x(i), spec.cell_y(j + 1)}, f0, f1));
            }
        }
    return pts;
}

ScalarState state_2d(double u, double v) { return ScalarState{Vec{u}, Vec{v}}; }

}  // namespace

std::vector<Point2> saddle_basin_points(const ScalarProblem& p, double eta, const GridSpec& spec,
                                        const BasinExtractOptions& opt) {
    p.validate();
    if (p.d != 1) throw std::invalid_argument("saddle_basin_points: d = 1 required");
    const double sy = sgn(p.y);

    auto signed_dist = [&](double u, double v) -> double {
        ScalarState s = state_2d(u, v);
        for (long t = 0; t < opt.n_steps; ++t) {
            s = gd_step(p, eta, s);
            if (!s.finite()) return std::numeric_limits<double>::quiet_NaN();
        }
        return (s.u[0] + sy * s.v[0]) / std::sqrt(2.0);
    };

    auto pts = contour_zero_level(spec, signed_dist, opt.bisection_iters, opt.n_threads);

    std::vector<Point2> kept;
    if (p.lambda == 0.0) {
        for (const auto& q : pts)
            if (in_domain_dprime(p.y, eta, state_2d(q[0], q[1]))) kept.push_back(q);
    } else {
        StepConfig c = StepConfig::tol6(eta);
        c.max_iters = 1000;
        for (const auto& q : pts) {
            // Keep crossings whose immediate neighborhood converges: probe the
            // two cell centers nearest the refined point.
            const double hx = spec.dx(), hy = spec.dy();
            bool converging = false;
            for (const auto& probe :
                 {Point2{q[0] - hx, q[1]}, Point2{q[0] + hx, q[1]}, Point2{q[0], q[1] - hy},
                  Point2{q[0], q[1] + hy}}) {
                const Outcome o = simulate(p, c, state_2d(probe[0], probe[1]));
                if (o.kind == OutcomeKind::ConvergedMinimizer) {
                    converging = true;
                    break;
                }
            }
            if (converging) kept.push_back(q);
        }
    }
    return kept;
}

std::vector<Point2> unstable_basin_points(const ScalarProblem& p, double eta, const GridSpec& spec,
                                          const BasinExtractOptions& opt) {
    p.validate();
    if (p.d != 1) throw std::invalid_argument("unstable_basin_points: d = 1 required");
    if (p.lambda != 0.0) throw std::invalid_argument("unstable_basin_points: lambda = 0 required");

    auto loss_after = [&](double u, double v) -> double {
        ScalarState s = state_2d(u, v);
        for (long t = 0; t < opt.n_steps; ++t) {
            s = gd_step(p, eta, s);
            if (!s.finite()) return std::numeric_limits<double>::infinity();
        }
        return scalar_loss(p, s);
    };
    auto log_field = [&](double u, double v) -> double {
        const double l = loss_after(u, v);
        if (!std::isfinite(l)) return 400.0;
        return std::log10(l + 1e-300) - std::log10(opt.level);
    };

    auto pts = contour_zero_level(spec, log_field, opt.bisection_iters, opt.n_threads);

    const double norm_floor = 2.0 / eta - 1e-6;
    std::vector<Point2> kept;
    for (const auto& q : pts) {
        ScalarState s = state_2d(q[0], q[1]);
        bool bad = false;
        for (long t = 0; t < opt.n_steps; ++t) {
            s = gd_step(p, eta, s);
            if (!s.finite()) {
                bad = true;
                break;
            }
        }
        if (bad) continue;
        if (scalar_loss(p, s) <= opt.keep_tol && s.norm_sq_total() >= norm_floor)
            kept.push_back(q);
    }
    return kept;
}

Mat matrix_hessian(const MatrixProblem& p, const MatrixState& s) {
    p.validate();
    check_dims(p, s);
    const int d = p.d, dy = p.d_y;
    const int block = d * dy;
    const int n = 2 * block;
    if (n > 1000) throw std::invalid_argument("matrix_hessian: parameter count cap is 1000");

    const Mat r = residual(p, s);
    const Mat uut = s.u * s.u.transposed();  // d x d
    const Mat vvt = s.v * s.v.transposed();

    Mat h(n, n);
    auto idx_u = [&](int i, int j) { return i + j * d; };
    auto idx_v = [&](int i, int j) { return block + i + j * d; };

    // Direction dU = e_{i0} e_{j0}^T:
    //   D grad_U = V V^T dU + lambda dU          (column j0 only)
    //   D grad_V = dU R + outer(U[:,j0], V[i0,:]) (dU R has row i0 = R(j0,:))
    for (int j0 = 0; j0 < dy; ++j0)
        for (int i0 = 0; i0 < d; ++i0) {
            const int col = idx_u(i0, j0);
            for (int i = 0; i < d; ++i)
                h(idx_u(i, j0), col) += vvt(i, i0);
            h(col, col) += p.lambda;
            for (int j = 0; j < dy; ++j)
                h(idx_v(i0, j), col) += r(j0, j);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < dy; ++j)
                    h(idx_v(i, j), col) += s.u(i, j0) * s.v(i0, j);
        }
    // Direction dV = e_{i0} e_{j0}^T:
    //   D grad_U = dV R^T + outer(V[:,j0], U[i0,:])
    //   D grad_V = U U^T dV + lambda dV
    for (int j0 = 0; j0 < dy; ++j0)
        for (int i0 = 0; i0 < d; ++i0) {
            const int col = idx_v(i0, j0);
            for (int j = 0; j < dy; ++j)
                h(idx_u(i0, j), col) += r(j, j0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < dy; ++j)
                    h(idx_u(i, j), col) += s.v(i, j0) * s.u(i0, j);
            for (int i = 0; i < d; ++i)
                h(idx_v(i, j0), col) += uut(i, i0);
            h(col, col) += p.lambda;
        }
    return h;
}

double gd_jacobian_det(const MatrixProblem& p, double eta, const MatrixState& s) {
    const Mat h = matrix_hessian(p, s);
    Mat m = Mat::identity(h.rows);
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= eta * h.a[i];
    return lu_det(std::move(m));
}

double deep_loss(const std::vector<Mat>& factors, const Mat& y, double lambda) {
    if (factors.empty()) throw std::invalid_argument("deep_loss: empty chain");
    Mat prod = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) prod = prod * factors[k];
    const Mat e = prod - y;
    double reg = 0.0;
    for (const auto& w : factors) reg += w.frob_sq();
    return 0.5 * e.frob_sq() + 0.5 * lambda * reg;
}

std::vector<Mat> deep_gradient(const std::vector<Mat>& factors, const Mat& y, double lambda) {
    const std::size_t m = factors.size();
    if (m == 0) throw std::invalid_argument("deep_gradient: empty chain");

    // Prefix and suffix products around each factor.
    std::vector<Mat> prefix(m + 1), suffix(m + 1);
    prefix[0] = Mat::identity(factors.front().rows);
    for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * factors[k];
    suffix[m] = Mat::identity(factors.back().cols);
    for (std::size_t k = m; k-- > 0;) suffix[k] = factors[k] * suffix[k + 1];

    const Mat e = prefix[m] - y;
    if (e.rows != y.rows || e.cols != y.cols)
        throw std::invalid_argument("deep_gradient: chain/target shape mismatch");

    std::vector<Mat> grads(m);
    for (std::size_t k = 0; k < m; ++k) {
        Mat g = prefix[k].transposed() * e * suffix[k + 1].transposed();
        for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] += lambda * factors[k].a[i];
        grads[k] = std::move(g);
    }
    return grads;
}

std::vector<Mat> deep_gd_step(const std::vector<Mat>& factors, const Mat& y, double eta,
                              double lambda) {
    if (!(eta > 0.0)) throw std::invalid_argument("deep_gd_step: eta > 0 required");
    const auto grads = deep_gradient(factors, y, lambda);
    std::vector<Mat> out = factors;
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t i = 0; i < out[k].a.size(); ++i)
            out[k].a[i] = factors[k].a[i] - eta * grads[k].a[i];
    return out;
}

}  // namespace gdfractal

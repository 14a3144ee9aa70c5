#include "gdfractal/experiments.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <thread>

#include "gdfractal/rng.hpp"

namespace gdfractal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_rows(const GridSpec& spec, int n_threads,
                   const std::function<void(int, int)>& run_rows) {
    const int workers = std::min(resolve_thread_count(n_threads), spec.ny);
    if (workers <= 1) {
        run_rows(0, spec.ny);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (spec.ny + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const int lo = t * chunk, hi = std::min(spec.ny, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace

ScalarBasinResult scalar_basin(const ScalarProblem& p, const StepConfig& c, const GridSpec& spec,
                               int n_threads) {
    p.validate();
    if (p.d != 1) throw std::invalid_argument("scalar_basin: d = 1 required");
    spec.validate();

    ScalarBasinResult r;
    r.grid.spec = spec;
    const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
    r.grid.labels.assign(n, 0);
    r.final_u.assign(n, kNaN);
    r.final_v.assign(n, kNaN);
    r.iterations.assign(n, 0.0);
    r.squared_norm.assign(n, kNaN);

    parallel_rows(spec, n_threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * spec.nx + i;
                const ScalarState s0{Vec{spec.cell_x(i)}, Vec{spec.cell_y(j)}};
                const Outcome o = simulate(p, c, s0);
                r.iterations[k] = static_cast<double>(o.iterations);
                if (o.kind == OutcomeKind::ConvergedMinimizer) {
                    r.grid.labels[k] = 1;
                    r.final_u[k] = o.final_state.u[0];
                    r.final_v[k] = o.final_state.v[0];
                    r.squared_norm[k] = o.final_state.norm_sq_total();
                } else if (o.kind == OutcomeKind::ConvergedSaddle) {
                    r.grid.labels[k] = 2;
                    r.final_u[k] = o.final_state.u[0];
                    r.final_v[k] = o.final_state.v[0];
                    r.squared_norm[k] = o.final_state.norm_sq_total();
                }
            }
    });
    return r;
}

BasinGrid quotient_basin(double y, double lambda, double eta, const GridSpec& spec,
                         const QuotientBasinOptions& opt) {
    spec.validate();
    if (!(eta > 0.0)) throw std::invalid_argument("quotient_basin: eta > 0 required");
    const QuotientParams q{eta * y, eta * lambda};
    const double gmin = global_minimum(ScalarProblem{y, lambda, 1});

    BasinGrid g;
    g.spec = spec;
    g.labels.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 0);

    parallel_rows(spec, opt.n_threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const double uv = spec.cell_x(i);
                const double nsq = spec.cell_y(j);
                if (nsq < 2.0 * std::abs(uv)) continue;  // outside the state space
                QuotientState s{eta * (uv - y), eta * nsq};
                bool blown = false;
                for (long t = 0; t < opt.iters; ++t) {
                    s = F_step(q, s);
                    if (!std::isfinite(s.z) || !std::isfinite(s.w) || s.w > opt.blowup ||
                        std::abs(s.z) > opt.blowup) {
                        blown = true;
                        break;
                    }
                }
                if (blown) continue;
                const double zs = s.z / eta;
                const double loss = 0.5 * zs * zs + 0.5 * lambda * (s.w / eta);
                if (loss <= gmin + opt.loss_tol)
                    g.labels[static_cast<std::size_t>(j) * spec.nx + i] = 1;
            }
    });
    return g;
}

DimensionPipelineResult quotient_boundary_dimension(double y, double lambda, double eta,
                                                    const GridSpec& spec, const Vec& widths,
                                                    const QuotientBasinOptions& opt) {
    DimensionPipelineResult r;
    r.grid = quotient_basin(y, lambda, eta, spec, opt);
    r.boundary_mask = extract_boundary(r.grid, 1);
    r.boundary_pts = mask_points(spec, r.boundary_mask);
    if (r.boundary_pts.empty())
        throw std::runtime_error("quotient_boundary_dimension: empty boundary");
    r.fit = box_counting(r.boundary_pts, widths);
    return r;
}

std::vector<QuotientState> boundary_to_quotient_states(const DimensionPipelineResult& r, double y,
                                                       double eta, bool drop_window_frame) {
    const GridSpec& spec = r.grid.spec;
    std::vector<QuotientState> out;
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            if (!r.boundary_mask[static_cast<std::size_t>(j) * spec.nx + i]) continue;
            if (drop_window_frame && (i == 0 || j == 0 || i == spec.nx - 1 || j == spec.ny - 1))
                continue;
            out.push_back({eta * (spec.cell_x(i) - y), eta * spec.cell_y(j)});
        }
    return out;
}

std::vector<HistogramRow> near_boundary_histogram(const ScalarProblem& p, const StepConfig& c,
                                                  const GridSpec& spec, int n_threads) {
    p.validate();
    if (p.d != 1) throw std::invalid_argument("near_boundary_histogram: d = 1 required");
    spec.validate();
    std::vector<HistogramRow> rows(static_cast<std::size_t>(spec.nx) * spec.ny);
    parallel_rows(spec, n_threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * spec.nx + i;
                HistogramRow& row = rows[k];
                row.u0 = spec.cell_x(i);
                row.v0 = spec.cell_y(j);
                const ClassifiedOutcome o =
                    classify_outcome(p, c, ScalarState{Vec{row.u0}, Vec{row.v0}});
                row.converged = o.outcome.kind == OutcomeKind::ConvergedMinimizer ? 1 : 0;
                row.squared_norm = row.converged ? o.squared_norm : kNaN;
                row.imbalance = row.converged ? o.imbalance : kNaN;
                row.iterations = o.outcome.iterations;
            }
    });
    return rows;
}

SliceResult matrix_slice(const MatrixProblem& p, const StepConfig& c, const GridSpec& spec,
                         std::uint64_t seed, int n_threads) {
    p.validate();
    spec.validate();
    const int n_params = 2 * p.d * p.d_y;
    const Mat frame = random_orthonormal_columns(n_params, 2, seed);

    SliceResult r;
    r.grid.spec = spec;
    const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
    r.grid.labels.assign(n, 0);
    r.channel.assign(n, kNaN);
    r.coord.assign(n, kNaN);

    parallel_rows(spec, n_threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * spec.nx + i;
                const double a = spec.cell_x(i), b = spec.cell_y(j);
                MatrixState s{Mat(p.d, p.d_y), Mat(p.d, p.d_y)};
                const int block = p.d * p.d_y;
                for (int t = 0; t < n_params; ++t) {
                    const double val = a * frame(t, 0) + b * frame(t, 1);
                    if (t < block)
                        s.u.a[static_cast<std::size_t>(t % p.d) * p.d_y + t / p.d] = val;
                    else {
                        const int tt = t - block;
                        s.v.a[static_cast<std::size_t>(tt % p.d) * p.d_y + tt / p.d] = val;
                    }
                }
                const MatrixOutcome o = simulate_matrix(p, c, s);
                if (o.kind == OutcomeKind::ConvergedMinimizer) {
                    r.grid.labels[k] = 1;
                    r.channel[k] = o.final_state.u.frob_sq() + o.final_state.v.frob_sq();
                    r.coord[k] = o.final_state.u(0, 0);
                }
            }
    });
    return r;
}

namespace {

// Global minimum of the depth-L diagonal chain: per diagonal entry,
// min over t >= 0 of (t^L - sigma)^2/2 + (L lambda / 2) t^2, balanced factors.
double deep_entry_minimum(double sigma, int depth, double lambda) {
    const double s = std::abs(sigma);
    const double L = depth;
    auto value = [&](double t) {
        const double p = std::pow(t, L);
        return 0.5 * (p - s) * (p - s) + 0.5 * L * lambda * t * t;
    };
    // Coarse scan then ternary refinement; the objective is piecewise unimodal
    // on [0, s^(1/L) + 1].
    const double hi = std::pow(s, 1.0 / L) + 1.0;
    double best_t = 0.0, best_v = value(0.0);
    const int kScan = 2000;
    for (int i = 1; i <= kScan; ++i) {
        const double t = hi * i / kScan;
        const double v = value(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double lo_t = std::max(0.0, best_t - hi / kScan), hi_t = best_t + hi / kScan;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo_t + (hi_t - lo_t) / 3.0, m2 = hi_t - (hi_t - lo_t) / 3.0;
        if (value(m1) < value(m2))
            hi_t = m2;
        else
            lo_t = m1;
    }
    return value(0.5 * (lo_t + hi_t));
}

}  // namespace

SliceResult deep_slice(const Vec& y_diag, int depth, double lambda, const StepConfig& c,
                       const GridSpec& spec, std::uint64_t seed, int n_threads) {
    if (depth < 2) throw std::invalid_argument("deep_slice: depth >= 2 required");
    spec.validate();
    const int ny = static_cast<int>(y_diag.size());
    const Mat y = diag_matrix(y_diag);
    const int n_params = depth * ny * ny;
    const Mat frame = random_orthonormal_columns(n_params, 2, seed);

    double gmin = 0.0;
    for (double s : y_diag) gmin += deep_entry_minimum(s, depth, lambda);

    SliceResult r;
    r.grid.spec = spec;
    const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
    r.grid.labels.assign(n, 0);
    r.channel.assign(n, kNaN);
    r.coord.assign(n, kNaN);

    parallel_rows(spec, n_threads, [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * spec.nx + i;
                const double a = spec.cell_x(i), b = spec.cell_y(j);
                std::vector<Mat> factors(depth, Mat(ny, ny));
                for (int t = 0; t < n_params; ++t) {
                    const double val = a * frame(t, 0) + b * frame(t, 1);
                    factors[t / (ny * ny)].a[t % (ny * ny)] = val;
                }
                bool ok = false;
                double loss = 0.0;
                for (long step = 0; step <= c.max_iters; ++step) {
                    bool finite = true;
                    for (const auto& f : factors)
                        if (!f.finite()) finite = false;
                    if (!finite) break;
                    loss = deep_loss(factors, y, lambda);
                    if (!std::isfinite(loss) || loss >= c.divergence_threshold) break;
                    if (loss <= gmin + c.loss_tol) {
                        ok = true;
                        break;
                    }
                    if (step == c.max_iters) break;
                    factors = deep_gd_step(factors, y, c.eta, lambda);
                }
                if (ok) {
                    r.grid.labels[k] = 1;
                    double nsq = 0.0;
                    for (const auto& f : factors) nsq += f.frob_sq();
                    r.channel[k] = nsq;
                    r.coord[k] = factors[0](0, 0);
                }
            }
    });
    return r;
}

int count_components(const BasinGrid& grid, std::uint8_t label) {
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    std::vector<std::uint8_t> seen(grid.labels.size(), 0);
    int components = 0;
    for (int j0 = 0; j0 < ny; ++j0)
        for (int i0 = 0; i0 < nx; ++i0) {
            const std::size_t k0 = static_cast<std::size_t>(j0) * nx + i0;
            if (seen[k0] || grid.labels[k0] != label) continue;
            ++components;
            std::deque<std::pair<int, int>> queue{{i0, j0}};
            seen[k0] = 1;
            while (!queue.empty()) {
                const auto [i, j] = queue.front();
                queue.pop_front();
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int t = 0; t < 4; ++t) {
                    const int ii = i + di[t], jj = j + dj[t];
                    if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                    const std::size_t kk = static_cast<std::size_t>(jj) * nx + ii;
                    if (seen[kk] || grid.labels[kk] != label) continue;
                    seen[kk] = 1;
                    queue.emplace_back(ii, jj);
                }
            }
        }
    return components;
}

}  // namespace gdfractal

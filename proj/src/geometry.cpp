#include "gdfractal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "gdfractal/rng.hpp"

namespace gdfractal {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GDFRACTAL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

BasinGrid rasterize(const GridSpec& spec, const std::function<std::uint8_t(double, double)>& classify,
                    int n_threads) {
    spec.validate();
    BasinGrid g;
    g.spec = spec;
    g.labels.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 0);

    const int workers = std::min(resolve_thread_count(n_threads), spec.ny);
    auto run_rows = [&](int row_begin, int row_end) {
        for (int j = row_begin; j < row_end; ++j) {
            const double y = spec.cell_y(j);
            std::uint8_t* row = g.labels.data() + static_cast<std::size_t>(j) * spec.nx;
            for (int i = 0; i < spec.nx; ++i) row[i] = classify(spec.cell_x(i), y);
        }
    };
    if (workers <= 1) {
        run_rows(0, spec.ny);
        return g;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (spec.ny + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(spec.ny, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
    return g;
}

std::vector<std::uint8_t> extract_boundary(const BasinGrid& g, std::uint8_t target_label) {
    const int nx = g.spec.nx, ny = g.spec.ny;
    std::vector<std::uint8_t> mask(g.labels.size(), 0);
    auto is_target = [&](int ix, int iy) {
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;  // zero border
        return g.at(ix, iy) == target_label;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!is_target(i, j)) continue;
            const bool interior = is_target(i - 1, j) && is_target(i + 1, j) &&
                                  is_target(i, j - 1) && is_target(i, j + 1);
            if (!interior) mask[static_cast<std::size_t>(j) * nx + i] = 1;
        }
    return mask;
}

std::vector<Point2> mask_points(const GridSpec& spec, const std::vector<std::uint8_t>& mask) {
    std::vector<Point2> pts;
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i)
            if (mask[static_cast<std::size_t>(j) * spec.nx + i])
                pts.push_back({spec.cell_x(i), spec.cell_y(j)});
    return pts;
}

Vec default_box_widths() {
    Vec w;
    for (int k = 2; k <= 8; ++k) w.push_back(std::ldexp(1.0, -k));
    return w;
}

DimensionFit box_counting(const std::vector<Point2>& points, const Vec& widths,
                          double origin_offset) {
    if (points.empty()) throw std::invalid_argument("box_counting: no points");
    {
        Vec distinct = widths;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 2)
            throw std::invalid_argument("box_counting: >= 2 distinct widths required");
    }

    // Per-axis min-max normalization into [0,1]^2.
    double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    const double xr = xmax > xmin ? xmax - xmin : 1.0;
    const double yr = ymax > ymin ? ymax - ymin : 1.0;

    DimensionFit fit;
    Vec log_inv_eps, log_n;
    for (double eps : widths) {
        if (!(eps > 0.0)) throw std::invalid_argument("box_counting: widths must be positive");
        std::unordered_set<std::uint64_t> boxes;
        boxes.reserve(points.size());
        for (const auto& p : points) {
            const double x = (p[0] - xmin) / xr - origin_offset;
            const double y = (p[1] - ymin) / yr - origin_offset;
            const auto bx = static_cast<std::int64_t>(std::floor(x / eps));
            const auto by = static_cast<std::int64_t>(std::floor(y / eps));
            boxes.insert((static_cast<std::uint64_t>(bx + (1LL << 31)) << 32) |
                         static_cast<std::uint64_t>(by + (1LL << 31)));
        }
        fit.box_widths.push_back(eps);
        fit.counts.push_back(static_cast<long>(boxes.size()));
        log_inv_eps.push_back(std::log(1.0 / eps));
        log_n.push_back(std::log(static_cast<double>(boxes.size())));
    }

    bool all_equal = true;
    for (long c : fit.counts)
        if (c != fit.counts.front()) all_equal = false;
    if (all_equal) {  // degenerate regression
        fit.dimension = 0.0;
        fit.intercept = log_n.front();
        fit.r_squared = 0.0;
        return fit;
    }
    const LinearFit lf = linear_fit(log_inv_eps, log_n);
    fit.dimension = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    return fit;
}

namespace {

// Uniform bucket grid for nearest-neighbour queries over a point cloud.
class NeighborGrid {
   public:
    NeighborGrid(const std::vector<Point2>& pts, double cell) : cell_(cell), pts_(pts) {
        if (pts.empty()) throw std::invalid_argument("NeighborGrid: empty cloud");
        lo_x_ = hi_x_ = std::get<0>(cell_of(pts[0]));
        lo_y_ = hi_y_ = std::get<1>(cell_of(pts[0]));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto [cx, cy] = cell_of(pts[i]);
            lo_x_ = std::min(lo_x_, cx);
            hi_x_ = std::max(hi_x_, cx);
            lo_y_ = std::min(lo_y_, cy);
            hi_y_ = std::max(hi_y_, cy);
            buckets_[pack(cx, cy)].push_back(i);
        }
    }

    double nearest_dist(const Point2& p) const {
        const auto [cx, cy] = cell_of(p);
        const std::int64_t max_ring =
            std::max({hi_x_ - lo_x_, hi_y_ - lo_y_, std::abs(cx - lo_x_), std::abs(hi_x_ - cx),
                      std::abs(cy - lo_y_), std::abs(hi_y_ - cy)}) +
            2;
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
            // No point beyond this ring can beat the current best.
            if (best <= (static_cast<double>(ring) - 1.0) * cell_) break;
            for (std::int64_t dx = -ring; dx <= ring; ++dx)
                for (std::int64_t dy = -ring; dy <= ring; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                    auto it = buckets_.find(pack(cx + dx, cy + dy));
                    if (it == buckets_.end()) continue;
                    for (std::size_t i : it->second)
                        best = std::min(best, std::hypot(p[0] - pts_[i][0], p[1] - pts_[i][1]));
                }
        }
        return best;
    }

   private:
    std::pair<std::int64_t, std::int64_t> cell_of(const Point2& p) const {
        return {static_cast<std::int64_t>(std::floor(p[0] / cell_)),
                static_cast<std::int64_t>(std::floor(p[1] / cell_))};
    }
    static std::uint64_t pack(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x + (1LL << 31)) << 32) |
               static_cast<std::uint64_t>(y + (1LL << 31));
    }
    double cell_;
    const std::vector<Point2>& pts_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
    std::int64_t lo_x_ = 0, hi_x_ = 0, lo_y_ = 0, hi_y_ = 0;
};

}  // namespace

SelfSimilarityReport self_similarity_check(const QuotientParams& q,
                                           const std::vector<QuotientState>& boundary_pts,
                                           double interior_margin) {
    q.require_branch_domain();
    if (boundary_pts.empty())
        throw std::invalid_argument("self_similarity_check: empty boundary");

    SelfSimilarityReport rep;
    const double q_floor = 6.0 - 4.0 * q.nu;
    const double edge = 1.0 - q.nu;

    std::array<std::vector<Point2>, 3> images;
    std::vector<Point2> all_images;
    for (const auto& b : boundary_pts) {
        std::vector<QuotientState> pre;
        try {
            pre = preimage_all(q, b);
        } catch (const std::exception&) {
            ++rep.branch_errors;
            continue;
        }
        for (int bi = 0; bi < 3; ++bi) {
            const auto branch = static_cast<BranchId>(bi);
            if (branch == BranchId::G1) {
                double qv;
                try {
                    qv = Q_value(q, b);
                } catch (const std::domain_error&) {
                    ++rep.branch_errors;
                    continue;
                }
                if (qv < q_floor) {
                    ++rep.excluded_from_g1;
                    continue;
                }
            }
            try {
                const QuotientState img = branch_inverse(q, branch, b, pre);
                images[bi].push_back({img.z, img.w});
                all_images.push_back({img.z, img.w});
            } catch (const std::exception&) {
                ++rep.branch_errors;
            }
        }
    }
    for (int bi = 0; bi < 3; ++bi) rep.image_counts[bi] = images[bi].size();
    if (all_images.empty())
        throw std::runtime_error("self_similarity_check: no branch images produced");

    // Covering distance: every boundary point must be near some image.
    double span = 1.0;
    for (const auto& p : boundary_pts) span = std::max({span, std::abs(p.z), std::abs(p.w)});
    NeighborGrid grid(all_images, span / 256.0);
    for (const auto& b : boundary_pts)
        rep.cover_dist = std::max(rep.cover_dist, grid.nearest_dist({b.z, b.w}));

    // Disjointness margin between clouds, dropping samples within
    // interior_margin of the shared lines z = +-(1-nu).
    auto interior = [&](const Point2& p) {
        return std::abs(p[0] - edge) > interior_margin && std::abs(p[0] + edge) > interior_margin;
    };
    rep.disjointness_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        std::vector<Point2> cloud_i;
        for (const auto& p : images[i])
            if (interior(p)) cloud_i.push_back(p);
        if (cloud_i.empty()) continue;
        for (int j = i + 1; j < 3; ++j) {
            std::vector<Point2> cloud_j;
            for (const auto& p : images[j])
                if (interior(p)) cloud_j.push_back(p);
            if (cloud_j.empty()) continue;
            NeighborGrid gj(cloud_j, span / 256.0);
            for (const auto& p : cloud_i)
                rep.disjointness_margin = std::min(rep.disjointness_margin, gj.nearest_dist(p));
        }
    }
    if (!std::isfinite(rep.disjointness_margin)) rep.disjointness_margin = 0.0;
    return rep;
}

double cone_violation(double nu, double a, double b, int n_samples, double w_max,
                      std::uint64_t seed) {
    const QuotientParams q{0.0, nu};
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        // Log-uniform w keeps small-w samples represented, where the cone is widest.
        const double w = std::exp(rng.uniform(std::log(1e-3), std::log(w_max)));
        const double bound = a * std::exp(-b * w);
        const double z = rng.uniform(-1.0, 1.0) * bound;
        const QuotientState s{z, w};
        const QuotientState t = F_step(q, s);
        const double bound_next = a * std::exp(-b * t.w);
        // Violations: leaving the cone, or Q = 2w increasing.
        const double leave = (t.z == 0.0) ? -bound_next : std::abs(t.z) - bound_next;
        const double q_up = t.w - s.w;
        worst = std::max({worst, leave, q_up});
    }
    return worst;
}

ConeCertificate cone_certificate(double nu, int n_samples, double w_max, std::uint64_t seed) {
    if (!(nu >= 0.0 && nu < 1.0))
        throw std::invalid_argument("cone_certificate: 0 <= nu < 1 required");
    const double alpha = 1.0 - nu;
    // Sufficient conditions from the invariance proof: (alpha^2-1) b alpha^2 + alpha < 0
    // and a^2 + alpha^2 < 1.
    const double b_floor = alpha / ((1.0 - alpha * alpha) * alpha * alpha);
    const double a_ceil = std::sqrt(1.0 - alpha * alpha);

    for (double b = b_floor * 1.05; b <= b_floor * 1e4; b *= 2.0) {
        for (double a = a_ceil * 0.95; a >= a_ceil * 1e-6; a *= 0.5) {
            if (cone_violation(nu, a, b, n_samples, w_max, seed) <= 1e-12)
                return {a, b};
        }
    }
    throw std::runtime_error("cone_certificate: search exhausted");
}

double occupied_fraction(const GridSpec& spec, const std::vector<Point2>& points) {
    spec.validate();
    std::unordered_set<std::uint64_t> cells;
    for (const auto& p : points) {
        const int ix = static_cast<int>(std::floor((p[0] - spec.x_min) / spec.dx()));
        const int iy = static_cast<int>(std::floor((p[1] - spec.y_min) / spec.dy()));
        if (ix < 0 || iy < 0 || ix >= spec.nx || iy >= spec.ny) continue;
        cells.insert(static_cast<std::uint64_t>(iy) * spec.nx + ix);
    }
    return static_cast<double>(cells.size()) /
           (static_cast<double>(spec.nx) * static_cast<double>(spec.ny));
}

}  // namespace gdfractal

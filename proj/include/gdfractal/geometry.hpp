#pragma once

// Basin rasterization over 2-D slices, binary-erosion boundary extraction,
// box-counting dimension, branch-map self-similarity verification, and the
// exponential-cone convergence certificate for the y = 0 problem.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gdfractal/quotient.hpp"

namespace gdfractal {

struct GridSpec {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int nx = 1, ny = 1;

    void validate() const {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw std::invalid_argument("GridSpec: empty window");
        if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx, ny >= 1 required");
    }
    // Cell centers.
    double cell_x(int i) const { return x_min + (i + 0.5) * (x_max - x_min) / nx; }
    double cell_y(int j) const { return y_min + (j + 0.5) * (y_max - y_min) / ny; }
    double dx() const { return (x_max - x_min) / nx; }
    double dy() const { return (y_max - y_min) / ny; }
    double cell_diagonal() const { return std::hypot(dx(), dy()); }
};

struct BasinGrid {
    GridSpec spec;
    std::vector<std::uint8_t> labels;  // row-major, ny rows of nx; 0 = non-converged
    std::string meta;

    std::uint8_t at(int ix, int iy) const {
        return labels[static_cast<std::size_t>(iy) * spec.nx + ix];
    }
};

using Point2 = std::array<double, 2>;

// Evaluates classify at every cell center. Row-parallel; the output is
// independent of worker count. n_threads = 0 picks GDFRACTAL_THREADS or the
// hardware count.
BasinGrid rasterize(const GridSpec& spec, const std::function<std::uint8_t(double, double)>& classify,
                    int n_threads = 0);

int resolve_thread_count(int requested);

// Boundary = target-labeled cells minus their 4-neighbour erosion; out-of-grid
// neighbours count as background, matching binary erosion with zero border.
std::vector<std::uint8_t> extract_boundary(const BasinGrid& g, std::uint8_t target_label);

// Cell centers of the set cells of a mask over g's grid.
std::vector<Point2> mask_points(const GridSpec& spec, const std::vector<std::uint8_t>& mask);

struct DimensionFit {
    double dimension = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Vec box_widths;
    std::vector<long> counts;
};

Vec default_box_widths();  // 2^-2 ... 2^-8

// Normalizes the points per-axis to [0,1]^2, counts occupied origin-anchored
// boxes per width, and fits log N against log(1/eps). `origin_offset` shifts
// the box lattice after normalization (robustness checks only).
DimensionFit box_counting(const std::vector<Point2>& points, const Vec& widths,
                          double origin_offset = 0.0);

struct SelfSimilarityReport {
    double cover_dist = 0.0;           // max over boundary pts of dist to branch images
    double disjointness_margin = 0.0;  // min pairwise distance of interior image clouds
    std::array<std::size_t, 3> image_counts{0, 0, 0};
    std::size_t excluded_from_g1 = 0;  // points with Q < 6 - 4 nu
    std::size_t branch_errors = 0;
};

SelfSimilarityReport self_similarity_check(const QuotientParams& q,
                                           const std::vector<QuotientState>& boundary_pts,
                                           double interior_margin = 1e-6);

struct ConeCertificate {
    double a = 0.0;
    double b = 0.0;
};

// Checks that samples of {|z| < a exp(-b w)} map into the cone with
// non-increasing Q (mu = 0). Returns the worst violation (<= 0 means pass).
double cone_violation(double nu, double a, double b, int n_samples, double w_max,
                      std::uint64_t seed);

// First (a, b) on a log grid meeting the analytic sufficient conditions
// b (1-a^2...) -- see source -- and passing the sampled verification.
ConeCertificate cone_certificate(double nu, int n_samples = 10000, double w_max = 1e3,
                                 std::uint64_t seed = 7);

// Fraction of spec's cells containing at least one point.
double occupied_fraction(const GridSpec& spec, const std::vector<Point2>& points);

}  // namespace gdfractal

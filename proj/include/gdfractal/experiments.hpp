#pragma once

// Figure-scale experiment drivers shared by the command-line tool and the
// acceptance suite: basin rasters over parameter slices, the quotient
// convergence-region pipeline with boundary extraction and box counting,
// near-boundary histograms, and seeded random-slice sweeps.

#include <cstdint>

#include "gdfractal/criticality.hpp"
#include "gdfractal/io.hpp"
#include "gdfractal/matrixfac.hpp"

namespace gdfractal {

struct ScalarBasinResult {
    BasinGrid grid;       // 0 non-converged, 1 minimizer, 2 saddle
    Vec final_u, final_v; // limit coordinates (d = 1), NaN when non-converged
    Vec iterations;
    Vec squared_norm;
};

// Descent over a (u, v) window of the d = 1 problem.
ScalarBasinResult scalar_basin(const ScalarProblem& p, const StepConfig& c, const GridSpec& spec,
                               int n_threads = 0);

struct QuotientBasinOptions {
    long iters = 200;
    double loss_tol = 1e-5;   // slack over the global minimum after iteration
    double blowup = 1e12;     // early exit for diverging orbits
    int n_threads = 0;
};

// Convergence raster of the quotient map over an unshifted (u.v, |u|^2+|v|^2)
// window; cells outside the cone stay 0. Labels: 1 = converged.
BasinGrid quotient_basin(double y, double lambda, double eta, const GridSpec& spec,
                         const QuotientBasinOptions& opt = {});

struct DimensionPipelineResult {
    BasinGrid grid;
    std::vector<std::uint8_t> boundary_mask;
    std::vector<Point2> boundary_pts;  // unshifted coordinates
    DimensionFit fit;
};

// Full pipeline: quotient raster, erosion boundary, normalization, box counts.
DimensionPipelineResult quotient_boundary_dimension(double y, double lambda, double eta,
                                                    const GridSpec& spec, const Vec& widths,
                                                    const QuotientBasinOptions& opt = {});

// Shifted-and-scaled copies of raster boundary points (the coordinates the
// branch maps act in), optionally dropping cells on the window frame.
std::vector<QuotientState> boundary_to_quotient_states(const DimensionPipelineResult& r, double y,
                                                       double eta, bool drop_window_frame);

struct HistogramRow {
    double u0, v0;
    int converged;  // 1 converged to a minimizer
    double squared_norm;
    double imbalance;
    long iterations;
};

// Per-point diagnostics over a small window (d = 1).
std::vector<HistogramRow> near_boundary_histogram(const ScalarProblem& p, const StepConfig& c,
                                                  const GridSpec& spec, int n_threads = 0);

struct SliceResult {
    BasinGrid grid;   // 1 = converged
    Vec channel;      // squared norm of the limit (NaN when non-converged)
    Vec coord;        // first coordinate of the limit
};

// Seeded random orthonormal 2-frame through the origin of the matrix
// parameter space; grid coordinates are the frame coefficients.
SliceResult matrix_slice(const MatrixProblem& p, const StepConfig& c, const GridSpec& spec,
                         std::uint64_t seed, int n_threads = 0);

// Same for a depth-m chain of square factors (dims n x n, target diag).
SliceResult deep_slice(const Vec& y_diag, int depth, double lambda, const StepConfig& c,
                       const GridSpec& spec, std::uint64_t seed, int n_threads = 0);

// Connected components (4-neighbour) of a given label in a grid.
int count_components(const BasinGrid& grid, std::uint8_t label);

}  // namespace gdfractal

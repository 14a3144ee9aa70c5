#pragma once

// One-dimensional dynamics on the invariant convergence boundary: the cubic
// map z^3 - 3z on [-2,2], its conjugacies down to the slope-3 piecewise-linear
// map, exact periodic-orbit enumeration, and lap-count entropy.

#include <cstdint>
#include <vector>

#include "gdfractal/linalg.hpp"

namespace gdfractal {

struct BoundaryOrbit {
    int period = 1;
    Vec points;         // boundary coordinates in [-2, 2], orbit order
    bool prime = true;  // no proper divisor period reproduces the orbit
};

// z^3 - 3z; input restricted to [-2, 2] (small tolerance).
double cubic_map(double z);

// x in [-1,1]: 3x+2 on [-1,-1/3], -3x on (-1/3,1/3), 3x-2 on [1/3,1].
double pl_map(double x);

// Boundary coordinate from the piecewise-linear coordinate: z = 2 sin(pi x / 2).
double pl_to_boundary(double x);
// Inverse conjugacy: x = (2/pi) asin(z / 2).
double boundary_to_pl(double z);

// All fixed points of the n-fold piecewise-linear map, found exactly from the
// 3^n affine itinerary pieces (slope +-3^n each). n <= 12.
std::vector<double> periodic_points_pl(int n);

// All orbits of prime period n, points mapped to boundary coordinates.
std::vector<BoundaryOrbit> periodic_orbits(int n);

// (lap count of the n-fold map, log(laps)/n). The lap count is exactly 3^n.
std::pair<std::int64_t, double> lap_entropy(int n);

}  // namespace gdfractal

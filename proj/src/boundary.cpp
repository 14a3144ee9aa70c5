#include "gdfractal/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdfractal {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kMaxOrbitPeriod = 12;  // 3^12 itinerary pieces; configurable cap

struct Branch {
    double slope;
    double intercept;
    double lo;
    double hi;
};

constexpr Branch kBranches[3] = {
    {3.0, 2.0, -1.0, -1.0 / 3.0},
    {-3.0, 0.0, -1.0 / 3.0, 1.0 / 3.0},
    {3.0, -2.0, 1.0 / 3.0, 1.0},
};

bool in_branch(int b, double x, double tol) {
    return x >= kBranches[b].lo - tol && x <= kBranches[b].hi + tol;
}

// Fixed point of the affine composition along one itinerary, or NaN if the
// orbit leaves its own itinerary.
double itinerary_fixed_point(const std::vector<int>& itin) {
    double a = 1.0, c = 0.0;  // composition x -> a x + c
    for (int b : itin) {
        a = kBranches[b].slope * a;
        c = kBranches[b].slope * c + kBranches[b].intercept;
    }
    const double x = c / (1.0 - a);  // |a| = 3^n != 1
    // Validity: the orbit must visit the prescribed branch at every step.
    const double tol = 1e-12;
    double cur = x;
    for (int b : itin) {
        if (!in_branch(b, cur, tol)) return std::nan("");
        cur = kBranches[b].slope * cur + kBranches[b].intercept;
    }
    return x;
}

}  // namespace

double cubic_map(double z) {
    if (std::abs(z) > 2.0 + 1e-12) throw std::domain_error("cubic_map: |z| <= 2 required");
    return z * z * z - 3.0 * z;
}

double pl_map(double x) {
    if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error("pl_map: |x| <= 1 required");
    if (x <= -1.0 / 3.0) return 3.0 * x + 2.0;
    if (x < 1.0 / 3.0) return -3.0 * x;
    return 3.0 * x - 2.0;
}

double pl_to_boundary(double x) {
    if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error("pl_to_boundary: |x| <= 1 required");
    return 2.0 * std::sin(0.5 * kPi * x);
}

double boundary_to_pl(double z) {
    if (std::abs(z) > 2.0 + 1e-12) throw std::domain_error("boundary_to_pl: |z| <= 2 required");
    return (2.0 / kPi) * std::asin(std::clamp(z / 2.0, -1.0, 1.0));
}

std::vector<double> periodic_points_pl(int n) {
    if (n < 1 || n > kMaxOrbitPeriod)
        throw std::invalid_argument("periodic_points_pl: 1 <= n <= 12 required");
    std::vector<double> pts;
    std::vector<int> itin(n, 0);
    while (true) {
        const double x = itinerary_fixed_point(itin);
        if (std::isfinite(x)) pts.push_back(x);
        int k = n - 1;
        while (k >= 0 && itin[k] == 2) itin[k--] = 0;
        if (k < 0) break;
        ++itin[k];
    }
    std::sort(pts.begin(), pts.end());
    // Boundary-of-piece fixed points are found from two itineraries; keep one.
    std::vector<double> unique_pts;
    for (double x : pts)
        if (unique_pts.empty() || x - unique_pts.back() > 1e-12) unique_pts.push_back(x);
    return unique_pts;
}

std::vector<BoundaryOrbit> periodic_orbits(int n) {
    const std::vector<double> pts = periodic_points_pl(n);
    const double match_tol = 1e-9;

    // Snaps an iterate back to the exact point list (pts is sorted).
    auto find_index = [&](double x) -> std::ptrdiff_t {
        auto it = std::lower_bound(pts.begin(), pts.end(), x - match_tol);
        if (it != pts.end() && std::abs(*it - x) <= match_tol) return it - pts.begin();
        return -1;
    };

    std::vector<BoundaryOrbit> orbits;
    std::vector<bool> used(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (used[i]) continue;
        std::vector<double> orbit_x;
        double cur = pts[i];
        int period = 0;
        for (int step = 0; step < n; ++step) {
            orbit_x.push_back(cur);
            const std::ptrdiff_t idx = find_index(cur);
            if (idx >= 0) {
                used[idx] = true;
                cur = pts[idx];  // re-snap to the exact solve, no drift accumulation
            }
            cur = pl_map(cur);
            if (std::abs(cur - pts[i]) <= match_tol) {
                period = step + 1;
                break;
            }
        }
        if (period != n) continue;  // non-prime (or drift); its points are marked used
        BoundaryOrbit o;
        o.period = n;
        o.prime = true;
        for (double x : orbit_x) o.points.push_back(pl_to_boundary(x));
        orbits.push_back(std::move(o));
    }
    return orbits;
}

std::pair<std::int64_t, double> lap_entropy(int n) {
    if (n < 1 || n > kMaxOrbitPeriod)
        throw std::invalid_argument("lap_entropy: 1 <= n <= 12 required");
    std::int64_t laps = 1;
    for (int k = 0; k < n; ++k) laps *= 3;
    return {laps, std::log(static_cast<double>(laps)) / n};
}

}  // namespace gdfractal

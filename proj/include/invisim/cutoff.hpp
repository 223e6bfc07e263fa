#pragma once

#include "invisim/geometry.hpp"

namespace invisim {

// Width of the vanishing edge band is scale * k^(-delta); the smooth ramp occupies the
// next band of the same width.
struct CutoffProfile {
    double delta = 0.25;
    double scale = 0.02;

    double band(double k) const;
};

// Smooth step on [0,1]: 0 below, 1 above, all derivatives vanish at both ends.
double smooth_step(double x);
// Derivative of the given order (0..4).
double smooth_step_derivative(double x, int order);

// Ramp as a function of distance to an edge.
double eta_of_distance(double dist, double k, const CutoffProfile& profile = {});

// Cut-off on a convex face: product of the ramps for every edge. It is 0 within one band
// of the boundary, 1 beyond two bands, and C-infinity.
double eta(const Vec3& q, double k, const PolygonFace& face, const CutoffProfile& profile = {});

// One edge pair along a side of length len: f(x) = ramp(x) * ramp(len - x). Returns the
// value and its first two derivatives in x.
struct RampJet {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};
RampJet edge_pair(double x, double len, double band);

} // namespace invisim

#pragma once

#include "invisim/geometry.hpp"

#include <vector>

namespace invisim {

struct Impedance {
    cplx lambda{0.0, 0.0};

    Impedance() = default;
    Impedance(cplx l) : lambda(l) {
        if (lambda.imag() < 0.0)
            throw ConfigError("impedance must have a nonnegative imaginary part");
    }
    Impedance(double re, double im = 0.0) : Impedance(cplx(re, im)) {}
};

struct RaySegment {
    Vec3 origin;
    Vec3 direction;
    double length = 0.0;
};

struct RayPath {
    Vec3 start;
    std::vector<RaySegment> segments;
    std::vector<FaceLabel> hits; // face struck at each collision
    int collisions = 0;
    double action = 0.0;

    Vec3 exit_direction() const { return segments.back().direction; }
    // Path length in excess of the straight path between the same two z levels.
    double excess() const;
};

RayPath trace_ray(double x0, double y0, const Obstacle& obstacle, double edgeTol = 1e-12);

cplx face_reflection_coefficient(const Impedance& lambda, double nAlpha);

struct EikonalValue {
    cplx value{0.0, 0.0};
    CVec3 gradient = CVec3::Zero();
    int branchCount = 0;
    bool onCut = false;
};

// Closed form over the four reflecting faces.
EikonalValue eikonal_total_field(const Vec3& r, double k, const Impedance& lambda,
                                 const Obstacle& obstacle, double tol = -1.0);
EikonalValue eikonal_scattered_field(const Vec3& r, double k, const Impedance& lambda,
                                     const Obstacle& obstacle, double tol = -1.0);

// Same field summed branch by branch from explicitly traced rays through r.
EikonalValue eikonal_total_field_traced(const Vec3& r, double k, const Impedance& lambda,
                                        const Obstacle& obstacle);

} // namespace invisim

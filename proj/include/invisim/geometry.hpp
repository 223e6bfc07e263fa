#pragma once

#include "invisim/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace invisim {

enum class FaceLabel { UpperLeft, UpperRight, LowerLeft, LowerRight, Passive };

std::string to_string(FaceLabel label);

struct PolygonFace {
    std::vector<Vec3> vertices; // counterclockwise seen from the normal side
    Vec3 normal;                // outward unit normal
    FaceLabel label = FaceLabel::Passive;

    Vec3 centroid() const;
    double area() const;
    bool is_active() const { return label != FaceLabel::Passive; }

    // In-plane frame: e1, e2 span the plane, e1 x e2 = normal.
    Vec3 axis1() const;
    Vec3 axis2() const;
    // Signed distance of r to the face plane (positive on the normal side).
    double plane_distance(const Vec3& r) const;
    Vec3 project(const Vec3& r) const;
    // Distances from an in-plane point to each edge line (positive inside).
    std::vector<double> edge_distances(const Vec3& q) const;
    // Distance from an in-plane point to the polygon boundary, negative outside.
    double boundary_distance(const Vec3& q) const;
    bool contains(const Vec3& q, double tol = 0.0) const;
};

// Rectangle parametrization q = origin + s*es + t*et, s in [0, ls], t in [0, lt].
struct RectFrame {
    Vec3 origin, es, et, n;
    double ls = 0.0, lt = 0.0;
    Vec3 point(double s, double t) const { return origin + s * es + t * et; }
};

RectFrame rect_frame(const PolygonFace& face);

struct KeyPoints {
    // Section points at y = 0; upstream corners, reflection corners, bottom corners,
    // feet of the reflection corners on the top plane, apexes of the two triangles.
    Vec3 Ap, Bp, App, Bpp, A, B, G, H, C, Cp;
};

struct Obstacle {
    std::vector<PolygonFace> faces;
    double width = 1.0;
    double depth = 1.0;
    double notch = 0.0375;
    double delta = 0.0;     // extra path of doubly reflected rays
    double d = 0.0;         // shift carrying the first reflecting face onto the second
    double geomCross = 0.0; // projected area on the (x,y) plane
    double sourceOffset = 1.0;
    KeyPoints points;

    const PolygonFace& face(FaceLabel label) const;
    // Direction of the rays reaching an active face.
    Vec3 incoming(FaceLabel label) const;
    // Direction after reflection at the upper left face, and its mirror image.
    Vec3 reflected_left() const;
    Vec3 reflected_right() const;
    double top() const { return 0.0; }
    double bottom() const;
    // Center and radius of a ball holding every face.
    Vec3 center() const;
    double radius() const;
};

Obstacle build_obstacle(double width = 1.0, double depth = 1.0, double notch = 0.0375,
                        double sourceOffset = 1.0);

double phase_shift_delta(const Obstacle& obstacle);

Vec3 reflect_direction(const Vec3& alpha, const Vec3& n);

double travel_phase_t0(const Vec3& alpha, const PolygonFace& face);

enum class Zone { Shadow, Reflected, Outside, Boundary };

std::string to_string(Zone zone);

// Default tolerance band around zone boundaries, scaled by the obstacle width.
inline double default_zone_tol(double width = 1.0) { return 1e-9 * width; }

Zone classify_zone(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double tol);

// Finer breakdown used by the field code: membership with a tolerance band.
struct ZoneMembership {
    bool shadow = false;    // strictly inside the shadow tube
    bool reflected = false; // inside the reflected tube or on its boundary
    bool nearBoundary = false;
};

ZoneMembership zone_membership(const Vec3& r, const Vec3& alpha, const PolygonFace& face,
                               double tol);

// Euclidean distance from r to the boundary of the tube {q + t*dir : q in face, t >= 0}.
double tube_boundary_distance(const Vec3& r, const Vec3& dir, const PolygonFace& face);

// True if r lies in the closed obstacle (union of the two prisms).
bool inside_obstacle(const Obstacle& obstacle, const Vec3& r, double tol = 0.0);

std::string obstacle_to_json(const Obstacle& obstacle, int indent = 2);

} // namespace invisim

#include "invisim/geometry.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invisim {

namespace {

struct Pt2 {
    double x, z;
};

// Newell normal of a planar polygon, unnormalized (length = 2 * area).
Vec3 newell(const std::vector<Vec3>& v) {
    Vec3 acc = Vec3::Zero();
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec3& a = v[i];
        const Vec3& b = v[(i + 1) % v.size()];
        acc += a.cross(b);
    }
    return acc;
}

double point_segment_distance(const Vec3& r, const Vec3& a, const Vec3& b) {
    Vec3 u = b - a;
    double uu = u.squaredNorm();
    double t = uu > 0 ? std::clamp((r - a).dot(u) / uu, 0.0, 1.0) : 0.0;
    return (r - (a + t * u)).norm();
}

double point_ray_distance(const Vec3& r, const Vec3& a, const Vec3& v) {
    double t = std::max(0.0, (r - a).dot(v) / v.squaredNorm());
    return (r - (a + t * v)).norm();
}

// Distance from r to {a + tau*(b-a) + t*v : tau in [0,1], t >= 0}.
double point_halfstrip_distance(const Vec3& r, const Vec3& a, const Vec3& b, const Vec3& v) {
    Vec3 u = b - a;
    Vec3 w = r - a;
    double uu = u.dot(u), uv = u.dot(v), vv = v.dot(v);
    double wu = w.dot(u), wv = w.dot(v);
    double det = uu * vv - uv * uv;
    if (det > 1e-14 * uu * vv) {
        double tau = (wu * vv - wv * uv) / det;
        double t = (wv * uu - wu * uv) / det;
        if (tau >= 0.0 && tau <= 1.0 && t >= 0.0)
            return (w - tau * u - t * v).norm();
    }
    return std::min({point_segment_distance(r, a, b), point_ray_distance(r, a, v),
                     point_ray_distance(r, b, v)});
}

double point_polygon_distance(const Vec3& r, const PolygonFace& face) {
    double h = face.plane_distance(r);
    Vec3 q = r - h * face.normal;
    double bd = face.boundary_distance(q);
    if (bd >= 0.0)
        return std::abs(h);
    return std::sqrt(h * h + bd * bd);
}

PolygonFace make_face(std::vector<Vec3> verts, const Vec3& normal, FaceLabel label) {
    PolygonFace f;
    f.vertices = std::move(verts);
    f.normal = normal.normalized();
    f.label = label;
    return f;
}

// Extrude the (x,z) polygon (counterclockwise) along y in [0, depth].
void extrude(const std::vector<Pt2>& poly, const std::vector<FaceLabel>& labels, double depth,
             std::vector<PolygonFace>& out) {
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Pt2& p = poly[i];
        const Pt2& q = poly[(i + 1) % n];
        double dx = q.x - p.x, dz = q.z - p.z;
        Vec3 normal(dz, 0.0, -dx);
        out.push_back(make_face({Vec3(p.x, 0, p.z), Vec3(p.x, depth, p.z), Vec3(q.x, depth, q.z),
                                 Vec3(q.x, 0, q.z)},
                                normal, labels[i]));
    }
    std::vector<Vec3> front, back;
    for (size_t i = 0; i < n; ++i)
        front.emplace_back(poly[i].x, 0.0, poly[i].z);
    for (size_t i = n; i-- > 0;)
        back.emplace_back(poly[i].x, depth, poly[i].z);
    out.push_back(make_face(front, Vec3(0, -1, 0), FaceLabel::Passive));
    out.push_back(make_face(back, Vec3(0, 1, 0), FaceLabel::Passive));
}

bool inside_section(const std::vector<Pt2>& poly, double x, double z) {
    bool in = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Pt2& a = poly[i];
        const Pt2& b = poly[j];
        if ((a.z > z) != (b.z > z)) {
            double xc = a.x + (z - a.z) * (b.x - a.x) / (b.z - a.z);
            if (x < xc)
                in = !in;
        }
    }
    return in;
}

std::vector<Pt2> left_section(double w, double notch) {
    const double h = std::sqrt(3.0) / 2.0 * w;
    return {{-w / 2, 0.0}, {-w / 4, h / 2}, {-w / 2, h}, {-w / 2 + notch * w, h / 2}};
}

std::vector<Pt2> right_section(double w, double notch) {
    const double h = std::sqrt(3.0) / 2.0 * w;
    return {{w / 2, 0.0}, {w / 2 - notch * w, h / 2}, {w / 2, h}, {w / 4, h / 2}};
}

} // namespace

std::string to_string(FaceLabel label) {
    switch (label) {
    case FaceLabel::UpperLeft: return "dO1_l";
    case FaceLabel::UpperRight: return "dO1_r";
    case FaceLabel::LowerLeft: return "dO2_l";
    case FaceLabel::LowerRight: return "dO2_r";
    case FaceLabel::Passive: return "passive";
    }
    return "passive";
}

std::string to_string(Zone zone) {
    switch (zone) {
    case Zone::Shadow: return "shadow";
    case Zone::Reflected: return "reflected";
    case Zone::Outside: return "outside";
    case Zone::Boundary: return "boundary";
    }
    return "outside";
}

Vec3 PolygonFace::centroid() const {
    // Area-weighted centroid of a planar polygon via a fan from vertex 0.
    Vec3 acc = Vec3::Zero();
    double total = 0.0;
    for (size_t i = 1; i + 1 < vertices.size(); ++i) {
        Vec3 c = (vertices[0] + vertices[i] + vertices[i + 1]) / 3.0;
        double a = (vertices[i] - vertices[0]).cross(vertices[i + 1] - vertices[0]).dot(normal) / 2;
        acc += a * c;
        total += a;
    }
    return acc / total;
}

double PolygonFace::area() const { return newell(vertices).dot(normal) / 2.0; }

Vec3 PolygonFace::axis1() const { return (vertices[1] - vertices[0]).normalized(); }

Vec3 PolygonFace::axis2() const { return normal.cross(axis1()); }

double PolygonFace::plane_distance(const Vec3& r) const { return normal.dot(r - vertices[0]); }

Vec3 PolygonFace::project(const Vec3& r) const { return r - plane_distance(r) * normal; }

std::vector<double> PolygonFace::edge_distances(const Vec3& q) const {
    std::vector<double> out(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        const Vec3& a = vertices[i];
        const Vec3& b = vertices[(i + 1) % vertices.size()];
        Vec3 inward = normal.cross(b - a).normalized();
        out[i] = inward.dot(q - a);
    }
    return out;
}

double PolygonFace::boundary_distance(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vertices.size(); ++i)
        best = std::min(best, point_segment_distance(q, vertices[i], vertices[(i + 1) % vertices.size()]));
    return contains(q) ? best : -best;
}

bool PolygonFace::contains(const Vec3& q, double tol) const {
    Vec3 e1 = axis1(), e2 = axis2();
    const Vec3& o = vertices[0];
    double px = (q - o).dot(e1), py = (q - o).dot(e2);
    bool in = false;
    for (size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
        double ax = (vertices[i] - o).dot(e1), ay = (vertices[i] - o).dot(e2);
        double bx = (vertices[j] - o).dot(e1), by = (vertices[j] - o).dot(e2);
        if ((ay > py) != (by > py)) {
            double xc = ax + (py - ay) * (bx - ax) / (by - ay);
            if (px < xc)
                in = !in;
        }
    }
    if (in || tol <= 0.0)
        return in;
    for (size_t i = 0; i < vertices.size(); ++i)
        if (point_segment_distance(q, vertices[i], vertices[(i + 1) % vertices.size()]) <= tol)
            return true;
    return false;
}

RectFrame rect_frame(const PolygonFace& face) {
    if (face.vertices.size() != 4)
        throw Error("rect_frame: face is not a quadrilateral");
    RectFrame f;
    f.origin = face.vertices[0];
    Vec3 a = face.vertices[3] - face.vertices[0];
    Vec3 b = face.vertices[1] - face.vertices[0];
    f.ls = a.norm();
    f.lt = b.norm();
    f.es = a / f.ls;
    f.et = b / f.lt;
    f.n = face.normal;
    if (std::abs(f.es.dot(f.et)) > 1e-12 ||
        (face.vertices[2] - f.point(f.ls, f.lt)).norm() > 1e-12 * (f.ls + f.lt))
        throw Error("rect_frame: face is not a rectangle");
    return f;
}

const PolygonFace& Obstacle::face(FaceLabel label) const {
    for (const auto& f : faces)
        if (f.label == label)
            return f;
    throw Error("obstacle has no face " + to_string(label));
}

Vec3 Obstacle::reflected_left() const {
    return reflect_direction(incident_direction(), face(FaceLabel::UpperLeft).normal);
}

Vec3 Obstacle::reflected_right() const {
    return reflect_direction(incident_direction(), face(FaceLabel::UpperRight).normal);
}

Vec3 Obstacle::incoming(FaceLabel label) const {
    switch (label) {
    case FaceLabel::UpperLeft:
    case FaceLabel::UpperRight: return incident_direction();
    case FaceLabel::LowerRight: return reflected_left();
    case FaceLabel::LowerLeft: return reflected_right();
    default: throw Error("passive face has no incoming direction");
    }
}

double Obstacle::bottom() const { return std::sqrt(3.0) / 2.0 * width; }

Vec3 Obstacle::center() const { return Vec3(0.0, depth / 2.0, bottom() / 2.0); }

double Obstacle::radius() const {
    Vec3 c = center();
    double r = 0.0;
    for (const auto& f : faces)
        for (const auto& v : f.vertices)
            r = std::max(r, (v - c).norm());
    return r;
}

Obstacle build_obstacle(double width, double depth, double notch, double sourceOffset) {
    if (!(width > 0.0) || !(depth > 0.0))
        throw ConfigError("obstacle width and depth must be positive");
    if (!(notch >= 0.0) || !(notch < 0.125))
        throw ConfigError("notch must lie in [0, 1/8)");
    if (!(sourceOffset > 0.0))
        throw ConfigError("source offset must be positive");

    Obstacle ob;
    ob.width = width;
    ob.depth = depth;
    ob.notch = notch;
    ob.sourceOffset = sourceOffset;

    const double w = width;
    const double h = std::sqrt(3.0) / 2.0 * w;
    KeyPoints& p = ob.points;
    p.Ap = Vec3(-w / 2, 0, 0);
    p.Bp = Vec3(w / 2, 0, 0);
    p.A = Vec3(-w / 2, 0, h);
    p.B = Vec3(w / 2, 0, h);
    p.App = Vec3(-w / 4, 0, h / 2);
    p.Bpp = Vec3(w / 4, 0, h / 2);
    p.G = Vec3(-w / 4, 0, 0);
    p.H = Vec3(w / 4, 0, 0);
    p.C = Vec3(0, 0, 0);
    p.Cp = Vec3(0, 0, h);

    extrude(left_section(w, notch),
            {FaceLabel::UpperLeft, FaceLabel::LowerLeft, FaceLabel::Passive, FaceLabel::Passive},
            depth, ob.faces);
    extrude(right_section(w, notch),
            {FaceLabel::Passive, FaceLabel::Passive, FaceLabel::LowerRight, FaceLabel::UpperRight},
            depth, ob.faces);

    ob.delta = phase_shift_delta(ob);
    ob.d = (p.Bpp - p.Ap).norm();
    double leftSpan = (p.App.x() - p.Ap.x());
    double rightSpan = (p.Bp.x() - p.Bpp.x());
    ob.geomCross = (leftSpan + rightSpan) * depth;
    return ob;
}

double phase_shift_delta(const Obstacle& ob) {
    const KeyPoints& p = ob.points;
    return (p.App - p.G).norm() + (p.B - p.App).norm() - (p.A - p.Ap).norm();
}

Vec3 reflect_direction(const Vec3& alpha, const Vec3& n) { return alpha - 2.0 * alpha.dot(n) * n; }

double travel_phase_t0(const Vec3& alpha, const PolygonFace& face) {
    const double an = alpha.dot(face.normal);
    const double t0 = 2.0 * an * face.normal.dot(face.vertices[0]);
    double scale = 1.0;
    for (const auto& v : face.vertices)
        scale = std::max(scale, v.norm());
    for (const auto& v : face.vertices) {
        double tv = 2.0 * an * face.normal.dot(v);
        if (std::abs(tv - t0) > 1e-10 * scale)
            throw NonPlanarFace("travel_phase_t0: vertices are not coplanar");
    }
    return t0;
}

double tube_boundary_distance(const Vec3& r, const Vec3& dir, const PolygonFace& face) {
    double best = point_polygon_distance(r, face);
    const auto& v = face.vertices;
    for (size_t i = 0; i < v.size(); ++i)
        best = std::min(best, point_halfstrip_distance(r, v[i], v[(i + 1) % v.size()], dir));
    return best;
}

ZoneMembership zone_membership(const Vec3& r, const Vec3& alpha, const PolygonFace& face,
                               double tol) {
    ZoneMembership m;
    const Vec3& n = face.normal;
    const double an = alpha.dot(n);
    if (std::abs(an) < 1e-14)
        return m;
    const Vec3 refl = reflect_direction(alpha, n);
    const double h = face.plane_distance(r);

    const double dShadow = tube_boundary_distance(r, alpha, face);
    const double dRefl = tube_boundary_distance(r, refl, face);
    m.nearBoundary = std::min(dShadow, dRefl) <= tol;

    // The shadow tube lies on the side alpha points to, the reflected tube on the other.
    const double tS = h / an;
    if (tS > 0.0 && face.contains(r - tS * alpha) && dShadow > tol)
        m.shadow = true;
    const double tR = h / refl.dot(n);
    m.reflected = !m.shadow && ((tR > 0.0 && face.contains(r - tR * refl)) || dRefl <= tol);
    return m;
}

Zone classify_zone(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double tol) {
    ZoneMembership m = zone_membership(r, alpha, face, tol);
    if (m.nearBoundary)
        return Zone::Boundary;
    if (m.shadow)
        return Zone::Shadow;
    if (m.reflected)
        return Zone::Reflected;
    return Zone::Outside;
}

bool inside_obstacle(const Obstacle& ob, const Vec3& r, double tol) {
    if (r.y() < -tol || r.y() > ob.depth + tol)
        return false;
    if (inside_section(left_section(ob.width, ob.notch), r.x(), r.z()) ||
        inside_section(right_section(ob.width, ob.notch), r.x(), r.z()))
        return true;
    if (tol > 0.0)
        for (const auto& f : ob.faces)
            if (std::abs(f.plane_distance(r)) <= tol && f.contains(f.project(r), tol))
                return true;
    return false;
}

std::string obstacle_to_json(const Obstacle& ob, int indent) {
    using nlohmann::json;
    std::vector<Vec3> verts;
    auto index_of = [&](const Vec3& v) {
        for (size_t i = 0; i < verts.size(); ++i)
            if ((verts[i] - v).norm() < 1e-12)
                return static_cast<int>(i);
        verts.push_back(v);
        return static_cast<int>(verts.size() - 1);
    };
    json faces = json::array();
    for (const auto& f : ob.faces) {
        json idx = json::array();
        for (const auto& v : f.vertices)
            idx.push_back(index_of(v));
        faces.push_back({{"vertices", idx},
                         {"normal", {f.normal.x(), f.normal.y(), f.normal.z()}},
                         {"label", to_string(f.label)},
                         {"area", f.area()}});
    }
    json vlist = json::array();
    for (const auto& v : verts)
        vlist.push_back({v.x(), v.y(), v.z()});
    json j = {{"width", ob.width},       {"depth", ob.depth},  {"notch", ob.notch},
              {"delta", ob.delta},       {"d", ob.d},          {"geom_cross", ob.geomCross},
              {"source_offset", ob.sourceOffset},
              {"vertices", vlist},       {"faces", faces}};
    return j.dump(indent);
}

} // namespace invisim

#include "invisim/rays.hpp"

#include <cmath>
#include <limits>

namespace invisim {

namespace {

constexpr int maxBounces = 16;

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    const PolygonFace* face = nullptr;
    bool edge = false;
};

Hit next_hit(const Obstacle& ob, const Vec3& o, const Vec3& dir, double edgeTol) {
    Hit best;
    for (const auto& f : ob.faces) {
        double denom = f.normal.dot(dir);
        if (denom > -1e-15)
            continue;
        double t = f.normal.dot(f.vertices[0] - o) / denom;
        if (!(t > 1e-12 * ob.width))
            continue;
        Vec3 q = o + t * dir;
        double bd = f.boundary_distance(q);
        if (bd < -edgeTol)
            continue;
        bool edge = std::abs(bd) <= edgeTol;
        if (t < best.t - 1e-13 || (std::abs(t - best.t) <= 1e-13 && edge)) {
            best.t = t;
            best.face = &f;
            best.edge = edge;
        }
    }
    return best;
}

} // namespace

double RayPath::excess() const {
    const RaySegment& last = segments.back();
    Vec3 end = last.origin + last.length * last.direction;
    return action - (end.z() - start.z());
}

RayPath trace_ray(double x0, double y0, const Obstacle& ob, double edgeTol) {
    RayPath path;
    path.start = Vec3(x0, y0, -ob.sourceOffset);
    Vec3 o = path.start;
    Vec3 dir = incident_direction();
    for (int bounce = 0;; ++bounce) {
        if (bounce > maxBounces)
            throw Error("trace_ray: too many reflections");
        Hit h = next_hit(ob, o, dir, edgeTol * ob.width);
        if (!h.face) {
            double len = dir.z() > 0.0 ? (ob.bottom() + ob.sourceOffset - o.z()) / dir.z()
                                       : ob.sourceOffset;
            path.segments.push_back({o, dir, std::max(len, 0.0)});
            break;
        }
        if (h.edge)
            throw EdgeHit("trace_ray: ray meets an edge of face " + to_string(h.face->label));
        path.segments.push_back({o, dir, h.t});
        path.hits.push_back(h.face->label);
        o = o + h.t * dir;
        dir = reflect_direction(dir, h.face->normal).normalized();
    }
    path.collisions = static_cast<int>(path.hits.size());
    double total = 0.0;
    for (const auto& s : path.segments)
        total += s.length;
    path.action = total;
    return path;
}

cplx face_reflection_coefficient(const Impedance& lambda, double nAlpha) {
    cplx den = I * nAlpha - lambda.lambda;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(lambda.lambda)))
        throw PoleAtLambda("reflection coefficient has a pole at this impedance");
    return (I * nAlpha + lambda.lambda) / den;
}

EikonalValue eikonal_total_field(const Vec3& r, double k, const Impedance& lambda,
                                 const Obstacle& ob, double tol) {
    if (tol < 0.0)
        tol = default_zone_tol(ob.width);
    EikonalValue out;
    const Vec3 p0 = incident_direction();
    out.value = std::exp(I * k * p0.dot(r));
    out.gradient = (I * k * out.value) * p0.cast<cplx>();
    out.branchCount = 1;

    // First-bounce faces carry prefactor 1, second-bounce faces the factor picked up
    // on the way from their partner.
    struct Block {
        FaceLabel face;
        FaceLabel partner;
    };
    const Block blocks[] = {{FaceLabel::UpperLeft, FaceLabel::UpperLeft},
                            {FaceLabel::LowerRight, FaceLabel::UpperLeft},
                            {FaceLabel::UpperRight, FaceLabel::UpperRight},
                            {FaceLabel::LowerLeft, FaceLabel::UpperRight}};
    for (const auto& b : blocks) {
        const PolygonFace& f = ob.face(b.face);
        const Vec3 alpha = ob.incoming(b.face);
        cplx pref = 1.0;
        if (b.face != b.partner) {
            const PolygonFace& first = ob.face(b.partner);
            const Vec3 a0 = ob.incoming(b.partner);
            pref = face_reflection_coefficient(lambda, a0.dot(first.normal)) *
                   std::exp(I * k * travel_phase_t0(a0, first));
        }
        ZoneMembership m = zone_membership(r, alpha, f, tol);
        out.onCut = out.onCut || m.nearBoundary;
        if (m.shadow) {
            cplx v = pref * std::exp(I * k * alpha.dot(r));
            out.value -= v;
            out.gradient -= (I * k * v) * alpha.cast<cplx>();
            --out.branchCount;
        }
        if (m.reflected) {
            const Vec3 refl = reflect_direction(alpha, f.normal);
            cplx A = face_reflection_coefficient(lambda, alpha.dot(f.normal));
            cplx v = pref * A * std::exp(I * k * (refl.dot(r) + travel_phase_t0(alpha, f)));
            out.value += v;
            out.gradient += (I * k * v) * refl.cast<cplx>();
            ++out.branchCount;
        }
    }
    return out;
}

EikonalValue eikonal_scattered_field(const Vec3& r, double k, const Impedance& lambda,
                                     const Obstacle& ob, double tol) {
    EikonalValue out = eikonal_total_field(r, k, lambda, ob, tol);
    const Vec3 p0 = incident_direction();
    cplx inc = std::exp(I * k * p0.dot(r));
    out.value -= inc;
    out.gradient -= (I * k * inc) * p0.cast<cplx>();
    return out;
}

EikonalValue eikonal_total_field_traced(const Vec3& r, double k, const Impedance& lambda,
                                        const Obstacle& ob) {
    if (inside_obstacle(ob, r))
        throw Error("eikonal field requested inside the obstacle");
    EikonalValue out;
    std::vector<const PolygonFace*> active;
    for (const auto& f : ob.faces)
        if (f.is_active())
            active.push_back(&f);

    auto mirror = [](const Vec3& p, const PolygonFace& f) {
        return Vec3(p - 2.0 * f.plane_distance(p) * f.normal);
    };

    // Try one reflection sequence: unfold r, trace the incident ray, accept the branch if
    // the ray follows the sequence and then passes through r before striking anything else.
    auto try_branch = [&](const std::vector<const PolygonFace*>& seq) {
        Vec3 img = r;
        for (auto it = seq.rbegin(); it != seq.rend(); ++it)
            img = mirror(img, **it);
        RayPath path;
        try {
            path = trace_ray(img.x(), img.y(), ob, 1e-9);
        } catch (const EdgeHit&) {
            out.onCut = true;
            return;
        }
        if (path.collisions < static_cast<int>(seq.size()))
            return;
        for (size_t i = 0; i < seq.size(); ++i)
            if (path.hits[i] != seq[i]->label)
                return;
        const RaySegment& s = path.segments[seq.size()];
        const bool last = seq.size() == path.segments.size() - 1;
        double t = (r - s.origin).dot(s.direction);
        Vec3 off = r - s.origin - t * s.direction;
        if (off.norm() > 1e-9 * ob.width || t < -1e-9)
            return;
        if (!last && t > s.length + 1e-9)
            return;
        double action = t;
        for (size_t i = 0; i < seq.size(); ++i)
            action += path.segments[i].length;
        cplx amp = 1.0;
        Vec3 dir = incident_direction();
        for (const auto* f : seq) {
            amp *= face_reflection_coefficient(lambda, dir.dot(f->normal));
            dir = reflect_direction(dir, f->normal);
        }
        cplx v = amp * std::exp(I * k * (action - ob.sourceOffset));
        out.value += v;
        out.gradient += (I * k * v) * s.direction.cast<cplx>();
        ++out.branchCount;
    };

    try_branch({});
    for (const auto* f1 : active) {
        try_branch({f1});
        for (const auto* f2 : active)
            if (f2 != f1)
                try_branch({f1, f2});
    }
    return out;
}

} // namespace invisim

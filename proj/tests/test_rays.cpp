#include "doctest.h"

#include "invisim/potentials.hpp"
#include "invisim/rays.hpp"

#include <cmath>
#include <random>

using namespace invisim;

namespace {

const double s3 = std::sqrt(3.0);

cplx refl(cplx lambda) { return (I - 2.0 * lambda) / (I + 2.0 * lambda); }

} // namespace

TEST_SUITE("rays") {

TEST_CASE("impedance rejects negative imaginary part") {
    CHECK_THROWS_AS(Impedance(0.3, -0.1), ConfigError);
    CHECK_NOTHROW(Impedance(0.3, 0.0));
}

TEST_CASE("trace through the left pair") {
    Obstacle ob = build_obstacle();
    RayPath p = trace_ray(-0.375, 0.5, ob);
    CHECK(p.collisions == 2);
    CHECK((p.exit_direction() - incident_direction()).norm() < 1e-12);
    CHECK(std::abs(p.excess() - s3 / 4) < 1e-12);
    // First hit on A'A'' at z = sqrt3 (x0 + 1/2), then along the reflected direction.
    REQUIRE(p.segments.size() == 3);
    Vec3 hit = p.segments[1].origin;
    CHECK(std::abs(hit.z() - s3 * (-0.375 + 0.5)) < 1e-12);
    CHECK((p.segments[1].direction - Vec3(s3 / 2, 0, 0.5)).norm() < 1e-12);
    CHECK(p.hits[0] == FaceLabel::UpperLeft);
    CHECK(p.hits[1] == FaceLabel::LowerRight);
    double total = 0.0;
    for (const auto& s : p.segments)
        total += s.length;
    CHECK(std::abs(total - p.action) < 1e-12);
}

TEST_CASE("trace through the gap and the right pair") {
    Obstacle ob = build_obstacle();
    RayPath straight = trace_ray(0.0, 0.5, ob);
    CHECK(straight.collisions == 0);
    CHECK(std::abs(straight.excess()) < 1e-12);
    RayPath right = trace_ray(0.375, 0.5, ob);
    CHECK(right.collisions == 2);
    CHECK(std::abs(right.excess() - s3 / 4) < 1e-12);
    CHECK(right.hits[0] == FaceLabel::UpperRight);
    CHECK(right.hits[1] == FaceLabel::LowerLeft);
}

TEST_CASE("rays aimed at an edge are rejected") {
    Obstacle ob = build_obstacle();
    CHECK_THROWS_AS(trace_ray(-0.25, 0.5, ob), EdgeHit);
    CHECK_THROWS_AS(trace_ray(0.25, 0.5, ob), EdgeHit);
}

TEST_CASE("every traced ray leaves along the incident direction") {
    Obstacle ob = build_obstacle();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> xs(-0.7, 0.7), ys(-0.2, 1.2);
    int traced = 0;
    for (int i = 0; i < 2000; ++i) {
        try {
            RayPath p = trace_ray(xs(rng), ys(rng), ob);
            CHECK((p.collisions == 0 || p.collisions == 2));
            CHECK((p.exit_direction() - incident_direction()).norm() < 1e-12);
            ++traced;
        } catch (const EdgeHit&) {
        }
    }
    CHECK(traced > 1990);
}

TEST_CASE("reflection coefficient") {
    CHECK(std::abs(face_reflection_coefficient(Impedance(0.0), -0.5) - 1.0) < 1e-15);
    CHECK(std::abs(face_reflection_coefficient(Impedance(0.0, 1.0), -0.5) - (-1.0 / 3.0)) < 1e-15);
    for (cplx l : {cplx(0.3, 0.2), cplx(2.0, 0.0), cplx(0.0, 5.0)})
        CHECK(std::abs(face_reflection_coefficient(Impedance(l), -0.5) - refl(l)) < 1e-14);
    for (double l : {-3.0, -0.2, 0.5, 7.0})
        CHECK(std::abs(std::abs(face_reflection_coefficient(Impedance(l), -0.5)) - 1.0) < 1e-14);
    // Grazing incidence with lambda = 0 sits on the pole.
    CHECK_THROWS_AS(face_reflection_coefficient(Impedance(0.0), 0.0), PoleAtLambda);
}

TEST_CASE("eikonal field in the regions of the section") {
    Obstacle ob = build_obstacle();
    const double k = 37.0;
    const Impedance lam(0.3, 0.2);
    const cplx A = refl(lam.lambda);

    Vec3 above(0.1, 0.4, -0.5);
    EikonalValue v = eikonal_total_field(above, k, lam, ob);
    CHECK(std::abs(v.value - std::exp(I * k * above.z())) < 1e-12);
    CHECK(std::abs(eikonal_scattered_field(above, k, lam, ob).value) < 1e-12);

    Vec3 below(-0.4, 0.5, 1.5);
    v = eikonal_total_field(below, k, lam, ob);
    CHECK(std::abs(v.value - A * A * std::exp(I * k * (below.z() + s3 / 4))) < 1e-12);
    cplx scat = eikonal_scattered_field(below, k, lam, ob).value;
    CHECK(std::abs(scat - (A * A * std::exp(I * k * s3 / 4.0) - 1.0) * std::exp(I * k * below.z())) < 1e-12);

    // In front of the upper left face, inside its reflected tube only: incident plus one
    // reflected branch.
    Vec3 p0s(s3 / 2, 0, 0.5);
    Vec3 mid = ob.face(FaceLabel::UpperLeft).centroid() + 0.1 * p0s;
    v = eikonal_total_field(mid, k, lam, ob);
    CHECK(v.branchCount == 2);
    cplx reflected = v.value - std::exp(I * k * mid.z());
    CHECK(std::abs(reflected - A * std::exp(I * k * (p0s.dot(mid) + s3 / 4))) < 1e-12);

    // Further along, the beam from the upper right face crosses it.
    Vec3 cross = ob.face(FaceLabel::UpperLeft).centroid() + 0.3 * p0s;
    CHECK(eikonal_total_field(cross, k, lam, ob).branchCount == 3);
}

TEST_CASE("scattered eikonal field vanishes below the obstacle at resonance") {
    Obstacle ob = build_obstacle();
    for (int n = 1; n <= 4; ++n) {
        double k = 8.0 * pi * n / s3;
        for (double x : {-0.45, -0.3, 0.0, 0.2, 0.4})
            CHECK(std::abs(eikonal_scattered_field(Vec3(x, 0.5, 2.0), k, Impedance(0.0), ob).value) < 1e-11);
    }
}

TEST_CASE("eikonal field satisfies the impedance condition on the active faces") {
    Obstacle ob = build_obstacle();
    const double k = 50.0;
    const Impedance lam(0.3, 0.2);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (auto label : {FaceLabel::UpperLeft, FaceLabel::UpperRight, FaceLabel::LowerLeft, FaceLabel::LowerRight}) {
        const auto& f = ob.face(label);
        RectFrame fr = rect_frame(f);
        for (int i = 0; i < 20; ++i) {
            Vec3 q = fr.point(u(rng) * fr.ls, u(rng) * fr.lt);
            EikonalValue v = eikonal_total_field(q, k, lam, ob);
            cplx bc = dot(f.normal, v.gradient) + k * lam.lambda * v.value;
            CHECK(std::abs(bc) < 1e-10 * k);
        }
    }
}

TEST_CASE("closed form agrees with per-ray tracing at random probes") {
    Obstacle ob = build_obstacle();
    const double k = 61.0;
    const Impedance lam(0.4, 0.1);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> xs(-0.8, 0.8), ys(0.05, 0.95), zs(-0.6, 1.8);
    int compared = 0;
    while (compared < 1000) {
        Vec3 r(xs(rng), ys(rng), zs(rng));
        if (inside_obstacle(ob, r))
            continue;
        EikonalValue a = eikonal_total_field(r, k, lam, ob);
        if (a.onCut)
            continue;
        EikonalValue b = eikonal_total_field_traced(r, k, lam, ob);
        CHECK(std::abs(a.value - b.value) < 1e-10);
        CHECK(a.branchCount == b.branchCount);
        ++compared;
    }
}

} // TEST_SUITE

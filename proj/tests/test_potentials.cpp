#include "doctest.h"

#include "invisim/potentials.hpp"
#include "invisim/quadrature.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace invisim;

namespace {

struct Fixture {
    Obstacle ob = build_obstacle();
    const PolygonFace& face = ob.face(FaceLabel::UpperLeft);
    RectFrame fr = rect_frame(face);
    Vec3 alpha = incident_direction();
};

// Off-face probes more than two wavelengths from the face at k = 50.
std::vector<Vec3> off_face_probes(const Fixture& fx, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0), h(0.3, 0.8);
    std::vector<Vec3> out;
    for (int i = 0; i < count; ++i) {
        double side = i % 2 ? 1.0 : -1.0;
        out.push_back(fx.fr.point(u(rng) * fx.fr.ls, u(rng) * fx.fr.lt) + side * h(rng) * fx.face.normal);
    }
    return out;
}

} // namespace

TEST_SUITE("potentials") {

TEST_CASE("quadrature spec validation") {
    QuadratureSpec s;
    CHECK_NOTHROW(s.validate());
    s.pointsPerWavelength = 3.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.maxPanels = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK(QuadratureSpec{}.split_radius(50.0) == doctest::Approx(2.0 * wavelength(50.0)));
    CHECK(QuadratureSpec{}.refined().pointsPerWavelength == doctest::Approx(15.0));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
    for (int n : {2, 5, 16, 24}) {
        const Rule1D& g = gauss_legendre(n);
        double sumW = 0.0;
        for (double w : g.w)
            sumW += w;
        CHECK(sumW == doctest::Approx(2.0).epsilon(1e-14));
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (size_t i = 0; i < g.size(); ++i)
                s += g.w[i] * std::pow(g.x[i], p);
            double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
}

TEST_CASE("panel budget is enforced") {
    Fixture fx;
    QuadratureSpec s;
    s.maxPanels = 3;
    CHECK_THROWS_AS(single_layer_D(fx.face.centroid() + 0.5 * fx.face.normal, fx.alpha, fx.face, 50.0, s),
                    BudgetExceeded);
}

TEST_CASE("single layer converges under refinement and reports its change") {
    Fixture fx;
    QuadratureSpec s;
    s.estimateError = true;
    for (const Vec3& r : off_face_probes(fx, 6, 1)) {
        LayerEvaluation a = single_layer_D(r, fx.alpha, fx.face, 50.0, s);
        CHECK(a.estErr >= 0.0);
        CHECK(a.estErr <= 1e-6 * std::abs(a.value) + 1e-12);
    }
    // On-face traces.
    Vec3 q = fx.fr.point(0.25, 0.5);
    LayerEvaluation a = single_layer_D(q, fx.alpha, fx.face, 50.0, s);
    CHECK(a.estErr <= 1e-6 * std::abs(a.value));
}

TEST_CASE("single layer on the face approaches its leading term") {
    Fixture fx;
    // Relative distance to 2 pi / (ik n_alpha) exp(ik alpha.r) shrinks with k.
    double prev = 1e9;
    for (double k : {20.0, 50.0, 100.0}) {
        double worst = 0.0;
        for (double t : {0.3, 0.5, 0.7}) {
            Vec3 q = fx.fr.point(0.25, t);
            cplx d = single_layer_D(q, fx.alpha, fx.face, k).value;
            cplx o = layer_asymptotic_oracle(q, fx.alpha, fx.face, k, LayerKind::D);
            CHECK(std::abs(o) == doctest::Approx(4.0 * pi / k).epsilon(1e-12));
            worst = std::max(worst, std::abs(d - o) / std::abs(o));
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 0.5);
}

TEST_CASE("normal derivative jump on the face") {
    Fixture fx;
    const double k = 50.0;
    Vec3 q = fx.fr.point(0.25, 0.5);
    cplx exact = single_layer_dnD_on_face(q, fx.alpha, fx.face, k);
    CHECK(std::abs(exact + 2.0 * pi * std::exp(I * k * fx.alpha.dot(q))) < 1e-12);
    CHECK(std::abs(single_layer_dnD_on_face(fx.fr.point(0.001, 0.5), fx.alpha, fx.face, k)) == 0.0);

    // Richardson extrapolation of dD/dn from the normal side.
    const double lam = wavelength(k);
    auto dn = [&](double eps) {
        return dot(fx.face.normal, single_layer_D(q + eps * lam * fx.face.normal, fx.alpha, fx.face, k).gradient);
    };
    cplx a = dn(1e-2), b = dn(5e-3), c = dn(2.5e-3);
    cplx r1 = 2.0 * b - a, r2 = 2.0 * c - b;
    cplx extrap = (4.0 * r2 - r1) / 3.0;
    CHECK(std::abs(extrap - exact) <= 0.05 * std::abs(exact));
}

TEST_CASE("layers match direct kernel quadrature off the face") {
    Fixture fx;
    const double k = 50.0;
    for (const Vec3& r : off_face_probes(fx, 6, 4)) {
        oracle::DirectLayers ref = oracle::direct_layers(r, fx.alpha, fx.face, k);
        LayerEvaluation d = single_layer_D(r, fx.alpha, fx.face, k);
        cplx n = double_layer_N(r, fx.alpha, fx.face, k).value;
        CHECK(std::abs(d.value - ref.D) <= 1e-5 * std::abs(ref.D));
        CHECK(std::abs(n - ref.N) <= 1e-5 * std::abs(ref.N));
        // Flat face identity N = -dD/dn.
        CHECK(std::abs(ref.N + dot(fx.face.normal, d.gradient)) <= 1e-3 * std::abs(ref.N));
    }
    // Close to the face the polar rule takes over.
    Vec3 r = fx.fr.point(0.2, 0.4) + 0.05 * fx.face.normal;
    oracle::DirectLayers ref = oracle::direct_layers(r, fx.alpha, fx.face, k);
    CHECK(std::abs(single_layer_D(r, fx.alpha, fx.face, k).value - ref.D) <= 1e-5 * std::abs(ref.D));
    CHECK(std::abs(double_layer_N(r, fx.alpha, fx.face, k).value - ref.N) <= 1e-5 * std::abs(ref.N));
}

TEST_CASE("single layer solves the Helmholtz equation off the face") {
    Fixture fx;
    const double k = 50.0;
    const double h = 1e-3 * wavelength(k);
    for (const Vec3& r : off_face_probes(fx, 4, 9)) {
        cplx c = single_layer_D(r, fx.alpha, fx.face, k).value;
        cplx lap = -6.0 * c;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 e = Vec3::Zero();
            e[axis] = h;
            lap += single_layer_D(r + e, fx.alpha, fx.face, k).value + single_layer_D(r - e, fx.alpha, fx.face, k).value;
        }
        lap /= h * h;
        CHECK(std::abs(lap + k * k * c) <= 1e-3 * k * k * std::abs(c));
    }
}

TEST_CASE("double layer in the shadow and reflected zones") {
    Fixture fx;
    Vec3 refl = reflect_direction(fx.alpha, fx.face.normal);
    Vec3 shadow = fx.face.centroid() + 0.3 * fx.alpha;
    Vec3 reflected = fx.face.centroid() + 0.3 * refl;
    double prevS = 1e9, prevR = 1e9;
    for (double k : {20.0, 50.0}) {
        cplx ns = double_layer_N(shadow, fx.alpha, fx.face, k).value;
        CHECK(std::abs(layer_asymptotic_oracle(shadow, fx.alpha, fx.face, k, LayerKind::N) +
                       2.0 * pi * std::exp(I * k * fx.alpha.dot(shadow))) < 1e-12);
        double es = std::abs(ns - layer_asymptotic_oracle(shadow, fx.alpha, fx.face, k, LayerKind::N)) / (2 * pi);
        cplx nr = double_layer_N(reflected, fx.alpha, fx.face, k).value;
        cplx expect = 2.0 * pi * std::exp(I * k * (travel_phase_t0(fx.alpha, fx.face) + refl.dot(reflected)));
        CHECK(std::abs(layer_asymptotic_oracle(reflected, fx.alpha, fx.face, k, LayerKind::N) - expect) < 1e-12);
        double er = std::abs(nr - expect) / (2 * pi);
        CHECK(es < prevS);
        CHECK(er < prevR);
        prevS = es;
        prevR = er;
    }
    CHECK(prevS < 0.15);
    CHECK(prevR < 0.15);
}

TEST_CASE("asymptotic oracle on the face and outside") {
    Fixture fx;
    const double k = 80.0;
    const double nA = fx.alpha.dot(fx.face.normal);
    Vec3 q = fx.fr.point(0.25, 0.5);
    cplx inc = std::exp(I * k * fx.alpha.dot(q));
    CHECK(std::abs(layer_asymptotic_oracle(q, fx.alpha, fx.face, k, LayerKind::D) - 2.0 * pi / (I * k * nA) * inc) < 1e-14);
    CHECK(std::abs(layer_asymptotic_oracle(q, fx.alpha, fx.face, k, LayerKind::N) - 2.0 * pi * inc) < 1e-13);
    CHECK(std::abs(layer_asymptotic_oracle(q, fx.alpha, fx.face, k, LayerKind::dnN) + 2.0 * pi * I * k * nA * inc) < 1e-11);
    Vec3 outside = fx.face.centroid() - 0.3 * fx.alpha;
    CHECK(layer_asymptotic_oracle(outside, fx.alpha, fx.face, k, LayerKind::N) == cplx(0.0));
    Vec3 edge = 0.5 * (fx.face.vertices[0] + fx.face.vertices[1]) + 0.2 * fx.alpha;
    CHECK_THROWS_AS(layer_asymptotic_oracle(edge, fx.alpha, fx.face, k, LayerKind::D), ZoneAmbiguous);
    CHECK_THROWS_AS(layer_asymptotic_oracle(fx.face.vertices[0], fx.alpha, fx.face, k, LayerKind::D), ZoneAmbiguous);
}

TEST_CASE("outside both zones the potentials are small and shrink") {
    Fixture fx;
    Vec3 r = fx.face.centroid() - 0.4 * fx.alpha + Vec3(0.05, 0, 0);
    REQUIRE(classify_zone(r, fx.alpha, fx.face, 1e-9) == Zone::Outside);
    double d20 = std::abs(single_layer_D(r, fx.alpha, fx.face, 20.0).value);
    double d80 = std::abs(single_layer_D(r, fx.alpha, fx.face, 80.0).value);
    CHECK(d80 < d20);
    CHECK(d80 < 4.0 * pi / 80.0);
}

TEST_CASE("results do not depend on the worker count") {
    std::vector<double> a(1000), b(1000);
    auto fill = [](std::vector<double>& v, int threads) {
        parallel_for(v.size(), [&](size_t i) { v[i] = std::sin(0.1 * static_cast<double>(i)); }, threads);
    };
    fill(a, 1);
    fill(b, 4);
    CHECK(a == b);
}

} // TEST_SUITE

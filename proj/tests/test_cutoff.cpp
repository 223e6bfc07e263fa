#include "doctest.h"

#include "invisim/cutoff.hpp"
#include "invisim/quadrature.hpp"

#include <cmath>

using namespace invisim;

namespace {

// Band equal to k^(-1/4) exactly.
const CutoffProfile unitScale{0.25, 1.0};

PolygonFace square(double side) {
    PolygonFace f;
    f.vertices = {Vec3(0, 0, 0), Vec3(side, 0, 0), Vec3(side, side, 0), Vec3(0, side, 0)};
    f.normal = Vec3(0, 0, 1);
    f.label = FaceLabel::UpperLeft;
    return f;
}

} // namespace

TEST_SUITE("cutoff") {

TEST_CASE("smooth step endpoints and monotonicity") {
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(-3.0) == 0.0);
    CHECK(smooth_step(4.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        double x = i / 1000.0;
        double v = smooth_step(x);
        CHECK(v >= prev);
        CHECK(std::abs(v + smooth_step(1.0 - x) - 1.0) < 1e-15);
        prev = v;
    }
    for (int m = 1; m <= 4; ++m) {
        CHECK(smooth_step_derivative(0.0, m) == 0.0);
        CHECK(smooth_step_derivative(1.0, m) == 0.0);
        CHECK(std::abs(smooth_step_derivative(1e-3, m)) < 1e-100);
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    for (double x : {0.1, 0.3, 0.5, 0.77, 0.9}) {
        for (int m = 1; m <= 4; ++m) {
            const double h = 1e-3;
            auto f = [m](double y) { return smooth_step_derivative(y, m - 1); };
            double fd = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
            double exact = smooth_step_derivative(x, m);
            CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("ramp regions") {
    const double k = 16.0;
    const double b = std::pow(k, -0.25);
    CHECK(unitScale.band(k) == doctest::Approx(0.5).epsilon(1e-15));
    double mid = eta_of_distance(1.1 * b, k, unitScale);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    for (double kk : {1.0, 16.0, 256.0, 1e4}) {
        double bb = std::pow(kk, -0.25);
        CHECK(eta_of_distance(2.0 * bb, kk, unitScale) == 1.0);
        CHECK(eta_of_distance(3.0 * bb, kk, unitScale) == 1.0);
        CHECK(eta_of_distance(bb, kk, unitScale) == 0.0);
        CHECK(eta_of_distance(0.5 * bb, kk, unitScale) == 0.0);
    }
}

TEST_CASE("eta on a face is the product of edge ramps") {
    PolygonFace f = square(10.0);
    const double k = 16.0;
    CHECK(eta(Vec3(5, 5, 0), k, f, unitScale) == 1.0);
    CHECK(eta(Vec3(0.4, 5, 0), k, f, unitScale) == 0.0);
    Vec3 q(0.6, 0.7, 0);
    CHECK(eta(q, k, f, unitScale) ==
          doctest::Approx(eta_of_distance(0.6, k, unitScale) * eta_of_distance(0.7, k, unitScale)).epsilon(1e-14));
}

TEST_CASE("derivative growth is k^(m/4)") {
    // Derivatives across one edge, from finite differences of the ramp in the distance.
    for (int m = 1; m <= 4; ++m) {
        double ratio[2];
        int idx = 0;
        for (double k : {16.0, 256.0}) {
            const double b = unitScale.band(k);
            const double h = 1e-3 * b;
            auto f = [&](double dist) {
                return smooth_step_derivative(dist / b - 1.0, m - 1) / std::pow(b, m - 1);
            };
            double peak = 0.0;
            for (int i = 1; i < 500; ++i) {
                double dist = b * (1.0 + i / 500.0);
                double fd = (-f(dist + 2 * h) + 8 * f(dist + h) - 8 * f(dist - h) + f(dist - 2 * h)) / (12 * h);
                peak = std::max(peak, std::abs(fd));
            }
            ratio[idx++] = peak / std::pow(k, m / 4.0);
        }
        // The same constant C_m bounds both wavenumbers.
        CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(1e-4));
    }
}

TEST_CASE("mass defect shrinks like k^(-1/4)") {
    PolygonFace f = square(10.0);
    Rule1D r;
    for (int p = 0; p < 200; ++p)
        append_gauss(r, p * 0.05, (p + 1) * 0.05, 8);
    double prev = 0.0;
    for (double k : {16.0, 256.0, 4096.0}) {
        CompensatedSum s;
        for (size_t i = 0; i < r.size(); ++i)
            for (size_t j = 0; j < r.size(); ++j)
                s.add(r.w[i] * r.w[j] * (1.0 - eta(Vec3(r.x[i], r.x[j], 0), k, f, unitScale)));
        double defect = s.value();
        double b = unitScale.band(k);
        CHECK(defect <= 40.0 * 2.0 * b);
        CHECK(defect >= 40.0 * b * 0.9);
        if (prev > 0.0)
            CHECK(defect / prev == doctest::Approx(0.5).epsilon(0.05));
        prev = defect;
    }
}

TEST_CASE("edge pair jet") {
    const double len = 0.5, band = 0.06;
    for (double x : {0.07, 0.1, 0.2, 0.39, 0.43}) {
        RampJet j = edge_pair(x, len, band);
        const double h = 1e-5;
        RampJet a = edge_pair(x - h, len, band), c = edge_pair(x + h, len, band);
        CHECK(j.v == doctest::Approx(eta_of_distance(x, 1.0, {0.0, band}) * eta_of_distance(len - x, 1.0, {0.0, band})));
        CHECK(std::abs((c.v - a.v) / (2 * h) - j.d1) < 1e-4 * (1 + std::abs(j.d1)));
        CHECK(std::abs((c.d1 - a.d1) / (2 * h) - j.d2) < 1e-3 * (1 + std::abs(j.d2)));
    }
    CHECK(edge_pair(0.03, len, band).v == 0.0);
    CHECK(edge_pair(0.25, len, band).v == 1.0);
}

} // TEST_SUITE

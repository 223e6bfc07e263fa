#include "invisim/cutoff.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace invisim {

namespace {

// Truncated Taylor series in one variable, enough for derivatives up to order 4.
struct Jet {
    static constexpr int N = 5;
    std::array<double, N> c{};

    static Jet var(double x) {
        Jet j;
        j.c[0] = x;
        j.c[1] = 1.0;
        return j;
    }
    static Jet constant(double a) {
        Jet j;
        j.c[0] = a;
        return j;
    }
    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i < N; ++i)
            r.c[i] = a.c[i] + b.c[i];
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i < N; ++i)
            r.c[i] = a.c[i] - b.c[i];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; i + j < N; ++j)
                r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
    friend Jet inv(const Jet& a) {
        Jet r;
        r.c[0] = 1.0 / a.c[0];
        for (int n = 1; n < N; ++n) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j)
                s += a.c[j] * r.c[n - j];
            r.c[n] = -s / a.c[0];
        }
        return r;
    }
    friend Jet exp(const Jet& a) {
        // r' = a' r, coefficient recursion.
        Jet r;
        r.c[0] = std::exp(a.c[0]);
        for (int n = 1; n < N; ++n) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j)
                s += j * a.c[j] * r.c[n - j];
            r.c[n] = s / n;
        }
        return r;
    }
};

} // namespace

double CutoffProfile::band(double k) const { return scale * std::pow(k, -delta); }

double smooth_step(double x) {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    // f(x)/(f(x)+f(1-x)) with f(x) = exp(-1/x), written as a logistic of u.
    double u = 1.0 / x - 1.0 / (1.0 - x);
    if (u > 0.0) {
        double e = std::exp(-u);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(u));
}

double smooth_step_derivative(double x, int order) {
    if (order == 0)
        return smooth_step(x);
    if (x <= 0.0 || x >= 1.0)
        return 0.0;
    // Logistic of -u; for large |u| the tails underflow cleanly.
    Jet X = Jet::var(x);
    Jet u = inv(X) - inv(Jet::constant(1.0) - X);
    Jet out;
    if (u.c[0] > 0.0) {
        Jet e = exp(Jet::constant(0.0) - u);
        out = e * inv(Jet::constant(1.0) + e);
    } else {
        out = inv(Jet::constant(1.0) + exp(u));
    }
    double fact = 1.0;
    for (int i = 2; i <= order; ++i)
        fact *= i;
    return out.c[order] * fact;
}

double eta_of_distance(double dist, double k, const CutoffProfile& profile) {
    double b = profile.band(k);
    return smooth_step(dist / b - 1.0);
}

double eta(const Vec3& q, double k, const PolygonFace& face, const CutoffProfile& profile) {
    const double b = profile.band(k);
    double v = 1.0;
    for (double de : face.edge_distances(q)) {
        v *= smooth_step(de / b - 1.0);
        if (v == 0.0)
            break;
    }
    return v;
}

RampJet edge_pair(double x, double len, double band) {
    auto ramp = [](double s, double& d1, double& d2) {
        if (s <= 0.0) {
            d1 = d2 = 0.0;
            return 0.0;
        }
        if (s >= 1.0) {
            d1 = d2 = 0.0;
            return 1.0;
        }
        double u = 1.0 / s - 1.0 / (1.0 - s);
        double p = u > 0.0 ? std::exp(-u) / (1.0 + std::exp(-u)) : 1.0 / (1.0 + std::exp(u));
        double w = 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));  // -u'
        double wp = -2.0 / (s * s * s) + 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
        double q = p * (1.0 - p);
        d1 = q * w;
        d2 = q * (1.0 - 2.0 * p) * w * w + q * wp;
        return p;
    };
    double a1, a2, b1, b2;
    double a = ramp(x / band - 1.0, a1, a2);
    double b = ramp((len - x) / band - 1.0, b1, b2);
    a1 /= band;
    a2 /= band * band;
    b1 /= -band;
    b2 /= band * band;
    RampJet j;
    j.v = a * b;
    j.d1 = a1 * b + a * b1;
    j.d2 = a2 * b + 2.0 * a1 * b1 + a * b2;
    return j;
}

} // namespace invisim

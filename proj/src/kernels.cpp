#include "kernels.hpp"

#include <cmath>

namespace invisim::kernels {

void full(const double* x, const double* y, const double* z, const double* wr, const double* wi,
          std::size_t n, const double r[3], double k, const double nrm[3], bool withHess,
          FullSums& out) {
    alignas(64) double dx[chunk], dy[chunk], dz[chunk], ir[chunk], cs[chunk], sn[chunk];
    const double rx = r[0], ry = r[1], rz = r[2];
    for (std::size_t i = 0; i < n; ++i) {
        dx[i] = rx - x[i];
        dy[i] = ry - y[i];
        dz[i] = rz - z[i];
        double R = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i] + dz[i] * dz[i]);
        ir[i] = 1.0 / R;
        cs[i] = k * R;
    }
    for (std::size_t i = 0; i < n; ++i)
        sn[i] = std::sin(cs[i]);
    for (std::size_t i = 0; i < n; ++i)
        cs[i] = std::cos(cs[i]);

    double vr = 0, vi = 0;
    double gxr = 0, gxi = 0, gyr = 0, gyi = 0, gzr = 0, gzi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // T = c * exp(ikR) / R
        double tr = (wr[i] * cs[i] - wi[i] * sn[i]) * ir[i];
        double ti = (wr[i] * sn[i] + wi[i] * cs[i]) * ir[i];
        vr += tr;
        vi += ti;
        // grad G = G (ik - 1/R) d / R
        double ar = -ir[i] * ir[i], ai = k * ir[i];
        double pr = tr * ar - ti * ai, pi = tr * ai + ti * ar;
        gxr += pr * dx[i];
        gxi += pi * dx[i];
        gyr += pr * dy[i];
        gyi += pi * dy[i];
        gzr += pr * dz[i];
        gzi += pi * dz[i];
    }
    out.v[0] = vr;
    out.v[1] = vi;
    out.g[0][0] = gxr;
    out.g[0][1] = gxi;
    out.g[1][0] = gyr;
    out.g[1][1] = gyi;
    out.g[2][0] = gzr;
    out.g[2][1] = gzi;
    if (!withHess) {
        for (int c = 0; c < 3; ++c)
            out.hn[c][0] = out.hn[c][1] = 0.0;
        return;
    }
    const double nx = nrm[0], ny = nrm[1], nz = nrm[2];
    double hxr = 0, hxi = 0, hyr = 0, hyi = 0, hzr = 0, hzi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double tr = (wr[i] * cs[i] - wi[i] * sn[i]) * ir[i];
        double ti = (wr[i] * sn[i] + wi[i] * cs[i]) * ir[i];
        double inv = ir[i];
        double ux = dx[i] * inv, uy = dy[i] * inv, uz = dz[i] * inv;
        double un = ux * nx + uy * ny + uz * nz;
        // Hn = G [ ((ik-1/R)^2 + 1/R^2) u (u.n) + (ik-1/R)/R (n - u (u.n)) ]
        double a2r = 2.0 * inv * inv - k * k, a2i = -2.0 * k * inv;
        double a1r = -inv * inv, a1i = k * inv;
        double ex = ux * un, ey = uy * un, ez = uz * un;
        double fx = nx - ex, fy = ny - ey, fz = nz - ez;
        double qxr = a2r * ex + a1r * fx, qxi = a2i * ex + a1i * fx;
        double qyr = a2r * ey + a1r * fy, qyi = a2i * ey + a1i * fy;
        double qzr = a2r * ez + a1r * fz, qzi = a2i * ez + a1i * fz;
        hxr += tr * qxr - ti * qxi;
        hxi += tr * qxi + ti * qxr;
        hyr += tr * qyr - ti * qyi;
        hyi += tr * qyi + ti * qyr;
        hzr += tr * qzr - ti * qzi;
        hzi += tr * qzi + ti * qzr;
    }
    out.hn[0][0] = hxr;
    out.hn[0][1] = hxi;
    out.hn[1][0] = hyr;
    out.hn[1][1] = hyi;
    out.hn[2][0] = hzr;
    out.hn[2][1] = hzi;
}

void multi(const double* x, const double* y, const double* z, const double* wr, const double* wi,
           std::size_t stride, int m, std::size_t n, const double r[3], double k, double* outRe,
           double* outIm) {
    alignas(64) double gr[chunk], gi[chunk], kr[chunk], ir[chunk];
    for (std::size_t i = 0; i < n; ++i) {
        double dx = r[0] - x[i], dy = r[1] - y[i], dz = r[2] - z[i];
        double R = std::sqrt(dx * dx + dy * dy + dz * dz);
        ir[i] = 1.0 / R;
        kr[i] = k * R;
    }
    for (std::size_t i = 0; i < n; ++i)
        gr[i] = std::cos(kr[i]) * ir[i];
    for (std::size_t i = 0; i < n; ++i)
        gi[i] = std::sin(kr[i]) * ir[i];
    for (int l = 0; l < m; ++l) {
        const double* a = wr + l * stride;
        const double* b = wi + l * stride;
        double sr = 0, si = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sr += a[i] * gr[i] - b[i] * gi[i];
            si += a[i] * gi[i] + b[i] * gr[i];
        }
        outRe[l] = sr;
        outIm[l] = si;
    }
}

void phase_weights(const double* x, const double* y, const double* z, const double* w, std::size_t n,
                   const double a[3], double k, double* outRe, double* outIm) {
    for (std::size_t i = 0; i < n; ++i) {
        double ph = k * (a[0] * x[i] + a[1] * y[i] + a[2] * z[i]);
        outRe[i] = w[i] * std::cos(ph);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double ph = k * (a[0] * x[i] + a[1] * y[i] + a[2] * z[i]);
        outIm[i] = w[i] * std::sin(ph);
    }
}

} // namespace invisim::kernels

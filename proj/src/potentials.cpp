#include "invisim/potentials.hpp"

#include "invisim/quadrature.hpp"
#include "kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace invisim {

namespace {

// Support of the cut-off in face coordinates and the lines where its ramps start or end.
struct Support {
    double s0, s1, t0, t1, b;
    std::array<double, 4> sLines() const { return {s0, s0 + b, s1 - b, s1}; }
    std::array<double, 4> tLines() const { return {t0, t0 + b, t1 - b, t1}; }
    bool inside(double s, double t) const { return s > s0 && s < s1 && t > t0 && t < t1; }
};

struct PolarParams {
    Support sup;
    double alphaS, alphaT; // tangential components of the incoming direction
    double k, ppw;
    int pn;
};

thread_local Rule1D tlInner;
thread_local std::vector<double> tlBreaks;

// Polar rule about the in-plane point (sp, tp) at height h above the plane. The support
// rectangle is split into the four signed triangles (p, corner, next corner); each one is
// swept by rays from p, parametrized by the position x along the edge through
// x = |h_e| sinh(tau) so that near-degenerate triangles stay smooth. Along each ray the
// radial rule breaks at the ramp lines and is graded geometrically near p when h != 0.
// Calls emit(s, t, weight) for every node; returns the number of panels used.
template <class Emit>
long polar_rule(const PolarParams& P, double sp, double tp, double h, Emit&& emit) {
    const Support& S = P.sup;
    const double corners[4][2] = {{S.s0, S.t0}, {S.s1, S.t0}, {S.s1, S.t1}, {S.s0, S.t1}};
    const auto sl = S.sLines();
    const auto tl = S.tLines();
    const double scale = (S.s1 - S.s0) + (S.t1 - S.t0);
    const double ah = std::abs(h);
    const Rule1D& g = gauss_legendre(P.pn);
    long panels = 0;

    for (int e = 0; e < 4; ++e) {
        const double ax = corners[e][0], ay = corners[e][1];
        const double cx = corners[(e + 1) % 4][0], cy = corners[(e + 1) % 4][1];
        const double len = std::hypot(cx - ax, cy - ay);
        const double ux = (cx - ax) / len, uy = (cy - ay) / len;
        const double nx = -uy, ny = ux; // inward for counterclockwise corners
        const double he = nx * (sp - ax) + ny * (tp - ay);
        if (std::abs(he) < 1e-13 * scale)
            continue;
        const double sign = he > 0 ? 1.0 : -1.0;
        const double ae = std::abs(he);
        const double fx = sp - he * nx, fy = tp - he * ny;
        const double xa = (ax - fx) * ux + (ay - fy) * uy;
        const double xb = (cx - fx) * ux + (cy - fy) * uy;

        std::vector<double>& xs = tlBreaks;
        xs.clear();
        xs.push_back(xa);
        xs.push_back(xb);
        // Rays through the crossings of the ramp lines change the radial breakpoints.
        for (double qs : sl)
            for (double qt : tl) {
                double dx = qs - sp, dy = qt - tp;
                double den = nx * dx + ny * dy;
                if (den * he >= 0.0)
                    continue;
                double lam = -he / den;
                double X = (sp + lam * dx - fx) * ux + (tp + lam * dy - fy) * uy;
                if (X > xa && X < xb)
                    xs.push_back(X);
            }
        std::sort(xs.begin(), xs.end());

        const double rateX = P.k * (std::abs(P.alphaS * ux + P.alphaT * uy) + 1.0);
        const double dxMax = P.pn * 2.0 * pi / (rateX * P.ppw);

        for (size_t seg = 0; seg + 1 < xs.size(); ++seg) {
            const double tauA = std::asinh(xs[seg] / ae);
            const double tauB = std::asinh(xs[seg + 1] / ae);
            if (!(tauB - tauA > 1e-14))
                continue;
            double tau = tauA;
            while (tau < tauB) {
                double probe = std::min(tau + 0.5, tauB);
                double m = std::max(std::abs(tau), std::abs(probe));
                double dt = std::min(0.5, dxMax / (ae * std::cosh(m)));
                double tauN = std::min(tauB, tau + dt);
                if (tauB - tauN < 1e-3 * dt)
                    tauN = tauB;
                ++panels;
                const double hc = 0.5 * (tauN - tau), cc = 0.5 * (tauN + tau);
                for (size_t j = 0; j < g.size(); ++j) {
                    const double tj = cc + hc * g.x[j];
                    const double wj = hc * g.w[j];
                    const double x = ae * std::sinh(tj);
                    const double dxdt = ae * std::cosh(tj);
                    const double vx = fx + x * ux - sp, vy = fy + x * uy - tp;
                    const double re = std::hypot(vx, vy);
                    const double us = vx / re, ut = vy / re;
                    const double wphi = sign * wj * dxdt * ae / (re * re);

                    // Radial breakpoints.
                    std::array<double, 64> br;
                    int nb = 0;
                    br[nb++] = 0.0;
                    br[nb++] = re;
                    if (std::abs(us) > 1e-15)
                        for (double c : sl) {
                            double rho = (c - sp) / us;
                            if (rho > 0.0 && rho < re)
                                br[nb++] = rho;
                        }
                    if (std::abs(ut) > 1e-15)
                        for (double c : tl) {
                            double rho = (c - tp) / ut;
                            if (rho > 0.0 && rho < re)
                                br[nb++] = rho;
                        }
                    const double rateR = P.k * (1.0 + std::abs(P.alphaS * us + P.alphaT * ut));
                    if (ah > 0.0) {
                        const double lph = P.pn * 2.0 * pi / (rateR * P.ppw);
                        for (double gr = ah; gr < std::min(re, lph) && nb < 60; gr *= 2.0)
                            br[nb++] = gr;
                    }
                    std::sort(br.begin(), br.begin() + nb);
                    Rule1D& inner = tlInner;
                    inner.x.clear();
                    inner.w.clear();
                    for (int i = 0; i + 1 < nb; ++i) {
                        double a = br[i], b = br[i + 1];
                        if (!(b - a > 1e-15 * re))
                            continue;
                        double mid = 0.5 * (a + b);
                        if (!S.inside(sp + mid * us, tp + mid * ut))
                            continue;
                        panels += oscillatory_panels(a, b, rateR, P.ppw, P.pn);
                        append_oscillatory(inner, a, b, rateR, P.ppw, P.pn);
                    }
                    for (size_t i = 0; i < inner.size(); ++i) {
                        const double rho = inner.x[i];
                        emit(sp + rho * us, tp + rho * ut, wphi * rho * inner.w[i]);
                    }
                }
                tau = tauN;
            }
        }
    }
    return panels;
}

void check_budget(long panels, const QuadratureSpec& spec, const char* what) {
    if (panels > spec.maxPanels)
        throw BudgetExceeded(std::string(what) + ": " + std::to_string(panels) +
                             " panels exceed the budget of " + std::to_string(spec.maxPanels));
}

// Ramp jets of the cut-off in face coordinates.
struct EtaJet {
    double v, ds, dt, lap;
};

inline RampJet ramp_pair(double x, double len, double b) {
    if (x >= 2.0 * b && x <= len - 2.0 * b)
        return {1.0, 0.0, 0.0};
    if (x <= b || x >= len - b)
        return {0.0, 0.0, 0.0};
    return edge_pair(x, len, b);
}

inline EtaJet eta_jet(double s, double t, const RectFrame& f, double b) {
    RampJet a = ramp_pair(s, f.ls, b);
    if (a.v == 0.0)
        return {0.0, 0.0, 0.0, 0.0};
    RampJet c = ramp_pair(t, f.lt, b);
    return {a.v * c.v, a.d1 * c.v, a.v * c.d1, a.d2 * c.v + a.v * c.d2};
}

struct FullAccumulator {
    ComplexSum v, g[3], hn[3];
    void add(const kernels::FullSums& s) {
        v.add({s.v[0], s.v[1]});
        for (int c = 0; c < 3; ++c) {
            g[c].add({s.g[c][0], s.g[c][1]});
            hn[c].add({s.hn[c][0], s.hn[c][1]});
        }
    }
    LayerSums result() const {
        LayerSums out;
        out.D = v.value();
        for (int c = 0; c < 3; ++c) {
            out.gradD[c] = g[c].value();
            out.hessDn[c] = hn[c].value();
        }
        return out;
    }
};

} // namespace

double QuadratureSpec::split_radius(double k) const {
    return singularSplitRadius > 0.0 ? singularSplitRadius : 2.0 * wavelength(k);
}

QuadratureSpec QuadratureSpec::refined() const {
    QuadratureSpec s = *this;
    s.pointsPerWavelength *= 1.5;
    s.estimateError = false;
    return s;
}

void QuadratureSpec::validate() const {
    if (!(pointsPerWavelength >= 4.0))
        throw ConfigError("points per wavelength must be at least 4");
    if (panelNodes < 2 || panelNodes > 64)
        throw ConfigError("panel node count must lie in [2, 64]");
    if (maxPanels < 1)
        throw ConfigError("panel budget must be positive");
    if (!(cutoff.scale > 0.0))
        throw ConfigError("cut-off scale must be positive");
}

cplx dot(const Vec3& a, const CVec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

cplx LayerSums::N(const Vec3& n) const { return -dot(n, gradD); }

LayerSums& LayerSums::operator+=(const LayerSums& o) {
    D += o.D;
    gradD += o.gradD;
    hessDn += o.hessDn;
    return *this;
}

FaceLayer::FaceLayer(const PolygonFace& face, const Vec3& alpha, double k, const QuadratureSpec& spec)
    : face_(face), frame_(rect_frame(face)), alpha_(alpha), k_(k), spec_(spec) {
    spec_.validate();
    if (!(k >= 1.0))
        throw ConfigError("wavenumber must be at least 1");
    if (std::abs(alpha.dot(face.normal)) < 1e-12)
        throw ConfigError("incoming direction is tangent to the face");
    band_ = spec_.cutoff.band(k);
    const double b = band_;
    if (frame_.ls <= 2.0 * b || frame_.lt <= 2.0 * b) {
        empty_ = true;
        return;
    }
    auto axis_rule = [&](double len, double rate, long& panels) {
        std::array<double, 4> br{b, std::min(2.0 * b, 0.5 * len), std::max(len - 2.0 * b, 0.5 * len),
                                 len - b};
        Rule1D r;
        panels = 0;
        for (int i = 0; i < 3; ++i) {
            if (br[i + 1] - br[i] <= 0.0)
                continue;
            panels += oscillatory_panels(br[i], br[i + 1], rate, spec_.pointsPerWavelength, spec_.panelNodes);
            append_oscillatory(r, br[i], br[i + 1], rate, spec_.pointsPerWavelength, spec_.panelNodes);
        }
        return r;
    };
    long ps = 0, pt = 0;
    Rule1D rs = axis_rule(frame_.ls, k * (std::abs(alpha.dot(frame_.es)) + 1.0), ps);
    Rule1D rt = axis_rule(frame_.lt, k * (std::abs(alpha.dot(frame_.et)) + 1.0), pt);
    check_budget(ps * pt, spec_, "face tensor rule");

    const size_t n = rs.size() * rt.size();
    tx_.resize(n);
    ty_.resize(n);
    tz_.resize(n);
    tw_.resize(n);
    size_t idx = 0;
    for (size_t i = 0; i < rs.size(); ++i) {
        const double es = edge_pair(rs.x[i], frame_.ls, b).v;
        for (size_t j = 0; j < rt.size(); ++j, ++idx) {
            Vec3 q = frame_.point(rs.x[i], rt.x[j]);
            tx_[idx] = q.x();
            ty_[idx] = q.y();
            tz_[idx] = q.z();
            tw_[idx] = rs.w[i] * rt.w[j] * es * edge_pair(rt.x[j], frame_.lt, b).v;
        }
    }
    twr_.resize(n);
    twi_.resize(n);
    const double a[3] = {alpha.x(), alpha.y(), alpha.z()};
    kernels::phase_weights(tx_.data(), ty_.data(), tz_.data(), tw_.data(), n, a, k, twr_.data(),
                           twi_.data());
}

void FaceLayer::tensor_rule(std::vector<Vec3>& nodes, std::vector<double>& weights) const {
    nodes.clear();
    weights.clear();
    for (size_t i = 0; i < tx_.size(); ++i) {
        nodes.emplace_back(tx_[i], ty_[i], tz_[i]);
        weights.push_back(tw_[i]);
    }
}

double FaceLayer::eta_at(const Vec3& q) const {
    if (empty_)
        return 0.0;
    Vec3 d = q - frame_.origin;
    return eta_jet(d.dot(frame_.es), d.dot(frame_.et), frame_, band_).v;
}

cplx FaceLayer::density(const Vec3& q) const {
    return eta_at(q) * std::exp(I * k_ * alpha_.dot(q));
}

LayerSums FaceLayer::evaluate(const Vec3& r, bool withHess) const {
    if (empty_)
        return {};
    const Vec3 d = r - frame_.origin;
    const double h = d.dot(frame_.n);
    const double s = d.dot(frame_.es), t = d.dot(frame_.et);
    const double scale = frame_.ls + frame_.lt;
    if (std::abs(h) <= 1e-12 * scale)
        return evaluate_trace(r, withHess);
    const double os = std::max({0.0, -s, s - frame_.ls});
    const double ot = std::max({0.0, -t, t - frame_.lt});
    const double dist = std::sqrt(h * h + os * os + ot * ot);
    if (dist < spec_.split_radius(k_))
        return evaluate_polar(r, withHess);
    return evaluate_tensor(r, withHess);
}

LayerSums FaceLayer::evaluate_tensor(const Vec3& r, bool withHess) const {
    if (empty_)
        return {};
    const double rr[3] = {r.x(), r.y(), r.z()};
    const double nn[3] = {frame_.n.x(), frame_.n.y(), frame_.n.z()};
    FullAccumulator acc;
    kernels::FullSums part;
    for (size_t i = 0; i < tx_.size(); i += kernels::chunk) {
        size_t m = std::min(kernels::chunk, tx_.size() - i);
        kernels::full(tx_.data() + i, ty_.data() + i, tz_.data() + i, twr_.data() + i,
                      twi_.data() + i, m, rr, k_, nn, withHess, part);
        acc.add(part);
    }
    return acc.result();
}

namespace {

PolarParams polar_params(const RectFrame& f, const Vec3& alpha, double k, double b,
                         const QuadratureSpec& spec) {
    PolarParams P;
    P.sup = {b, f.ls - b, b, f.lt - b, b};
    P.alphaS = alpha.dot(f.es);
    P.alphaT = alpha.dot(f.et);
    P.k = k;
    P.ppw = spec.pointsPerWavelength;
    P.pn = spec.panelNodes;
    return P;
}

struct NodeBuffer {
    std::array<double, kernels::chunk> x, y, z, w, s, t, wr, wi;
    std::array<double, 4 * kernels::chunk> mr, mi;
    size_t n = 0;
};

thread_local NodeBuffer tlBuf;

} // namespace

LayerSums FaceLayer::evaluate_polar(const Vec3& r, bool withHess) const {
    if (empty_)
        return {};
    const Vec3 d = r - frame_.origin;
    const double h = d.dot(frame_.n);
    const double sp = d.dot(frame_.es), tp = d.dot(frame_.et);
    const double rr[3] = {r.x(), r.y(), r.z()};
    const double nn[3] = {frame_.n.x(), frame_.n.y(), frame_.n.z()};
    const double a[3] = {alpha_.x(), alpha_.y(), alpha_.z()};
    const RectFrame& f = frame_;
    const double b = band_;

    FullAccumulator acc;
    kernels::FullSums part;
    NodeBuffer& B = tlBuf;
    B.n = 0;
    auto flush = [&] {
        if (B.n == 0)
            return;
        kernels::phase_weights(B.x.data(), B.y.data(), B.z.data(), B.w.data(), B.n, a, k_,
                               B.wr.data(), B.wi.data());
        kernels::full(B.x.data(), B.y.data(), B.z.data(), B.wr.data(), B.wi.data(), B.n, rr, k_, nn,
                      withHess, part);
        acc.add(part);
        B.n = 0;
    };
    auto emit = [&](double s, double t, double w) {
        double e = eta_jet(s, t, f, b).v;
        if (e == 0.0)
            return;
        Vec3 q = f.origin + s * f.es + t * f.et;
        B.x[B.n] = q.x();
        B.y[B.n] = q.y();
        B.z[B.n] = q.z();
        B.w[B.n] = w * e;
        if (++B.n == kernels::chunk)
            flush();
    };
    long panels = polar_rule(polar_params(f, alpha_, k_, b, spec_), sp, tp, h, emit);
    flush();
    check_budget(panels, spec_, "polar rule");
    return acc.result();
}

LayerSums FaceLayer::evaluate_trace(const Vec3& r, bool withHess) const {
    if (empty_)
        return {};
    const RectFrame& f = frame_;
    const Vec3 d = r - f.origin;
    const double sp = d.dot(f.es), tp = d.dot(f.et);
    const Vec3 p = f.origin + sp * f.es + tp * f.et;
    const double rr[3] = {p.x(), p.y(), p.z()};
    const double b = band_;
    const double as = alpha_.dot(f.es), at = alpha_.dot(f.et), an = alpha_.dot(f.n);
    const int m = withHess ? 4 : 3;
    const size_t C = kernels::chunk;

    ComplexSum sums[4];
    NodeBuffer& B = tlBuf;
    B.n = 0;
    std::array<double, kernels::chunk> eta, es, et, lap;
    const double a[3] = {alpha_.x(), alpha_.y(), alpha_.z()};
    auto flush = [&] {
        if (B.n == 0)
            return;
        kernels::phase_weights(B.x.data(), B.y.data(), B.z.data(), B.w.data(), B.n, a, k_,
                               B.wr.data(), B.wi.data());
        const double kk = k_ * k_ * an * an;
        for (size_t i = 0; i < B.n; ++i) {
            // ph = w exp(ik alpha.q); each weight is (real part + i imag part) * ph.
            const double pr = B.wr[i], pi_ = B.wi[i];
            const double e0 = eta[i];
            const double sIm = k_ * as * e0, tIm = k_ * at * e0;
            const double nRe = lap[i] + kk * e0, nIm = 2.0 * k_ * (as * es[i] + at * et[i]);
            B.mr[i] = e0 * pr;
            B.mi[i] = e0 * pi_;
            B.mr[C + i] = es[i] * pr - sIm * pi_;
            B.mi[C + i] = es[i] * pi_ + sIm * pr;
            B.mr[2 * C + i] = et[i] * pr - tIm * pi_;
            B.mi[2 * C + i] = et[i] * pi_ + tIm * pr;
            B.mr[3 * C + i] = nRe * pr - nIm * pi_;
            B.mi[3 * C + i] = nRe * pi_ + nIm * pr;
        }
        double outR[4], outI[4];
        kernels::multi(B.x.data(), B.y.data(), B.z.data(), B.mr.data(), B.mi.data(), C, m, B.n, rr,
                       k_, outR, outI);
        for (int l = 0; l < m; ++l)
            sums[l].add({outR[l], outI[l]});
        B.n = 0;
    };
    auto emit = [&](double s, double t, double w) {
        EtaJet j = eta_jet(s, t, f, b);
        if (j.v == 0.0 && j.ds == 0.0 && j.dt == 0.0 && j.lap == 0.0)
            return;
        Vec3 q = f.origin + s * f.es + t * f.et;
        B.x[B.n] = q.x();
        B.y[B.n] = q.y();
        B.z[B.n] = q.z();
        B.w[B.n] = w;
        eta[B.n] = j.v;
        es[B.n] = j.ds;
        et[B.n] = j.dt;
        lap[B.n] = j.lap;
        if (++B.n == kernels::chunk)
            flush();
    };
    long panels = polar_rule(polar_params(f, alpha_, k_, b, spec_), sp, tp, 0.0, emit);
    flush();
    check_budget(panels, spec_, "on-face rule");

    const EtaJet jp = eta_jet(sp, tp, f, b);
    const cplx ep = std::exp(I * k_ * alpha_.dot(p));
    const cplx phi = jp.v * ep;
    const cplx phiS = (jp.ds + I * k_ * as * jp.v) * ep;
    const cplx phiT = (jp.dt + I * k_ * at * jp.v) * ep;

    LayerSums out;
    out.D = sums[0].value();
    out.gradD = sums[1].value() * f.es.cast<cplx>() + sums[2].value() * f.et.cast<cplx>() -
                (2.0 * pi * phi) * f.n.cast<cplx>();
    if (withHess)
        out.hessDn = -2.0 * pi * (phiS * f.es.cast<cplx>() + phiT * f.et.cast<cplx>()) -
                     sums[3].value() * f.n.cast<cplx>();
    return out;
}

LayerEvaluation single_layer_D(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                               const QuadratureSpec& spec) {
    FaceLayer layer(face, alpha, k, spec);
    LayerSums s = layer.evaluate(r, false);
    LayerEvaluation out{s.D, s.gradD, 0.0};
    if (spec.estimateError) {
        FaceLayer fine(face, alpha, k, spec.refined());
        out.estErr = std::abs(fine.evaluate(r, false).D - s.D);
    }
    return out;
}

cplx single_layer_dnD_on_face(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                              const QuadratureSpec& spec) {
    const double b = spec.cutoff.band(k);
    const RectFrame f = rect_frame(face);
    const Vec3 d = r - f.origin;
    const double e = eta_jet(d.dot(f.es), d.dot(f.et), f, b).v;
    return -2.0 * pi * e * std::exp(I * k * alpha.dot(r));
}

LayerEvaluation double_layer_N(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                               const QuadratureSpec& spec) {
    FaceLayer layer(face, alpha, k, spec);
    LayerSums s = layer.evaluate(r, true);
    LayerEvaluation out{s.N(face.normal), s.gradN(), 0.0};
    if (spec.estimateError) {
        FaceLayer fine(face, alpha, k, spec.refined());
        out.estErr = std::abs(fine.evaluate(r, false).N(face.normal) - out.value);
    }
    return out;
}

cplx layer_asymptotic_oracle(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                             LayerKind which, double tol) {
    const double nA = alpha.dot(face.normal);
    const double h = face.plane_distance(r);
    const cplx inc = std::exp(I * k * alpha.dot(r));
    if (std::abs(h) <= tol) {
        if (face.boundary_distance(face.project(r)) <= tol)
            throw ZoneAmbiguous("point lies on the edge of the face");
        switch (which) {
        case LayerKind::D: return 2.0 * pi / (I * k * nA) * inc;
        case LayerKind::N: return 2.0 * pi * inc;
        case LayerKind::dnN: return -2.0 * pi * I * k * nA * inc;
        }
    }
    const Zone z = classify_zone(r, alpha, face, tol);
    if (z == Zone::Boundary)
        throw ZoneAmbiguous("point lies on a zone boundary");
    if (z == Zone::Outside)
        return 0.0;
    if (z == Zone::Shadow) {
        switch (which) {
        case LayerKind::D: return 2.0 * pi / (I * k * nA) * inc;
        case LayerKind::N: return -2.0 * pi * inc;
        case LayerKind::dnN: return -2.0 * pi * I * k * nA * inc;
        }
    }
    const Vec3 refl = reflect_direction(alpha, face.normal);
    const cplx out = std::exp(I * k * (travel_phase_t0(alpha, face) + refl.dot(r)));
    switch (which) {
    case LayerKind::D: return 2.0 * pi / (I * k * nA) * out;
    case LayerKind::N: return 2.0 * pi * out;
    case LayerKind::dnN: return 2.0 * pi * I * k * refl.dot(face.normal) * out;
    }
    return 0.0;
}

} // namespace invisim

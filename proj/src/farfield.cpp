#include "invisim/farfield.hpp"

#include "invisim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace invisim {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// Integral of exp(i omega x) over [a, b].
cplx segment_transform(double omega, double a, double b) {
    double h = b - a;
    return std::exp(I * (omega * 0.5 * (a + b))) * (h * sinc(0.5 * omega * h));
}

// Longest face side as seen along the incident direction.
double longest_projected_side(const PolygonFace& face) {
    Vec3 p0 = incident_direction();
    double best = 0.0;
    const auto& v = face.vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec3 e = v[(i + 1) % v.size()] - v[i];
        best = std::max(best, (e - e.dot(p0) * p0).norm());
    }
    return best;
}

} // namespace

double SphericalGrid::total_weight() const {
    CompensatedSum s;
    for (double w : weights)
        s.add(w);
    return s.value();
}

double cap_radius(double k) { return std::min(pi / 8.0, 40.0 / k); }

SphericalGrid spherical_grid(const Obstacle& ob, double k, const GridOptions& opts) {
    if (!(k > 0.0))
        throw ConfigError("wavenumber must be positive");
    if (!(opts.nodesPer2Pi > 0.0) || !(opts.capFactor >= 1.0) || opts.panelNodes < 1)
        throw ConfigError("invalid spherical grid options");

    SphericalGrid g;
    // |u_inf|^2 is band limited by twice the phase spread across the obstacle.
    double band = 2.0 * k * ob.radius() + 16.0;
    double density = opts.nodesPer2Pi * band / (2.0 * pi);
    double rc = cap_radius(k);
    Vec3 p0 = incident_direction();
    Vec3 ps = ob.reflected_left();
    double ring = std::acos(std::clamp(p0.dot(ps), -1.0, 1.0));
    g.capCenters = {p0, ps, ob.reflected_right()};
    g.capRadius = rc;

    // Polar breakpoints with the caps around the pole and the reflected ring.
    struct Piece {
        double a, b, density;
    };
    double lo = std::max(rc, ring - rc), hi = std::min(pi, ring + rc);
    const Piece pieces[] = {{0.0, rc, opts.capFactor * density},
                            {rc, lo, density},
                            {lo, hi, opts.capFactor * density},
                            {hi, pi, density}};

    Rule1D polar;
    for (const auto& [a, b, de] : pieces) {
        if (b <= a)
            continue;
        long panels = std::max<long>(1, long(std::ceil((b - a) * de / opts.panelNodes)));
        for (long p = 0; p < panels; ++p)
            append_gauss(polar, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, opts.panelNodes);
    }

    g.lobeHalfWidth = 2.0 * pi / (k * longest_projected_side(ob.face(FaceLabel::UpperLeft)));
    for (size_t i = 0; i < polar.size(); ++i) {
        double th = polar.x[i];
        if (th < g.lobeHalfWidth)
            ++g.lobeRings;
        double st = std::sin(th), ct = std::cos(th);
        // Even azimuth count with half-step offset, so phi -> pi - phi maps nodes to nodes.
        long m = 2 * long(std::ceil(band * st)) + 1;
        m = std::max<long>(16, m + (m % 2));
        size_t base = g.nodes.size();
        double w = polar.w[i] * st * 2.0 * pi / m;
        for (long j = 0; j < m; ++j) {
            double ph = (j + 0.5) * 2.0 * pi / m;
            g.nodes.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
            g.weights.push_back(w);
            long jm = ((m / 2 - 1 - j) % m + m) % m;
            g.mirror.push_back(base + size_t(jm));
        }
    }
    return g;
}

void check_lobe_resolution(const SphericalGrid& grid, size_t minRings) {
    if (grid.lobeRings < minRings)
        throw LobeUnresolved("forward lobe has " + std::to_string(grid.lobeRings) +
                             " polar rings inside its half width, need " + std::to_string(minRings));
}

cplx ClosedFormFarField::SideRule::transform(double omega) const {
    cplx s{0.0, 0.0};
    for (size_t i = 0; i < x.size(); ++i) {
        double ph = omega * x[i];
        s += cplx(wf[i] * std::cos(ph), wf[i] * std::sin(ph));
    }
    double a = 2.0 * band, b = length - 2.0 * band;
    if (b > a)
        s += segment_transform(omega, a, b);
    return s;
}

ClosedFormFarField::ClosedFormFarField(const Obstacle& ob, double k, const Impedance& lambda,
                                       const CutoffProfile& cutoff, int bandNodes)
    : face_(ob.face(FaceLabel::UpperLeft)), frame_(rect_frame(face_)), p0_(incident_direction()),
      p0s_(ob.reflected_left()), k_(k), d_(ob.d) {
    if (!(k > 0.0))
        throw ConfigError("wavenumber must be positive");
    nIn_ = face_.normal.dot(p0_);
    A_ = face_reflection_coefficient(lambda, nIn_);
    double b = cutoff.band(k);
    auto build = [&](SideRule& r, double len) {
        r.length = len;
        r.band = b;
        Rule1D rule;
        if (4.0 * b < len) {
            append_gauss(rule, b, 2.0 * b, bandNodes);
            append_gauss(rule, len - 2.0 * b, len - b, bandNodes);
        } else if (2.0 * b < len) {
            // Ramps overlap: the whole support is one smooth bump.
            int panels = 4;
            for (int p = 0; p < panels; ++p)
                append_gauss(rule, b + (len - 2.0 * b) * p / panels,
                             b + (len - 2.0 * b) * (p + 1) / panels, bandNodes);
        }
        for (size_t i = 0; i < rule.size(); ++i) {
            r.x.push_back(rule.x[i]);
            r.wf.push_back(rule.w[i] * edge_pair(rule.x[i], len, b).v);
        }
        if (!(4.0 * b < len))
            r.band = 0.25 * len; // interior segment is empty
    };
    build(s_, frame_.ls);
    build(t_, frame_.lt);
}

cplx ClosedFormFarField::face_transform(const Vec3& theta) const {
    Vec3 w = p0_ - theta;
    double ph = k_ * w.dot(frame_.origin);
    return std::exp(I * ph) * s_.transform(k_ * w.dot(frame_.es)) * t_.transform(k_ * w.dot(frame_.et));
}

cplx ClosedFormFarField::face_transform_sharp(const Vec3& theta) const {
    return polygon_fourier(face_, k_ * (p0_ - theta));
}

cplx ClosedFormFarField::angular_factor(const Vec3& theta, cplx A) const {
    double nTheta = face_.normal.dot(theta);
    cplx second = A * std::exp(I * (k_ * d_ * (1.0 - p0s_.dot(theta))));
    return (A - 1.0) * nIn_ - (A + 1.0) * nTheta + second * ((A - 1.0) * nIn_ + (A + 1.0) * nTheta);
}

cplx ClosedFormFarField::left(const Vec3& theta) const {
    return I * k_ / (4.0 * pi) * angular_factor(theta) * face_transform(theta);
}

cplx ClosedFormFarField::amplitude(const Vec3& theta) const {
    Vec3 mirrored(-theta.x(), theta.y(), theta.z());
    return left(theta) + left(mirrored);
}

cplx polygon_fourier(const PolygonFace& face, const Vec3& v) {
    const Vec3& n = face.normal;
    Vec3 vt = v - v.dot(n) * n;
    double vt2 = vt.squaredNorm();
    double diam = 0.0;
    for (const auto& p : face.vertices)
        diam = std::max(diam, (p - face.centroid()).norm());
    if (vt2 * diam * diam < 1e-16)
        return face.area() * std::exp(I * v.dot(face.centroid()));
    cplx s{0.0, 0.0};
    const auto& vs = face.vertices;
    for (size_t i = 0; i < vs.size(); ++i) {
        const Vec3& p = vs[i];
        const Vec3& q = vs[(i + 1) % vs.size()];
        Vec3 e = q - p;
        double len = e.norm();
        Vec3 outward = e.cross(n) / len;
        cplx edge = len * std::exp(I * v.dot(0.5 * (p + q))) * sinc(0.5 * v.dot(e));
        s += -I * (vt.dot(outward) / vt2) * edge;
    }
    return s;
}

cplx far_amplitude_blocks(const KirchhoffField& field, const Vec3& theta) {
    double k = field.k();
    cplx total{0.0, 0.0};
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    for (size_t i = 0; i < field.blocks().size(); ++i) {
        const auto& b = field.blocks()[i];
        field.layer(i).tensor_rule(nodes, weights);
        Vec3 w = b.incomingDirection - theta;
        ComplexSum f;
        for (size_t j = 0; j < nodes.size(); ++j)
            f.add(weights[j] * std::exp(I * (k * w.dot(nodes[j]))));
        double nAlpha = b.incomingDirection.dot(b.face.normal);
        double nTheta = theta.dot(b.face.normal);
        total += b.prefactor * I * k / (4.0 * pi) * ((b.A - 1.0) * nAlpha - (b.A + 1.0) * nTheta) * f.value();
    }
    return total;
}

SurfaceField::SurfaceField(const KirchhoffField& field, const SurfaceOptions& opts)
    : center_(field.obstacle().center()), halfWidth_(opts.halfWidth), k_(field.k()) {
    double h = opts.halfWidth;
    if (!(h > field.obstacle().radius()))
        throw ConfigError("enclosing cube must contain the obstacle");
    if (!(opts.nodesPer2Pi > 0.0) || opts.panelNodes < 1)
        throw ConfigError("invalid surface options");

    // Half-range rule on [0, h]; with the mirror images it covers [-h, h].
    double density = 2.0 * k_ * opts.nodesPer2Pi / (2.0 * pi);
    long panels = std::max<long>(1, long(std::ceil(h * density / opts.panelNodes)));
    Rule1D half;
    for (long p = 0; p < panels; ++p)
        append_gauss(half, h * p / panels, h * (p + 1) / panels, opts.panelNodes);
    Rule1D full;
    for (size_t i = 0; i < half.size(); ++i) {
        full.x.push_back(-half.x[i]);
        full.w.push_back(half.w[i]);
    }
    for (size_t i = 0; i < half.size(); ++i) {
        full.x.push_back(half.x[i]);
        full.w.push_back(half.w[i]);
    }

    auto face = [&](const Vec3& normal, const Rule1D& ra, const Rule1D& rb, auto place) {
        for (size_t i = 0; i < ra.size(); ++i)
            for (size_t j = 0; j < rb.size(); ++j) {
                pos_.push_back(center_ + place(ra.x[i], rb.x[j]));
                nrm_.push_back(normal);
                w_.push_back(ra.w[i] * rb.w[j]);
            }
    };
    // Faces x = +h and y = +h (half in the other lateral direction), and the two z faces
    // restricted to the quarter x, y >= centre.
    face(Vec3(1, 0, 0), half, full, [&](double a, double b) { return Vec3(h, a, b); });
    face(Vec3(0, 1, 0), half, full, [&](double a, double b) { return Vec3(a, h, b); });
    face(Vec3(0, 0, 1), half, half, [&](double a, double b) { return Vec3(a, b, h); });
    face(Vec3(0, 0, -1), half, half, [&](double a, double b) { return Vec3(a, b, -h); });

    u_.resize(pos_.size());
    grad_.resize(pos_.size());
    parallel_for(
        pos_.size(),
        [&](size_t i) {
            FieldSample s = field.sample(pos_[i], true);
            u_[i] = s.value;
            grad_[i] = s.gradient;
        },
        opts.threads);
}

cplx SurfaceField::far_amplitude(const Vec3& theta) const {
    ComplexSum s;
    for (size_t i = 0; i < pos_.size(); ++i) {
        cplx dudn = dot(nrm_[i], grad_[i]);
        Vec3 off = pos_[i] - center_;
        for (int sx : {1, -1})
            for (int sy : {1, -1}) {
                Vec3 r(center_.x() + sx * off.x(), center_.y() + sy * off.y(), pos_[i].z());
                double nTheta = sx * nrm_[i].x() * theta.x() + sy * nrm_[i].y() * theta.y() +
                                nrm_[i].z() * theta.z();
                s.add(w_[i] * (dudn + I * k_ * nTheta * u_[i]) * std::exp(-I * (k_ * theta.dot(r))));
            }
    }
    return -s.value() / (4.0 * pi);
}

double SurfaceField::flux_cross_section() const {
    CompensatedSum s;
    for (size_t i = 0; i < pos_.size(); ++i)
        s.add(4.0 * w_[i] * (dot(nrm_[i], grad_[i]) * std::conj(u_[i])).imag());
    return s.value() / k_;
}

cplx far_amplitude_surface(const Vec3& theta, const Obstacle& ob, double k, const Impedance& lambda,
                           const SurfaceOptions& opts) {
    KirchhoffField field(ob, k, lambda, opts.layers);
    return SurfaceField(field, opts).far_amplitude(theta);
}

cplx far_amplitude_closed_form(const Vec3& theta, double k, const Impedance& lambda, const Obstacle& ob,
                               const CutoffProfile& cutoff) {
    return ClosedFormFarField(ob, k, lambda, cutoff).amplitude(theta);
}

FarField compute_far_field(const Obstacle& ob, double k, const Impedance& lambda, const FarFieldOptions& opts) {
    FarField ff;
    ff.k = k;
    ff.lambda = lambda;
    ff.grid = spherical_grid(ob, k, opts.grid);
    check_lobe_resolution(ff.grid, opts.grid.minLobeRings);
    ClosedFormFarField cf(ob, k, lambda, opts.cutoff);

    size_t n = ff.grid.size();
    std::vector<cplx> left(n);
    const size_t chunk = 4096;
    size_t chunks = (n + chunk - 1) / chunk;
    parallel_for(chunks, [&](size_t c) {
        size_t end = std::min(n, (c + 1) * chunk);
        for (size_t i = c * chunk; i < end; ++i)
            left[i] = cf.left(ff.grid.nodes[i]);
    });
    ff.gridValues.resize(n);
    for (size_t i = 0; i < n; ++i)
        ff.gridValues[i] = left[i] + left[ff.grid.mirror[i]];
    ff.forward = cf.amplitude(incident_direction());

    if (opts.surface) {
        KirchhoffField field(ob, k, lambda, opts.surfaceOptions.layers);
        SurfaceField sf(field, opts.surfaceOptions);
        ff.sigmaSurface = sf.flux_cross_section();
    }
    return ff;
}

double total_cross_section(const FarField& ff, CrossSectionRoute route) {
    if (route == CrossSectionRoute::Surface) {
        if (!ff.sigmaSurface)
            throw ConfigError("surface route was not evaluated for this far field");
        return *ff.sigmaSurface;
    }
    CompensatedSum s;
    for (size_t i = 0; i < ff.gridValues.size(); ++i)
        s.add(ff.grid.weights[i] * std::norm(ff.gridValues[i]));
    return s.value();
}

double transport_cross_section(const FarField& ff) {
    Vec3 p0 = incident_direction();
    return forward_concentration(ff, [&](const Vec3& t) { return 1.0 - t.dot(p0); });
}

double sigma_asymptotic(double k, const Impedance& lambda, double delta) {
    cplx l = lambda.lambda;
    cplx A = (I - 2.0 * l) / (I + 2.0 * l);
    return 0.5 * std::norm(A * A * std::exp(I * (k * delta)) - 1.0);
}

double optical_theorem_check(const FarField& ff, double sigma) {
    return std::abs(4.0 * pi / ff.k * ff.forward.imag()) - sigma;
}

double forward_concentration(const FarField& ff, const std::function<double(const Vec3&)>& phi) {
    CompensatedSum s;
    for (size_t i = 0; i < ff.gridValues.size(); ++i)
        s.add(ff.grid.weights[i] * phi(ff.grid.nodes[i]) * std::norm(ff.gridValues[i]));
    return s.value();
}

std::vector<double> cross_sections_for_impedances(const Obstacle& ob, double k,
                                                  const std::vector<Impedance>& lambdas,
                                                  const FarFieldOptions& opts) {
    SphericalGrid grid = spherical_grid(ob, k, opts.grid);
    check_lobe_resolution(grid, opts.grid.minLobeRings);
    ClosedFormFarField cf(ob, k, Impedance(), opts.cutoff);
    double nIn = ob.face(FaceLabel::UpperLeft).normal.dot(incident_direction());
    size_t n = grid.size();
    std::vector<cplx> transform(n);
    for (size_t i = 0; i < n; ++i)
        transform[i] = I * k / (4.0 * pi) * cf.face_transform(grid.nodes[i]);

    std::vector<double> out(lambdas.size());
    parallel_for(lambdas.size(), [&](size_t j) {
        cplx A = face_reflection_coefficient(lambdas[j], nIn);
        std::vector<cplx> left(n);
        for (size_t i = 0; i < n; ++i)
            left[i] = cf.angular_factor(grid.nodes[i], A) * transform[i];
        CompensatedSum s;
        for (size_t i = 0; i < n; ++i)
            s.add(grid.weights[i] * std::norm(left[i] + left[grid.mirror[i]]));
        out[j] = s.value();
    });
    return out;
}

CrossSectionReport cross_section_report(const Obstacle& ob, double k, const Impedance& lambda,
                                        const FarFieldOptions& opts) {
    FarField ff = compute_far_field(ob, k, lambda, opts);
    CrossSectionReport r;
    r.k = k;
    r.lambda = lambda.lambda;
    r.sigmaGrid = total_cross_section(ff);
    r.sigmaSurface = ff.sigmaSurface;
    r.sigmaAsym = sigma_asymptotic(k, lambda, ob.delta);
    r.sigmaTransport = transport_cross_section(ff);
    r.forwardRe = ff.forward.real();
    r.forwardIm = ff.forward.imag();
    return r;
}

} // namespace invisim

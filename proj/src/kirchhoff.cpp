#include "invisim/kirchhoff.hpp"

#include "invisim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace invisim {

std::vector<FaceBlock> face_blocks(const Obstacle& ob, double k, const Impedance& lambda) {
    std::vector<FaceBlock> out;
    const std::pair<FaceLabel, FaceLabel> pairs[] = {{FaceLabel::UpperLeft, FaceLabel::LowerRight},
                                                     {FaceLabel::UpperRight, FaceLabel::LowerLeft}};
    for (const auto& [first, second] : pairs) {
        FaceBlock a;
        a.face = ob.face(first);
        a.incomingDirection = ob.incoming(first);
        a.A = face_reflection_coefficient(lambda, a.incomingDirection.dot(a.face.normal));
        a.prefactor = 1.0;
        a.bounce = 1;
        FaceBlock b;
        b.face = ob.face(second);
        b.incomingDirection = ob.incoming(second);
        b.A = face_reflection_coefficient(lambda, b.incomingDirection.dot(b.face.normal));
        b.prefactor = a.A * std::exp(I * k * travel_phase_t0(a.incomingDirection, a.face));
        b.bounce = 2;
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

Zone combined_zone(const Vec3& r, const std::vector<FaceBlock>& blocks, double tol) {
    bool refl = false, shadow = false;
    for (const auto& b : blocks) {
        Zone z = classify_zone(r, b.incomingDirection, b.face, tol);
        if (z == Zone::Boundary)
            return Zone::Boundary;
        refl = refl || z == Zone::Reflected;
        shadow = shadow || z == Zone::Shadow;
    }
    if (refl)
        return Zone::Reflected;
    if (shadow)
        return Zone::Shadow;
    return Zone::Outside;
}

KirchhoffField::KirchhoffField(const Obstacle& ob, double k, const Impedance& lambda,
                               const QuadratureSpec& spec)
    : obstacle_(ob), k_(k), lambda_(lambda), spec_(spec) {
    blocks_ = face_blocks(ob, k, lambda);
    for (const auto& b : blocks_)
        layers_.push_back(std::make_unique<FaceLayer>(b.face, b.incomingDirection, k, spec));
}

void KirchhoffField::set_impedance(const Impedance& lambda) {
    lambda_ = lambda;
    blocks_ = face_blocks(obstacle_, k_, lambda);
}

std::pair<cplx, CVec3> KirchhoffField::combine(size_t i, const LayerSums& s) const {
    const FaceBlock& b = blocks_[i];
    const Vec3& n = b.face.normal;
    const double nA = b.incomingDirection.dot(n);
    const cplx cD = b.prefactor * (I * k_ / (4.0 * pi)) * (b.A - 1.0) * nA;
    const cplx cN = b.prefactor * (b.A + 1.0) / (4.0 * pi);
    return {cD * s.D + cN * s.N(n), cD * s.gradD + cN * s.gradN()};
}

std::pair<cplx, CVec3> KirchhoffField::block(size_t i, const Vec3& r, bool withGradient) const {
    return combine(i, layers_[i]->evaluate(r, withGradient));
}

FieldSample KirchhoffField::sample(const Vec3& r, bool withGradient) const {
    FieldSample out;
    out.position = r;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        auto [v, g] = block(i, r, withGradient);
        out.value += v;
        out.gradient += g;
    }
    out.zone = combined_zone(r, blocks_, default_zone_tol(obstacle_.width));
    return out;
}

cplx phi_face(const Vec3& r, const FaceBlock& block, double k, const Impedance& lambda,
              const QuadratureSpec& spec) {
    (void)lambda; // enters through block.A
    FaceLayer layer(block.face, block.incomingDirection, k, spec);
    LayerSums s = layer.evaluate(r, false);
    const Vec3& n = block.face.normal;
    const double nA = block.incomingDirection.dot(n);
    return block.prefactor * ((I * k / (4.0 * pi)) * (block.A - 1.0) * nA * s.D +
                              (block.A + 1.0) / (4.0 * pi) * s.N(n));
}

FieldSample u0_field(const Vec3& r, const Obstacle& ob, double k, const Impedance& lambda,
                     const QuadratureSpec& spec) {
    return KirchhoffField(ob, k, lambda, spec).sample(r);
}

ResidualReport boundary_residual(const Obstacle& ob, double k, const Impedance& lambda,
                                 const QuadratureSpec& spec, const ResidualOptions& opts) {
    KirchhoffField field(ob, k, lambda, spec);
    const double b = spec.cutoff.band(k);
    const double lam = wavelength(k);
    const double panelLen = opts.panelNodes / opts.nodesPerWavelength * lam;

    auto axis = [&](double len) {
        std::vector<double> br{0.0, b, 2 * b, len - 2 * b, len - b, len};
        std::sort(br.begin(), br.end());
        Rule1D r;
        for (size_t i = 0; i + 1 < br.size(); ++i) {
            double a = std::clamp(br[i], 0.0, len), c = std::clamp(br[i + 1], 0.0, len);
            if (c - a <= 1e-14)
                continue;
            int panels = std::max(1, static_cast<int>(std::ceil((c - a) / panelLen)));
            for (int p = 0; p < panels; ++p)
                append_gauss(r, a + (c - a) * p / panels, a + (c - a) * (p + 1) / panels, opts.panelNodes);
        }
        return r;
    };

    struct Node {
        Vec3 q;
        double w;
        int face;
        bool band;
    };
    std::vector<Node> nodes;
    for (int fi = 0; fi < 4; ++fi) {
        const RectFrame f = rect_frame(field.blocks()[fi].face);
        Rule1D rs = axis(f.ls), rt = axis(f.lt);
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = 0; j < rt.size(); ++j) {
                double s = rs.x[i], t = rt.x[j];
                bool band = s < b || s > f.ls - b || t < b || t > f.lt - b;
                nodes.push_back({f.point(s, t), rs.w[i] * rt.w[j], fi, band});
            }
    }

    std::vector<double> sq(nodes.size());
    parallel_for(
        nodes.size(),
        [&](size_t i) {
            const Node& nd = nodes[i];
            const Vec3& n = field.blocks()[nd.face].face.normal;
            FieldSample u = field.sample(nd.q, true);
            // Exterior limit of the eikonal field: a point just off the face.
            EikonalValue psi = eikonal_scattered_field(nd.q + 1e-9 * ob.width * n, k, lambda, ob);
            cplx du = dot(n, u.gradient - psi.gradient);
            cplx res = du + k * lambda.lambda * (u.value - psi.value);
            sq[i] = std::norm(res) * nd.w;
        },
        opts.threads);

    ResidualReport rep;
    CompensatedSum total, band;
    std::array<CompensatedSum, 4> per;
    for (size_t i = 0; i < nodes.size(); ++i) {
        total.add(sq[i]);
        per[nodes[i].face].add(sq[i]);
        if (nodes[i].band)
            band.add(sq[i]);
    }
    rep.norm = std::sqrt(total.value());
    rep.edgeBand = std::sqrt(band.value());
    for (int f = 0; f < 4; ++f)
        rep.perFace[f] = std::sqrt(per[f].value());
    rep.points = nodes.size();
    return rep;
}

double boundary_residual_norm(const Obstacle& ob, double k, const Impedance& lambda,
                              const QuadratureSpec& spec) {
    return boundary_residual(ob, k, lambda, spec).norm;
}

} // namespace invisim

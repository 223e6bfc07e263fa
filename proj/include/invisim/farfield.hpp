#pragma once

#include "invisim/kirchhoff.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace invisim {

// Directions on the unit sphere in polar coordinates about the incident direction, with
// composite Gauss rules in the polar angle and periodic trapezoid rules in the azimuth.
// Every node has a mirror partner (x -> -x) in the grid.
struct SphericalGrid {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    std::vector<size_t> mirror;  // index of the node with the first component negated
    std::vector<Vec3> capCenters;
    double capRadius = 0.0;
    double lobeHalfWidth = 0.0;  // first null of the forward lobe along the longest face side
    size_t lobeRings = 0;        // polar rings inside the lobe half-width

    size_t size() const { return nodes.size(); }
    double total_weight() const;
};

struct GridOptions {
    // Gauss nodes per 2*pi of angular phase of |u_inf|^2 outside the caps.
    double nodesPer2Pi = 5.0;
    // Density multiplier inside the caps.
    double capFactor = 2.0;
    int panelNodes = 16;
    // Rings required inside the lobe half-width; 4 rings put 8 nodes across the lobe.
    size_t minLobeRings = 4;
};

double cap_radius(double k);

SphericalGrid spherical_grid(const Obstacle& obstacle, double k, const GridOptions& opts = {});

// Throws LobeUnresolved when the forward lobe is not resolved.
void check_lobe_resolution(const SphericalGrid& grid, size_t minRings = 4);

// Far field of u0 from the translation structure: one integral over the upper left face,
// weighted by the angular factor of both faces of the left pair; the right pair is its
// mirror image.
class ClosedFormFarField {
public:
    ClosedFormFarField(const Obstacle& obstacle, double k, const Impedance& lambda,
                       const CutoffProfile& cutoff = {}, int bandNodes = 24);

    cplx amplitude(const Vec3& theta) const;
    // Contribution of the left pair.
    cplx left(const Vec3& theta) const;
    // Angular factor of the left pair, for this or another reflection factor.
    cplx angular_factor(const Vec3& theta) const { return angular_factor(theta, A_); }
    cplx angular_factor(const Vec3& theta, cplx A) const;
    // Integral of eta exp(ik (p0 - theta).q) over the upper left face.
    cplx face_transform(const Vec3& theta) const;
    // Same integral without the cut-off, from the exact edge sum.
    cplx face_transform_sharp(const Vec3& theta) const;

    double k() const { return k_; }
    cplx A() const { return A_; }

private:
    struct SideRule {
        double length = 0.0, band = 0.0;
        std::vector<double> x, wf; // ramp band nodes and weight * ramp value
        cplx transform(double omega) const;
    };

    PolygonFace face_;
    RectFrame frame_;
    Vec3 p0_, p0s_;
    double k_, d_, nIn_;
    cplx A_;
    SideRule s_, t_;
};

// Integral of exp(i v.q) over a planar convex polygon, reduced to a sum over its edges.
cplx polygon_fourier(const PolygonFace& face, const Vec3& v);

// Amplitude of an outgoing spherical wave exp(ik|r|)/|r| per direction of u0 via a sum of
// the four block transforms, each from the tensor rule of its face. Slower than the
// closed form; used to cross-check it.
cplx far_amplitude_blocks(const KirchhoffField& field, const Vec3& theta);

// Layer rule for points on the enclosing cube, well away from every face.
inline QuadratureSpec surface_layer_spec() {
    QuadratureSpec s;
    s.pointsPerWavelength = 6.0;
    return s;
}

struct SurfaceOptions {
    double halfWidth = 1.2;
    // Gauss nodes per 2*pi of phase on the cube faces; the integrands oscillate at rate 2k.
    double nodesPer2Pi = 8.0;
    int panelNodes = 16;
    QuadratureSpec layers = surface_layer_spec();
    int threads = 0;
};

// u0 and its normal derivative cached at the nodes of an enclosing cube centred on the
// obstacle. The field is symmetric under x and y reflections about the centre, so only
// one quarter of the nodes is evaluated.
class SurfaceField {
public:
    SurfaceField(const KirchhoffField& field, const SurfaceOptions& opts = {});

    // -(1/4pi) int_Q [du/dn + ik (n.theta) u] exp(-ik theta.r) dS
    cplx far_amplitude(const Vec3& theta) const;
    // (1/k) Im int_Q du/dn conj(u) dS
    double flux_cross_section() const;

    size_t evaluated_nodes() const { return pos_.size(); }
    double half_width() const { return halfWidth_; }

private:
    Vec3 center_;
    double halfWidth_, k_;
    std::vector<Vec3> pos_, nrm_;
    std::vector<double> w_;
    std::vector<cplx> u_;
    std::vector<CVec3> grad_;
};

cplx far_amplitude_surface(const Vec3& theta, const Obstacle& obstacle, double k,
                           const Impedance& lambda, const SurfaceOptions& opts = {});

cplx far_amplitude_closed_form(const Vec3& theta, double k, const Impedance& lambda,
                               const Obstacle& obstacle, const CutoffProfile& cutoff = {});

struct FarField {
    double k = 0.0;
    Impedance lambda;
    SphericalGrid grid;
    std::vector<cplx> gridValues;
    cplx forward{0.0, 0.0};
    std::optional<double> sigmaSurface;
};

struct FarFieldOptions {
    GridOptions grid;
    CutoffProfile cutoff;
    bool surface = false;
    SurfaceOptions surfaceOptions;
};

FarField compute_far_field(const Obstacle& obstacle, double k, const Impedance& lambda,
                           const FarFieldOptions& opts = {});

enum class CrossSectionRoute { Grid, Surface };

double total_cross_section(const FarField& ff, CrossSectionRoute route = CrossSectionRoute::Grid);
double transport_cross_section(const FarField& ff);

// 1/2 |A^2 exp(ik delta) - 1|^2 with the reflection factor for incidence n.alpha = -1/2.
double sigma_asymptotic(double k, const Impedance& lambda, double delta);

// |(4pi/k) Im u_inf(p0)| - sigma.
double optical_theorem_check(const FarField& ff, double sigma);

double forward_concentration(const FarField& ff, const std::function<double(const Vec3&)>& phi);

struct CrossSectionReport {
    double k = 0.0;
    cplx lambda{0.0, 0.0};
    double sigmaGrid = 0.0;
    std::optional<double> sigmaSurface;
    double sigmaAsym = 0.0;
    double sigmaTransport = 0.0;
    double forwardRe = 0.0;
    double forwardIm = 0.0;
    std::string error;
};

// Total cross sections at one wavenumber for several impedances. The face transform does
// not depend on the impedance, so it is computed once per grid node.
std::vector<double> cross_sections_for_impedances(const Obstacle& obstacle, double k,
                                                  const std::vector<Impedance>& lambdas,
                                                  const FarFieldOptions& opts = {});

CrossSectionReport cross_section_report(const Obstacle& obstacle, double k, const Impedance& lambda,
                                        const FarFieldOptions& opts = {});

} // namespace invisim

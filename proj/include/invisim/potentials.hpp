#pragma once

#include "invisim/cutoff.hpp"
#include "invisim/geometry.hpp"

#include <vector>

namespace invisim {

struct QuadratureSpec {
    // Gauss nodes per 2*pi of phase along each integration direction.
    double pointsPerWavelength = 10.0;
    // Below this distance from the face the polar rule is used; <= 0 means two wavelengths.
    double singularSplitRadius = 0.0;
    long maxPanels = 4'000'000;
    int panelNodes = 16;
    CutoffProfile cutoff;
    // Report the change against a rule refined by 1.5x as estErr.
    bool estimateError = false;

    double split_radius(double k) const;
    QuadratureSpec refined() const;
    void validate() const;
};

struct LayerEvaluation {
    cplx value{0.0, 0.0};
    CVec3 gradient = CVec3::Zero();
    double estErr = 0.0;
};

// Raw sums of one face potential: D, grad D and (Hess D) n. The double layer follows
// from the flat-face identities N = -n.grad D and grad N = -(Hess D) n.
struct LayerSums {
    cplx D{0.0, 0.0};
    CVec3 gradD = CVec3::Zero();
    CVec3 hessDn = CVec3::Zero();

    cplx N(const Vec3& n) const;
    CVec3 gradN() const { return -hessDn; }
    LayerSums& operator+=(const LayerSums& o);
};

cplx dot(const Vec3& a, const CVec3& b);

// D and N of one rectangular face for a fixed incoming direction and wavenumber. Holds
// the tensor rule used for distant points; nearby points get a polar rule centred at the
// foot point, and points on the face plane get one-sided traces from the normal side.
class FaceLayer {
public:
    FaceLayer(const PolygonFace& face, const Vec3& alpha, double k, const QuadratureSpec& spec);

    LayerSums evaluate(const Vec3& r, bool withHess = true) const;

    LayerSums evaluate_tensor(const Vec3& r, bool withHess = true) const;
    LayerSums evaluate_polar(const Vec3& r, bool withHess = true) const;
    LayerSums evaluate_trace(const Vec3& r, bool withHess = true) const;

    // eta * exp(ik alpha.q) at the in-plane point q.
    cplx density(const Vec3& q) const;
    double eta_at(const Vec3& q) const;

    const RectFrame& frame() const { return frame_; }
    const PolygonFace& face() const { return face_; }
    const Vec3& alpha() const { return alpha_; }
    double k() const { return k_; }
    double band() const { return band_; }
    double n_alpha() const { return alpha_.dot(frame_.n); }
    size_t tensor_size() const { return tx_.size(); }
    const QuadratureSpec& spec() const { return spec_; }

    // Weighted tensor nodes: sum_j w_j f(q_j) approximates the integral of eta f over the face.
    void tensor_rule(std::vector<Vec3>& nodes, std::vector<double>& weights) const;

private:
    PolygonFace face_;
    RectFrame frame_;
    Vec3 alpha_;
    double k_;
    double band_;
    QuadratureSpec spec_;
    bool empty_ = false;
    std::vector<double> tx_, ty_, tz_, tw_, twr_, twi_;
};

LayerEvaluation single_layer_D(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                               const QuadratureSpec& spec = {});

cplx single_layer_dnD_on_face(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                              const QuadratureSpec& spec = {});

LayerEvaluation double_layer_N(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                               const QuadratureSpec& spec = {});

enum class LayerKind { D, N, dnN };

cplx layer_asymptotic_oracle(const Vec3& r, const Vec3& alpha, const PolygonFace& face, double k,
                             LayerKind which, double tol = 1e-9);

} // namespace invisim

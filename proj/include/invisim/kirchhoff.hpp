#pragma once

#include "invisim/potentials.hpp"
#include "invisim/rays.hpp"

#include <array>
#include <memory>
#include <vector>

namespace invisim {

struct FaceBlock {
    PolygonFace face;
    Vec3 incomingDirection;
    cplx prefactor{1.0, 0.0}; // 1 on first-bounce faces, A exp(ik t0) on second-bounce faces
    cplx A{1.0, 0.0};
    int bounce = 1;
};

// The four blocks in the order: upper left, lower right (its partner), upper right, lower left.
std::vector<FaceBlock> face_blocks(const Obstacle& obstacle, double k, const Impedance& lambda);

struct FieldSample {
    Vec3 position = Vec3::Zero();
    cplx value{0.0, 0.0};
    CVec3 gradient = CVec3::Zero();
    Zone zone = Zone::Outside;
};

// Combined zone of r with respect to all blocks; Boundary wins, then Reflected, then Shadow.
Zone combined_zone(const Vec3& r, const std::vector<FaceBlock>& blocks, double tol);

// u0 = sum of the four face blocks. Layers are built once per wavenumber; the impedance only
// enters through the block coefficients and may be changed cheaply.
class KirchhoffField {
public:
    KirchhoffField(const Obstacle& obstacle, double k, const Impedance& lambda,
                   const QuadratureSpec& spec = {});

    void set_impedance(const Impedance& lambda);

    FieldSample sample(const Vec3& r, bool withGradient = true) const;

    // Value and gradient of one block.
    std::pair<cplx, CVec3> block(size_t i, const Vec3& r, bool withGradient = true) const;

    // Block from raw layer sums, for callers that cache the sums.
    std::pair<cplx, CVec3> combine(size_t i, const LayerSums& s) const;

    const std::vector<FaceBlock>& blocks() const { return blocks_; }
    const FaceLayer& layer(size_t i) const { return *layers_[i]; }
    const Obstacle& obstacle() const { return obstacle_; }
    double k() const { return k_; }
    const Impedance& impedance() const { return lambda_; }

private:
    Obstacle obstacle_;
    double k_;
    Impedance lambda_;
    QuadratureSpec spec_;
    std::vector<FaceBlock> blocks_;
    std::vector<std::unique_ptr<FaceLayer>> layers_;
};

cplx phi_face(const Vec3& r, const FaceBlock& block, double k, const Impedance& lambda,
              const QuadratureSpec& spec = {});

FieldSample u0_field(const Vec3& r, const Obstacle& obstacle, double k, const Impedance& lambda,
                     const QuadratureSpec& spec = {});

struct ResidualOptions {
    // Sample nodes per wavelength along each face direction.
    double nodesPerWavelength = 3.0;
    int panelNodes = 6;
    int threads = 0;
};

struct ResidualReport {
    double norm = 0.0;     // L2 norm over the four active faces
    double edgeBand = 0.0; // part of the norm from the band where the cut-off vanishes
    std::array<double, 4> perFace{};
    size_t points = 0;
};

ResidualReport boundary_residual(const Obstacle& obstacle, double k, const Impedance& lambda,
                                 const QuadratureSpec& spec = {}, const ResidualOptions& opts = {});

double boundary_residual_norm(const Obstacle& obstacle, double k, const Impedance& lambda,
                              const QuadratureSpec& spec = {});

} // namespace invisim

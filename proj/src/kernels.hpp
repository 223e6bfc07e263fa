#pragma once

#include <cstddef>

// Hot loops over quadrature nodes for the kernel exp(ikR)/R. Built with relaxed
// floating-point flags so the transcendental calls vectorize; callers combine the
// per-call partial sums with compensated summation.
namespace invisim::kernels {

// Largest node count accepted per call.
inline constexpr std::size_t chunk = 512;

struct FullSums {
    double v[2];     // sum c G
    double g[3][2];  // sum c grad_r G
    double hn[3][2]; // sum c (Hess_r G) n
};

// Nodes (x,y,z), complex weights (wr + i wi); n <= chunk.
void full(const double* x, const double* y, const double* z, const double* wr, const double* wi,
          std::size_t n, const double r[3], double k, const double nrm[3], bool withHess,
          FullSums& out);

// sum_j c^(l)_j G_j for m weight sets laid out as w[l*stride + j]; n <= chunk.
void multi(const double* x, const double* y, const double* z, const double* wr, const double* wi,
           std::size_t stride, int m, std::size_t n, const double r[3], double k, double* outRe,
           double* outIm);

// out = w * exp(i k (a . q)); n arbitrary.
void phase_weights(const double* x, const double* y, const double* z, const double* w, std::size_t n,
                   const double a[3], double k, double* outRe, double* outIm);

} // namespace invisim::kernels

#pragma once

#include "invisim/core.hpp"

#include <functional>
#include <vector>

namespace invisim {

struct Rule1D {
    std::vector<double> x, w;
    size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes and weights on [-1, 1]; cached, thread-safe.
const Rule1D& gauss_legendre(int n);

// Append an n-point Gauss rule mapped to [a, b].
void append_gauss(Rule1D& rule, double a, double b, int n);

// Composite Gauss rule on [a, b] for an integrand whose phase changes at most `rate`
// radians per unit length, with `ppw` nodes per 2*pi of phase and panels of `panelNodes`.
void append_oscillatory(Rule1D& rule, double a, double b, double rate, double ppw, int panelNodes);

// Number of panels append_oscillatory would use.
long oscillatory_panels(double a, double b, double rate, double ppw, int panelNodes);

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexSum {
public:
    void add(const cplx& v) {
        re_.add(v.real());
        im_.add(v.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

// Run fn(i) for i in [0, n) on a fixed pool of threads. Results must be written to
// per-index slots so the outcome does not depend on scheduling.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads = 0);

int default_threads();

} // namespace invisim

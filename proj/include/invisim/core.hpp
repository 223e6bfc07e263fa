#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace invisim {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Incident direction in the obstacle frame.
inline Vec3 incident_direction() { return Vec3(0.0, 0.0, 1.0); }

inline double wavelength(double k) { return 2.0 * pi / k; }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: dimensions, impedance, config keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

class NonPlanarFace : public Error {
public:
    using Error::Error;
};

class EdgeHit : public Error {
public:
    using Error::Error;
};

class PoleAtLambda : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class ZoneAmbiguous : public Error {
public:
    using Error::Error;
};

class LobeUnresolved : public Error {
public:
    using Error::Error;
};

} // namespace invisim

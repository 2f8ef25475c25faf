#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

namespace homogbl {

// Symmetric 2x2 matrix, the value type of coefficient fields and of the
// homogenized tensor.
struct SymMat2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;

    std::array<double, 2> apply(const std::array<double, 2>& v) const {
        return {a11 * v[0] + a12 * v[1], a12 * v[0] + a22 * v[1]};
    }
    double quad(const std::array<double, 2>& v) const {
        return a11 * v[0] * v[0] + 2.0 * a12 * v[0] * v[1] + a22 * v[1] * v[1];
    }
    // Eigenvalues (ascending) of the symmetric matrix.
    std::array<double, 2> eigenvalues() const {
        double tr = a11 + a22;
        double d = a11 - a22;
        double rad = std::sqrt(d * d + 4.0 * a12 * a12);
        return {0.5 * (tr - rad), 0.5 * (tr + rad)};
    }
};

inline SymMat2 isotropic(double a) { return SymMat2{a, 0.0, a}; }

// Fractional part {t} in [0, 1), half-open: the deterministic tie-break for
// sampling at interfaces.
inline double frac_unit(double t) {
    double f = t - std::floor(t);
    return f < 1.0 ? f : 0.0;
}

// A Y-periodic symmetric matrix field A(y) with uniform ellipticity bounds
// m, M.  `at` expects coordinates already reduced to the unit cell; use
// `sample` for arbitrary points and for A(x/eps).
class Coefficient {
public:
    virtual ~Coefficient() = default;
    virtual SymMat2 at(double y1, double y2) const = 0;
    // Canonical name including parameters, e.g. "layered(1,4)"; doubles as
    // part of cache keys, so formatting must be stable.
    virtual std::string name() const = 0;
    virtual double lower_bound() const = 0; // m
    virtual double upper_bound() const = 0; // M
    // True for families with jumps at half-cell interfaces (layered,
    // checkerboard); such families need even grids.
    virtual bool discontinuous() const { return false; }
};

using CoefficientPtr = std::shared_ptr<const Coefficient>;

// Evaluate A({x/eps}) (or A({x}) when eps is empty).
SymMat2 sample(const Coefficient& coeff, double x1, double x2,
               std::optional<double> eps = std::nullopt);

CoefficientPtr make_identity();
// a(y) = a0 + a1*sin(2*pi*y1)*sin(2*pi*y2), isotropic; needs a0 > |a1| > 0.
CoefficientPtr make_trig_isotropic(double a0, double a1);
// a(y) = alpha for {y1} < 1/2, beta otherwise, isotropic.
CoefficientPtr make_layered(double alpha, double beta);
// a(y) = alpha on the two diagonal quarter-cells, beta on the others.
CoefficientPtr make_checkerboard(double alpha, double beta);

// Factory from a family name ("identity", "trig-isotropic", "layered",
// "checkerboard") and up to two parameters; throws config-error for unknown
// names or invalid parameters.
CoefficientPtr make_coefficient(const std::string& family, double p0, double p1);

} // namespace homogbl

#include "homogbl/fields.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace homogbl {

std::vector<double> interpolate(const Grid& grid, const ScalarFn& f) {
    std::vector<double> v(grid.node_count());
    for (int idx = 0; idx < grid.node_count(); ++idx) {
        auto [x1, x2] = grid.node_coord(idx);
        v[idx] = f(x1, x2);
    }
    return v;
}

namespace {

struct Located {
    int ex, ey;
    double xi, eta;
};

Located locate(const Grid& grid, double x1, double x2) {
    const int n = grid.n;
    double t1 = x1 * n, t2 = x2 * n;
    int ex = std::clamp(static_cast<int>(std::floor(t1)), 0, n - 1);
    int ey = std::clamp(static_cast<int>(std::floor(t2)), 0, n - 1);
    return {ex, ey, t1 - ex, t2 - ey};
}

} // namespace

double fe_value(const Grid& grid, const std::vector<double>& values, double x1,
                double x2) {
    const auto loc = locate(grid, x1, x2);
    const auto nodes = grid.element_nodes(loc.ey * grid.n + loc.ex);
    const auto nq = q1::shape(loc.xi, loc.eta);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += values[nodes[a]] * nq[a];
    return s;
}

std::array<double, 2> fe_gradient(const Grid& grid, const std::vector<double>& values,
                                  double x1, double x2) {
    const auto loc = locate(grid, x1, x2);
    const auto nodes = grid.element_nodes(loc.ey * grid.n + loc.ex);
    const auto dn = q1::shape_grad(loc.xi, loc.eta);
    double g1 = 0.0, g2 = 0.0;
    for (int a = 0; a < 4; ++a) {
        g1 += values[nodes[a]] * dn[a][0];
        g2 += values[nodes[a]] * dn[a][1];
    }
    const double inv_h = static_cast<double>(grid.n);
    return {g1 * inv_h, g2 * inv_h};
}

NormContext::NormContext(const Grid& grid)
    : grid_(grid), mass_(assemble_mass(grid)),
      stiff_(assemble_stiffness(grid, isotropic(1.0))) {}

Norms NormContext::norms(const std::vector<double>& v) const {
    const auto& kn = kernels::active();
    const std::size_t n = v.size();
    if (n != static_cast<std::size_t>(grid_.node_count()))
        fail("grid-incompatibility", "field length does not match the norm grid");
    std::vector<double> tmp(n);
    mass_.multiply(v.data(), tmp.data());
    const double vmv = std::max(kn.dot(v.data(), tmp.data(), n), 0.0);
    stiff_.multiply(v.data(), tmp.data());
    const double vkv = std::max(kn.dot(v.data(), tmp.data(), n), 0.0);
    return Norms{std::sqrt(vmv), std::sqrt(vmv + vkv)};
}

double NormContext::l2(const std::vector<double>& v) const { return norms(v).l2; }

double NormContext::integral(const std::vector<double>& v) const {
    if (v.size() != static_cast<std::size_t>(grid_.node_count()))
        fail("grid-incompatibility", "field length does not match the norm grid");
    std::vector<double> tmp(v.size());
    mass_.multiply(v.data(), tmp.data());
    double s = 0.0;
    for (double t : tmp) s += t;
    return s;
}

std::vector<double> combine(
    const std::vector<double>& base,
    const std::vector<std::pair<double, const std::vector<double>*>>& terms) {
    std::vector<double> out = base;
    const auto& kn = kernels::active();
    for (const auto& [s, field] : terms) {
        if (field->size() != out.size())
            fail("grid-incompatibility", "combine: field length mismatch");
        kn.axpy(s, field->data(), out.data(), out.size());
    }
    return out;
}

} // namespace homogbl

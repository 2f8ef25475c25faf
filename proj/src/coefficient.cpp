#include "homogbl/coefficient.hpp"

#include "homogbl/errors.hpp"

#include <cmath>
#include <cstdio>

namespace homogbl {

namespace {

std::string fmt_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Identity final : public Coefficient {
public:
    SymMat2 at(double, double) const override { return isotropic(1.0); }
    std::string name() const override { return "identity"; }
    double lower_bound() const override { return 1.0; }
    double upper_bound() const override { return 1.0; }
};

class TrigIsotropic final : public Coefficient {
public:
    TrigIsotropic(double a0, double a1) : a0_(a0), a1_(a1) {
        if (!(a0 > std::abs(a1)) || !(std::abs(a1) > 0.0))
            fail("config-error", "trig-isotropic needs a0 > |a1| > 0");
    }
    SymMat2 at(double y1, double y2) const override {
        constexpr double two_pi = 6.283185307179586476925286766559;
        return isotropic(a0_ + a1_ * std::sin(two_pi * y1) * std::sin(two_pi * y2));
    }
    std::string name() const override {
        return "trig-isotropic(" + fmt_param(a0_) + "," + fmt_param(a1_) + ")";
    }
    double lower_bound() const override { return a0_ - std::abs(a1_); }
    double upper_bound() const override { return a0_ + std::abs(a1_); }

private:
    double a0_, a1_;
};

class Layered final : public Coefficient {
public:
    Layered(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        if (!(alpha > 0.0) || !(beta > 0.0))
            fail("config-error", "layered needs positive phase values");
    }
    SymMat2 at(double y1, double) const override {
        return isotropic(y1 < 0.5 ? alpha_ : beta_);
    }
    std::string name() const override {
        return "layered(" + fmt_param(alpha_) + "," + fmt_param(beta_) + ")";
    }
    double lower_bound() const override { return std::min(alpha_, beta_); }
    double upper_bound() const override { return std::max(alpha_, beta_); }
    bool discontinuous() const override { return true; }

private:
    double alpha_, beta_;
};

class Checkerboard final : public Coefficient {
public:
    Checkerboard(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        if (!(alpha > 0.0) || !(beta > 0.0))
            fail("config-error", "checkerboard needs positive phase values");
    }
    SymMat2 at(double y1, double y2) const override {
        bool diagonal = (y1 < 0.5) == (y2 < 0.5);
        return isotropic(diagonal ? alpha_ : beta_);
    }
    std::string name() const override {
        return "checkerboard(" + fmt_param(alpha_) + "," + fmt_param(beta_) + ")";
    }
    double lower_bound() const override { return std::min(alpha_, beta_); }
    double upper_bound() const override { return std::max(alpha_, beta_); }
    bool discontinuous() const override { return true; }

private:
    double alpha_, beta_;
};

} // namespace

SymMat2 sample(const Coefficient& coeff, double x1, double x2,
               std::optional<double> eps) {
    if (eps) {
        if (!(*eps > 0.0)) fail("missing-scale", "eps must be positive");
        return coeff.at(frac_unit(x1 / *eps), frac_unit(x2 / *eps));
    }
    return coeff.at(frac_unit(x1), frac_unit(x2));
}

CoefficientPtr make_identity() { return std::make_shared<Identity>(); }

CoefficientPtr make_trig_isotropic(double a0, double a1) {
    return std::make_shared<TrigIsotropic>(a0, a1);
}

CoefficientPtr make_layered(double alpha, double beta) {
    return std::make_shared<Layered>(alpha, beta);
}

CoefficientPtr make_checkerboard(double alpha, double beta) {
    return std::make_shared<Checkerboard>(alpha, beta);
}

CoefficientPtr make_coefficient(const std::string& family, double p0, double p1) {
    if (family == "identity") return make_identity();
    if (family == "trig-isotropic") return make_trig_isotropic(p0, p1);
    if (family == "layered") return make_layered(p0, p1);
    if (family == "checkerboard") return make_checkerboard(p0, p1);
    fail("config-error", "unknown coefficient family '" + family + "'");
}

} // namespace homogbl

#include "redcsd/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "redcsd/error.hpp"

namespace redcsd {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_positive(double v, const char* name) {
    if (!positive_finite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

// sinh(x) / x
double sinhc(double x) {
    if (std::abs(x) < 1e-4) {
        return 1.0 + x * x / 6.0;
    }
    return std::sinh(x) / x;
}

// (1 - exp(-x)) / x
double expm1c(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    return -std::expm1(-x) / x;
}

struct OrderedRates {
    double a;  // min(lambda, theta)
    double b;  // max(lambda, theta)
    bool equal;
};

OrderedRates order_rates(double lambda, double theta) {
    const double a = std::min(lambda, theta);
    const double b = std::max(lambda, theta);
    return {a, b, (b - a) <= EQ_EPS * b};
}

}  // namespace

StabilityParams StabilityParams::red(double lambda, double theta, double kappa) {
    require_positive(lambda, "lambda");
    require_positive(theta, "theta");
    require_positive(kappa, "kappa");
    return StabilityParams(Kind::Red, lambda, theta, kappa, 0.0);
}

StabilityParams StabilityParams::white(double lambda, double sigma) {
    require_positive(lambda, "lambda");
    require_positive(sigma, "sigma");
    return StabilityParams(Kind::White, lambda, 0.0, 0.0, sigma);
}

StabilityParams StabilityParams::swapped() const {
    if (!is_red()) {
        throw DomainError("swapped() requires red-noise parameters");
    }
    return red(theta_, lambda_, kappa_);
}

double stationary_variance(const StabilityParams& p) {
    if (!p.is_red()) {
        return p.sigma() * p.sigma() / (2.0 * p.lambda());
    }
    const auto r = order_rates(p.lambda(), p.theta());
    const double k2 = p.kappa() * p.kappa();
    if (r.equal) {
        const double m = 0.5 * (r.a + r.b);
        return k2 / (4.0 * m * m * m);
    }
    return k2 / (2.0 * r.a * r.b * (r.a + r.b));
}

double stationary_ac(const StabilityParams& p, double tau) {
    if (!(tau >= 0.0)) {
        throw DomainError("lag must be non-negative");
    }
    if (!p.is_red()) {
        return std::exp(-p.lambda() * tau);
    }
    const auto r = order_rates(p.lambda(), p.theta());
    if (r.equal) {
        const double m = 0.5 * (r.a + r.b);
        return (1.0 + m * tau) * std::exp(-m * tau);
    }
    // (b e^{-a tau} - a e^{-b tau}) / (b - a), rearranged around e^{-a tau}
    const double d = r.b - r.a;
    return std::exp(-r.a * tau) * (1.0 + r.a * tau * expm1c(d * tau));
}

double psd_continuous(const StabilityParams& p, double omega) {
    if (!std::isfinite(omega)) {
        throw DomainError("frequency must be finite");
    }
    const double w2 = omega * omega;
    const double l2 = p.lambda() * p.lambda();
    if (!p.is_red()) {
        return p.sigma() * p.sigma() / (l2 + w2);
    }
    return p.kappa() * p.kappa() / ((p.theta() * p.theta() + w2) * (l2 + w2));
}

double psd_discrete(const StabilityParams& p, double omega) {
    if (!std::isfinite(omega)) {
        throw DomainError("frequency must be finite");
    }
    const double omc = detail::one_minus_cos(omega);
    if (!p.is_red()) {
        return p.sigma() * p.sigma() / (2.0 * p.lambda()) * detail::dt_kernel(p.lambda(), omc);
    }
    return p.kappa() * p.kappa() * detail::DtPsdShape(p.lambda(), p.theta())(omc);
}

namespace detail {

double one_minus_cos(double omega) {
    const double s = std::sin(0.5 * omega);
    return 2.0 * s * s;
}

double dt_kernel(double x, double one_minus_cos) {
    // (1 - e^{-2x}) / ((1 - e^{-x})^2 + 2 (1 - cos w) e^{-x})
    const double q = -std::expm1(-x);
    return -std::expm1(-2.0 * x) / (q * q + 2.0 * one_minus_cos * std::exp(-x));
}

DtPsdShape::DtPsdShape(double lambda, double theta) {
    const auto r = order_rates(lambda, theta);
    a_ = r.a;
    b_ = r.b;
    const double d = b_ - a_;
    ea_ = std::exp(-a_);
    qa_ = -std::expm1(-a_);
    q2a_ = -std::expm1(-2.0 * a_);
    eb_ = std::exp(-b_);
    qb_ = -std::expm1(-b_);
    q2b_ = -std::expm1(-2.0 * b_);
    mid_ = 0.5 * (a_ + b_);
    if (r.equal) {
        regime_ = Regime::Equal;
        scale_ = 1.0 / (4.0 * mid_ * mid_ * mid_);
    } else {
        regime_ = (d < 1e-3 * b_ && b_ < 300.0) ? Regime::NearEqual : Regime::General;
        scale_ = 1.0 / (2.0 * a_ * b_ * (a_ + b_));
    }
    if (regime_ != Regime::General) {
        cosh_mid_ = std::cosh(mid_);
        sinh_mid_ = std::sinh(mid_);
        sinhc_d_ = sinhc(d);
        sinhc_half_d_ = sinhc(0.5 * d);
        const double sa = std::sinh(0.5 * a_);
        const double sb = std::sinh(0.5 * b_);
        cosh_a_m1_ = 2.0 * sa * sa;
        cosh_b_m1_ = 2.0 * sb * sb;
        if (regime_ == Regime::Equal) {
            const double sm = std::sinh(0.5 * mid_);
            cosh_a_m1_ = 2.0 * sm * sm;
        }
    }
}

double DtPsdShape::operator()(double omc) const {
    const double c = 1.0 - omc;
    switch (regime_) {
        case Regime::Equal: {
            const double m = mid_;
            const double den = cosh_a_m1_ + omc;  // cosh(m) - cos(w)
            const double num = cosh_mid_ * (m * c + sinh_mid_) - sinh_mid_ * c - m;
            return scale_ * num / (den * den);
        }
        case Regime::NearEqual: {
            const double ga = q2a_ / (qa_ * qa_ + 2.0 * omc * ea_);
            const double dd = (sinhc_d_ - c * cosh_mid_ * sinhc_half_d_) /
                              ((cosh_b_m1_ + omc) * (cosh_a_m1_ + omc));
            return scale_ * (ga - a_ * dd);
        }
        case Regime::General:
        default: {
            const double ga = q2a_ / (qa_ * qa_ + 2.0 * omc * ea_);
            const double gb = q2b_ / (qb_ * qb_ + 2.0 * omc * eb_);
            return scale_ * (b_ * ga - a_ * gb) / (b_ - a_);
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

std::string_view to_string(LambdaPath path) {
    return path == LambdaPath::Fold ? "fold" : "constant";
}

LambdaPath lambda_path_from_string(std::string_view name) {
    if (name == "fold") {
        return LambdaPath::Fold;
    }
    if (name == "constant") {
        return LambdaPath::Constant;
    }
    throw ConfigError("lambda_path must be \"fold\" or \"constant\", got \"" + std::string(name) + "\"");
}

void ParameterSchedule::validate() const {
    auto check = [](double v, const char* name) {
        if (!positive_finite(v)) {
            throw ConfigError(std::string(name) + " must be positive and finite");
        }
    };
    check(T, "T");
    check(lambda0, "lambda0");
    check(theta0, "theta0");
    check(thetaT, "thetaT");
    check(kappa0, "kappa0");
    check(kappaT, "kappaT");
    if (!(trend_fraction > 0.0 && trend_fraction <= 1.0)) {
        throw ConfigError("trend_fraction must lie in (0, 1]");
    }
}

ScheduleValue schedule_eval(const ParameterSchedule& s, double t) {
    if (!(t >= 0.0 && t <= s.T)) {
        throw DomainError("schedule evaluated outside [0, T]");
    }
    const double trend_end = s.trend_fraction * s.T;
    const double te = std::min(t, trend_end);
    const double u = te / trend_end;

    ScheduleValue v{};
    v.theta = (1.0 - u) * s.theta0 + u * s.thetaT;
    v.kappa = (1.0 - u) * s.kappa0 + u * s.kappaT;
    if (s.lambda_path == LambdaPath::Fold) {
        v.lambda = s.lambda0 * std::sqrt(std::max(0.0, 1.0 - te / s.T));
    } else {
        v.lambda = s.lambda0;
    }
    return v;
}

}  // namespace redcsd

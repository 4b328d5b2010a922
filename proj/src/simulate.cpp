#include "redcsd/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "redcsd/error.hpp"
#include "redcsd/rng.hpp"

namespace redcsd {

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > values.size()) {
        throw DomainError("slice exceeds series length");
    }
    TimeSeries out;
    out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(begin),
                      values.begin() + static_cast<std::ptrdiff_t>(begin + count));
    out.dt = dt;
    out.t0 = time(begin);
    return out;
}

void TimeSeries::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("sampling step must be positive");
    }
    if (values.size() < 2) {
        throw DomainError("series needs at least two samples");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError("series contains non-finite values");
        }
    }
}

// ---------------------------------------------------------------------------

double SimConfig::effective_duration() const {
    return duration.value_or(schedule.trend_fraction * schedule.T);
}

std::size_t SimConfig::steps_per_output() const {
    return static_cast<std::size_t>(std::llround(output_step / integrator_step));
}

std::size_t SimConfig::output_length() const {
    return static_cast<std::size_t>(std::llround(effective_duration() / output_step));
}

void SimConfig::validate() const {
    // kappa = 0 is accepted here: an unforced run is a valid simulation.
    if (!(schedule.T > 0.0) || !(schedule.lambda0 > 0.0) || !(schedule.theta0 > 0.0) ||
        !(schedule.thetaT > 0.0) || !(schedule.kappa0 >= 0.0) || !(schedule.kappaT >= 0.0) ||
        !std::isfinite(schedule.T + schedule.lambda0 + schedule.theta0 + schedule.thetaT +
                       schedule.kappa0 + schedule.kappaT)) {
        throw ConfigError("schedule rates must be positive and finite (kappa may be zero)");
    }
    if (!(schedule.trend_fraction > 0.0 && schedule.trend_fraction <= 1.0)) {
        throw ConfigError("trend_fraction must lie in (0, 1]");
    }
    if (!(integrator_step > 0.0) || !(output_step > 0.0)) {
        throw ConfigError("integrator and output steps must be positive");
    }
    const double ratio = output_step / integrator_step;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("output step must be an integer multiple of the integrator step");
    }
    const double d = effective_duration();
    if (!(d > 0.0) || d > schedule.T * (1.0 + 1e-12)) {
        throw ConfigError("duration must lie in (0, T]");
    }
    if (output_length() < 2) {
        throw ConfigError("simulation yields fewer than two output samples");
    }
    if (scheme == Scheme::Euler) {
        const double lmax = schedule.lambda0;
        const double tmax = std::max(schedule.theta0, schedule.thetaT);
        if (lmax * integrator_step >= 2.0 || tmax * integrator_step >= 2.0) {
            throw ConfigError("unstable Euler step: rate * integrator_step must stay below 2");
        }
    }
}

namespace {

// (1 - exp(-x)) / x
double expm1c(double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }

// Gaussian transition of the (X, U) pair over one step of length h with
// frozen (lambda, theta, kappa).
class ExactRedStep {
public:
    void prepare(double lambda, double theta, double kappa, double h) {
        if (lambda == lambda_ && theta == theta_ && kappa == kappa_ && h == h_) {
            return;
        }
        lambda_ = lambda;
        theta_ = theta;
        kappa_ = kappa;
        h_ = h;

        const double a = std::min(lambda, theta);
        const double d = std::max(lambda, theta) - a;
        // (e^{-lambda s} - e^{-theta s}) / (theta - lambda), symmetric in the rates
        auto phi = [a, d](double s) { return s * std::exp(-a * s) * expm1c(d * s); };

        decay_x_ = std::exp(-lambda * h);
        decay_u_ = std::exp(-theta * h);
        couple_ = kappa * phi(h);

        // Covariance integrals over [0, h]; composite rule keeps rate * piece <= 1.
        const std::size_t pieces =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * std::max(lambda, theta) * h)));
        const double w = h / static_cast<double>(pieces);
        double qxu = 0.0;
        double qxx = 0.0;
        for (std::size_t i = 0; i < pieces; ++i) {
            const double lo = w * static_cast<double>(i);
            qxu += boost::math::quadrature::gauss<double, 20>::integrate(
                [&](double s) { return phi(s) * std::exp(-theta * s); }, lo, lo + w);
            qxx += boost::math::quadrature::gauss<double, 20>::integrate(
                [&](double s) {
                    const double f = phi(s);
                    return f * f;
                },
                lo, lo + w);
        }
        const double quu = h * expm1c(2.0 * theta * h);
        qxu *= kappa;
        qxx *= kappa * kappa;

        l11_ = std::sqrt(qxx);
        l21_ = l11_ > 0.0 ? qxu / l11_ : 0.0;
        l22_ = std::sqrt(std::max(0.0, quu - l21_ * l21_));
    }

    void apply(double& x, double& u, Rng& rng) const {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double xn = decay_x_ * x + couple_ * u + l11_ * z1;
        u = decay_u_ * u + l21_ * z1 + l22_ * z2;
        x = xn;
    }

private:
    double lambda_ = -1.0, theta_ = -1.0, kappa_ = -1.0, h_ = -1.0;
    double decay_x_ = 0.0, decay_u_ = 0.0, couple_ = 0.0;
    double l11_ = 0.0, l21_ = 0.0, l22_ = 0.0;
};

}  // namespace

TimeSeries integrate(const SimConfig& cfg) {
    cfg.validate();
    const ParameterSchedule& s = cfg.schedule;
    const double h = cfg.integrator_step;
    const double sqrt_h = std::sqrt(h);
    const std::size_t spo = cfg.steps_per_output();
    const std::size_t n_out = cfg.output_length();

    Rng rng(cfg.seed);
    double x = cfg.x0;
    double u = cfg.u0;
    ExactRedStep exact;

    auto step = [&](const ScheduleValue& p) {
        if (cfg.scheme == Scheme::Euler) {
            u += -p.theta * u * h + sqrt_h * rng.normal();
            x += (-p.lambda * x + p.kappa * u) * h;
        } else {
            exact.prepare(p.lambda, p.theta, p.kappa, h);
            exact.apply(x, u, rng);
        }
    };

    const ScheduleValue initial = schedule_eval(s, 0.0);
    for (std::size_t i = 0; i < cfg.burn_in * spo; ++i) {
        step(initial);
    }

    TimeSeries out;
    out.dt = cfg.output_step;
    out.t0 = cfg.output_step;
    out.values.resize(n_out);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n_out; ++k) {
        for (std::size_t i = 0; i < spo; ++i, ++j) {
            const double t = std::min(static_cast<double>(j) * h, s.T);
            step(schedule_eval(s, t));
        }
        out.values[k] = x;
    }
    return out;
}

TimeSeries simulate_stationary(const StabilityParams& p, std::size_t n, std::uint64_t seed, Scheme scheme,
                               double integrator_step) {
    if (n < 2) {
        throw DomainError("need at least two samples");
    }
    if (p.is_red()) {
        SimConfig cfg;
        cfg.schedule.T = static_cast<double>(n);
        cfg.schedule.lambda_path = LambdaPath::Constant;
        cfg.schedule.lambda0 = p.lambda();
        cfg.schedule.theta0 = cfg.schedule.thetaT = p.theta();
        cfg.schedule.kappa0 = cfg.schedule.kappaT = p.kappa();
        cfg.integrator_step = integrator_step;
        cfg.output_step = 1.0;
        cfg.seed = seed;
        cfg.scheme = scheme;
        cfg.burn_in = BURN_IN;
        return integrate(cfg);
    }

    const double h = integrator_step;
    const double ratio = 1.0 / h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("unit output step must be an integer multiple of the integrator step");
    }
    if (scheme == Scheme::Euler && p.lambda() * h >= 2.0) {
        throw ConfigError("unstable Euler step: rate * integrator_step must stay below 2");
    }
    const auto spo = static_cast<std::size_t>(std::llround(ratio));
    const double decay = std::exp(-p.lambda() * h);
    const double exact_sd = p.sigma() * std::sqrt(h * expm1c(2.0 * p.lambda() * h));
    const double euler_sd = p.sigma() * std::sqrt(h);

    Rng rng(seed);
    double x = 0.0;
    auto step = [&] {
        if (scheme == Scheme::Euler) {
            x += -p.lambda() * x * h + euler_sd * rng.normal();
        } else {
            x = decay * x + exact_sd * rng.normal();
        }
    };
    for (std::size_t i = 0; i < BURN_IN * spo; ++i) {
        step();
    }
    TimeSeries out;
    out.dt = 1.0;
    out.t0 = 1.0;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < spo; ++i) {
            step();
        }
        out.values[k] = x;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> arma_autocovariance(const ArmaCoeffs& c, std::size_t max_lag) {
    // Yule-Walker type equations for lags 0..2 with the MA(1) contributions:
    //   g0 - a1 g1 - a2 g2 = s0^2 + s1 (a1 s0 + s1)
    //  -a1 g0 + (1 - a2) g1 = s0 s1
    //  -a2 g0 - a1 g1 + g2  = 0
    const double a1 = c.ar1;
    const double a2 = c.ar2;
    const double s0 = c.sigma0;
    const double s1 = c.sigma1;
    std::array<std::array<double, 4>, 3> m{{
        {1.0, -a1, -a2, s0 * s0 + s1 * (a1 * s0 + s1)},
        {-a1, 1.0 - a2, 0.0, s0 * s1},
        {-a2, -a1, 1.0, 0.0},
    }};
    for (std::size_t col = 0; col < 3; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) {
                piv = r;
            }
        }
        std::swap(m[col], m[piv]);
        if (m[col][col] == 0.0) {
            throw DomainError("AR part is not stationary");
        }
        for (std::size_t r = 0; r < 3; ++r) {
            if (r == col) {
                continue;
            }
            const double f = m[r][col] / m[col][col];
            for (std::size_t k = col; k < 4; ++k) {
                m[r][k] -= f * m[col][k];
            }
        }
    }
    std::vector<double> g(std::max<std::size_t>(max_lag + 1, 3));
    for (std::size_t i = 0; i < 3; ++i) {
        g[i] = m[i][3] / m[i][i];
    }
    for (std::size_t k = 3; k < g.size(); ++k) {
        g[k] = a1 * g[k - 1] + a2 * g[k - 2];
    }
    g.resize(max_lag + 1);
    return g;
}

ArmaCoeffs solve_arma_coeffs(const StabilityParams& p) {
    if (!p.is_red()) {
        throw DomainError("ARMA(2,1) representation requires red-noise parameters");
    }
    ArmaCoeffs c;
    c.ar1 = std::exp(-p.lambda()) + std::exp(-p.theta());
    c.ar2 = -std::exp(-(p.lambda() + p.theta()));

    const double g0 = stationary_variance(p);
    const double rho1 = stationary_ac(p, 1.0);
    const double g1 = g0 * rho1;
    const double g2 = c.ar1 * g1 + c.ar2 * g0;

    // F1 = s0 s1 - prod,  F2 = s0^2 + a1 s0 s1 + s1^2 - quad
    const double prod = (1.0 - c.ar2) * g1 - c.ar1 * g0;
    const double quad = g0 - c.ar1 * g1 - c.ar2 * g2;

    double s0 = std::sqrt(std::max(
        g0 * (1.0 - c.ar1 * c.ar1 - c.ar2 * c.ar2 - 2.0 * c.ar1 * c.ar2 * rho1), 1e-300));
    double s1 = 0.0;
    double residual = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double f1 = s0 * s1 - prod;
        const double f2 = s0 * s0 + c.ar1 * s0 * s1 + s1 * s1 - quad;
        residual = std::max(std::abs(f1), std::abs(f2)) / g0;
        if (residual < 1e-14) {
            break;
        }
        const double j11 = s1;
        const double j12 = s0;
        const double j21 = 2.0 * s0 + c.ar1 * s1;
        const double j22 = c.ar1 * s0 + 2.0 * s1;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) {
            break;
        }
        s0 -= (j22 * f1 - j12 * f2) / det;
        s1 -= (-j21 * f1 + j11 * f2) / det;
    }
    // (s0, s1) and (s1, s0) give identical moments; keep the invertible root.
    if (std::abs(s1) > std::abs(s0)) {
        std::swap(s0, s1);
    }
    if (s0 < 0.0) {
        s0 = -s0;
        s1 = -s1;
    }
    c.sigma0 = s0;
    c.sigma1 = s1;

    const auto implied = arma_autocovariance(c, 1);
    residual = std::max(std::abs(implied[0] - g0), std::abs(implied[1] - g1)) / g0;
    if (!(residual < 1e-10) || !(s0 > 0.0)) {
        throw EstimationError("ARMA(2,1) moment matching did not converge", residual);
    }
    return c;
}

TimeSeries simulate_arma(const ArmaCoeffs& c, std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw DomainError("need at least two samples");
    }
    Rng rng(seed);
    double x_prev = 0.0;
    double x = 0.0;
    double z_prev = 0.0;
    auto step = [&] {
        const double z = rng.normal();
        const double next = c.ar1 * x + c.ar2 * x_prev + c.sigma0 * z + c.sigma1 * z_prev;
        x_prev = x;
        x = next;
        z_prev = z;
    };
    for (std::size_t i = 0; i < BURN_IN; ++i) {
        step();
    }
    TimeSeries out;
    out.dt = 1.0;
    out.t0 = 0.0;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        step();
        out.values[k] = x;
    }
    return out;
}

// ---------------------------------------------------------------------------

PairedSeries integrate_conceptual(const ConceptualConfig& cfg) {
    if (!cfg.lambda || !cfg.theta || !cfg.kappa_v || !cfg.kappa_p || !cfg.v_equilibrium ||
        !cfg.p_equilibrium) {
        throw ConfigError("conceptual model needs all six parameter functions");
    }
    if (!(cfg.integrator_step > 0.0) || !(cfg.output_step > 0.0) || !(cfg.duration > 0.0)) {
        throw ConfigError("steps and duration must be positive");
    }
    const double ratio = cfg.output_step / cfg.integrator_step;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("output step must be an integer multiple of the integrator step");
    }
    const auto spo = static_cast<std::size_t>(std::llround(ratio));
    const auto n_out = static_cast<std::size_t>(std::llround(cfg.duration / cfg.output_step));
    const double h = cfg.integrator_step;
    const double sqrt_h = std::sqrt(h);

    Rng rng(cfg.seed);
    double v = cfg.v_equilibrium(0.0);
    double pr = cfg.p_equilibrium(0.0);

    PairedSeries out;
    out.v.dt = out.p.dt = cfg.output_step;
    out.v.t0 = out.p.t0 = cfg.output_step;
    out.v.values.resize(n_out);
    out.p.values.resize(n_out);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n_out; ++k) {
        for (std::size_t i = 0; i < spo; ++i, ++j) {
            const double t = static_cast<double>(j) * h;
            const double p_dev = pr - cfg.p_equilibrium(t);
            pr += -cfg.theta(t) * p_dev * h + cfg.kappa_p(t) * sqrt_h * rng.normal();
            const double p_dev_new = pr - cfg.p_equilibrium(t);
            v += (-cfg.lambda(t) * (v - cfg.v_equilibrium(t)) + cfg.kappa_v(t) * p_dev_new) * h;
        }
        out.v.values[k] = v;
        out.p.values[k] = pr;
    }
    return out;
}

}  // namespace redcsd

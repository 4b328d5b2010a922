#include "redcsd/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/tools/minima.hpp>

#include "redcsd/error.hpp"
#include "redcsd/model.hpp"
#include "redcsd/nelder_mead.hpp"

namespace redcsd {

std::string_view to_string(FitResult::Kind kind) {
    switch (kind) {
        case FitResult::Kind::Red: return "red";
        case FitResult::Kind::White: return "white";
        case FitResult::Kind::Failed: break;
    }
    return "failed";
}

std::vector<double> centered(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    if (out.empty()) {
        return out;
    }
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
    for (double& v : out) {
        v -= mean;
    }
    return out;
}

double var_hat(std::span<const double> x) {
    if (x.size() < 2) {
        throw DomainError("variance estimate needs at least two samples");
    }
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s / static_cast<double>(x.size());
}

double var_hat(const TimeSeries& x) { return var_hat(x.view()); }

double ac_hat(std::span<const double> x, std::size_t tau) {
    const std::size_t n = x.size();
    if (tau < 1 || tau >= n) {
        throw DomainError("lag must satisfy 1 <= tau < N");
    }
    double num = 0.0;
    for (std::size_t k = 0; k + tau < n; ++k) {
        num += x[k] * x[k + tau];
    }
    double den = 0.0;
    for (double v : x) {
        den += v * v;
    }
    if (den == 0.0) {
        return FitResult::nan;
    }
    return static_cast<double>(n) / static_cast<double>(n - tau) * num / den;
}

double ac_hat(const TimeSeries& x, std::size_t tau) { return ac_hat(x.view(), tau); }

namespace {

// Feasible set {0 < lambda < theta} in unconstrained coordinates:
// u = ln lambda, v = ln(theta - lambda).
constexpr double U_MIN = -20.0;
constexpr double U_MAX = 5.0;
constexpr double V_MIN = -20.0;
constexpr double V_MAX = 25.0;

struct Rates {
    double lambda;
    double theta;
    double excess;  // distance outside the clamp box
};

Rates to_rates(double u, double v) {
    const double uc = std::clamp(u, U_MIN, U_MAX);
    const double vc = std::clamp(v, V_MIN, V_MAX);
    const double excess = (u - uc) * (u - uc) + (v - vc) * (v - vc);
    const double lambda = std::exp(uc);
    return {lambda, lambda + std::exp(vc), excess};
}

constexpr std::array<double, 3> START_LAMBDA{0.1, 0.3, 0.5};
constexpr std::array<double, 2> START_THETA{1.0, 3.0};

struct BestFit {
    optim::NelderMeadResult<2> result;
    int evaluations = 0;
    bool any_converged = false;
};

template <class Objective>
BestFit multistart(Objective&& objective) {
    BestFit best;
    best.result.value = std::numeric_limits<double>::infinity();
    for (double ls : START_LAMBDA) {
        for (double ts : START_THETA) {
            const std::array<double, 2> x0{std::log(ls), std::log(ts - ls)};
            auto r = optim::nelder_mead<2>(objective, x0, {0.5, 0.5});
            best.evaluations += r.evaluations;
            if (!r.converged || !std::isfinite(r.value)) {
                continue;
            }
            if (!best.any_converged || r.value < best.result.value) {
                best.result = r;
            }
            best.any_converged = true;
        }
    }
    return best;
}

double acs_objective(std::span<const double> targets, double lambda, double theta) {
    const auto p = StabilityParams::red(lambda, theta, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double r = targets[i] - stationary_ac(p, static_cast<double>(i + 1));
        s += r * r;
    }
    return s;
}

}  // namespace

FitResult fit_acs_targets(std::span<const double> targets) {
    if (targets.empty()) {
        return FitResult::failed("no autocorrelation targets");
    }
    for (double t : targets) {
        if (!std::isfinite(t)) {
            return FitResult::failed("non-finite autocorrelation estimate");
        }
    }
    auto objective = [&](const std::array<double, 2>& z) {
        const Rates r = to_rates(z[0], z[1]);
        return acs_objective(targets, r.lambda, r.theta) + r.excess;
    };
    const BestFit best = multistart(objective);
    if (!best.any_converged) {
        return FitResult::failed("simplex search did not converge from any start", best.evaluations);
    }
    const Rates r = to_rates(best.result.x[0], best.result.x[1]);

    FitResult out;
    out.objective = best.result.value;
    out.iterations = best.evaluations;
    if (r.theta > THETA_WHITE_CUTOFF) {
        const double ac1 = targets[0];
        if (!(ac1 > 0.0 && ac1 < 1.0)) {
            return FitResult::failed("white limit with lag-1 autocorrelation outside (0, 1)", best.evaluations);
        }
        out.kind = FitResult::Kind::White;
        out.lambda = -std::log(ac1);
        return out;
    }
    out.kind = FitResult::Kind::Red;
    out.lambda = r.lambda;
    out.theta = r.theta;
    return out;
}

FitResult fit_acs(std::span<const double> x, std::size_t tau_max) {
    if (tau_max < 1 || tau_max >= x.size()) {
        throw DomainError("tau_max must satisfy 1 <= tau_max < N");
    }
    std::vector<double> targets(tau_max);
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        targets[tau - 1] = ac_hat(x, tau);
    }
    FitResult r = fit_acs_targets(targets);
    if (r.kind == FitResult::Kind::White) {
        r.sigma = std::sqrt(2.0 * r.lambda * var_hat(x));
    }
    return r;
}

FitResult fit_acs(const TimeSeries& x, std::size_t tau_max) { return fit_acs(x.view(), tau_max); }

// ---------------------------------------------------------------------------

FitResult fit_psd_periodogram(const Periodogram& pg) {
    const std::size_t m = pg.size();
    if (m < 3) {
        return FitResult::failed("too few periodogram bins to fit three parameters");
    }
    bool any_power = false;
    std::vector<double> log_power(m);
    std::vector<double> omc(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(pg.power[j]) || pg.power[j] < 0.0) {
            return FitResult::failed("invalid periodogram value");
        }
        any_power = any_power || pg.power[j] > 0.0;
        log_power[j] = std::log(pg.power[j] + EPS_POWER);
        omc[j] = detail::one_minus_cos(pg.frequencies[j]);
    }
    if (!any_power) {
        return FitResult::failed("periodogram is identically zero");
    }

    // The kappa^2 factor is an additive log offset; profile it out.
    std::vector<double> resid(m);
    auto profiled = [&](auto&& log_shape) {
        double mean = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            resid[j] = log_power[j] - log_shape(j);
            mean += resid[j];
        }
        mean /= static_cast<double>(m);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = resid[j] - mean;
            s += d * d;
        }
        return std::pair{s, mean};
    };
    auto red_eval = [&](double lambda, double theta) {
        const detail::DtPsdShape shape(lambda, theta);
        return profiled([&](std::size_t j) {
            const double v = shape(omc[j]);
            return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
        });
    };

    auto objective = [&](const std::array<double, 2>& z) {
        const Rates r = to_rates(z[0], z[1]);
        return red_eval(r.lambda, r.theta).first + r.excess;
    };
    const BestFit best = multistart(objective);
    if (!best.any_converged) {
        return FitResult::failed("simplex search did not converge from any start", best.evaluations);
    }
    const Rates r = to_rates(best.result.x[0], best.result.x[1]);

    FitResult out;
    out.iterations = best.evaluations;
    if (r.theta <= THETA_WHITE_CUTOFF) {
        const auto [obj, offset] = red_eval(r.lambda, r.theta);
        out.kind = FitResult::Kind::Red;
        out.lambda = r.lambda;
        out.theta = r.theta;
        out.kappa = std::exp(0.5 * offset);
        out.objective = obj;
        return out;
    }

    // White limit: S(w) = sigma^2 / (2 lambda) * sinh(lambda) / (cosh(lambda) - cos w).
    auto white_eval = [&](double lambda) {
        return profiled([&](std::size_t j) { return std::log(detail::dt_kernel(lambda, omc[j])); });
    };
    boost::uintmax_t max_iter = 200;
    const auto [u_best, f_best] = boost::math::tools::brent_find_minima(
        [&](double u) { return white_eval(std::exp(u)).first; }, U_MIN, U_MAX, 40, max_iter);
    const double lambda = std::exp(u_best);
    const double offset = white_eval(lambda).second;
    out.kind = FitResult::Kind::White;
    out.lambda = lambda;
    out.sigma = std::sqrt(2.0 * lambda * std::exp(offset));
    out.objective = f_best;
    out.iterations += static_cast<int>(max_iter);
    return out;
}

FitResult fit_psd(std::span<const double> x, std::size_t block_size) {
    return fit_psd_periodogram(periodogram(x, block_size));
}

FitResult fit_psd(const TimeSeries& x, std::size_t block_size) { return fit_psd(x.view(), block_size); }

// ---------------------------------------------------------------------------

namespace {

struct LineFit {
    double intercept;
    double slope;
    bool ok;
};

// OLS of y on [1, x].
LineFit ols(std::span<const double> xs, std::span<const double> ys, std::span<const double> ones) {
    double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s11 += ones[i] * ones[i];
        s1x += ones[i] * xs[i];
        sxx += xs[i] * xs[i];
        s1y += ones[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    const double det = s11 * sxx - s1x * s1x;
    const double scale = s11 * sxx;
    if (!(det > 1e-12 * scale) || scale == 0.0) {
        return {0.0, 0.0, false};
    }
    return {(sxx * s1y - s1x * sxy) / det, (s11 * sxy - s1x * s1y) / det, true};
}

}  // namespace

ScalarEstimate fit_glsar(std::span<const double> x) {
    ScalarEstimate out;
    const std::size_t n = x.size();
    if (n < 10) {
        out.reason = "GLS regression needs at least 10 samples";
        return out;
    }
    const std::size_t m = n - 1;
    std::vector<double> reg(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<double> inc(m);
    for (std::size_t k = 0; k < m; ++k) {
        inc[k] = x[k + 1] - x[k];
    }
    std::vector<double> ones(m, 1.0);

    LineFit fit = ols(reg, inc, ones);
    if (!fit.ok) {
        out.reason = "singular regression (constant regressor)";
        return out;
    }

    std::vector<double> ys(m - 1), xs(m - 1), cs(m - 1), e(m);
    double rho = 0.0;
    int it = 0;
    for (; it < 50; ++it) {
        for (std::size_t k = 0; k < m; ++k) {
            e[k] = inc[k] - fit.intercept - fit.slope * reg[k];
        }
        double num = 0.0, den = 0.0;
        for (std::size_t k = 1; k < m; ++k) {
            num += e[k] * e[k - 1];
            den += e[k - 1] * e[k - 1];
        }
        const double rho_new = den > 0.0 ? num / den : 0.0;
        for (std::size_t k = 1; k < m; ++k) {
            ys[k - 1] = inc[k] - rho_new * inc[k - 1];
            xs[k - 1] = reg[k] - rho_new * reg[k - 1];
            cs[k - 1] = 1.0 - rho_new;
        }
        const LineFit next = ols(xs, ys, cs);
        if (!next.ok) {
            out.reason = "singular regression after quasi-differencing";
            out.iterations = it + 1;
            return out;
        }
        fit = next;
        const bool done = std::abs(rho_new - rho) < 1e-6;
        rho = rho_new;
        if (done) {
            ++it;
            break;
        }
    }
    out.value = 1.0 + fit.slope;
    out.iterations = it;
    return out;
}

ScalarEstimate fit_glsar(const TimeSeries& x) { return fit_glsar(x.view()); }

ScalarEstimate theta_from_ou(std::span<const double> x) {
    ScalarEstimate out;
    const double ac = ac_hat(x, 1);
    if (!(ac > 0.0 && ac < 1.0)) {
        out.reason = "lag-1 autocorrelation outside (0, 1); no OU fit";
        return out;
    }
    out.value = -std::log(ac);
    return out;
}

ScalarEstimate theta_from_ou(const TimeSeries& x) { return theta_from_ou(x.view()); }

}  // namespace redcsd

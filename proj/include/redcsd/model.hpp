#pragma once

#include <string_view>

namespace redcsd {

/// Relative gap below which lambda and theta are treated as equal.
inline constexpr double EQ_EPS = 1e-8;

/// Noise correlation rate above which a red-noise fit is reported as white.
inline constexpr double THETA_WHITE_CUTOFF = 50.0;

/**
 * Parameters of the linear restoring model.
 *
 * Red:   dX = -lambda X dt + kappa U dt,  dU = -theta U dt + dW
 * White: dX = -lambda X dt + sigma dW
 *
 * Rates are per unit time; the discrete-time quantities below assume a
 * sampling step of one time unit.
 */
class StabilityParams {
public:
    enum class Kind { Red, White };

    static StabilityParams red(double lambda, double theta, double kappa);
    static StabilityParams white(double lambda, double sigma);

    Kind kind() const noexcept { return kind_; }
    bool is_red() const noexcept { return kind_ == Kind::Red; }

    double lambda() const noexcept { return lambda_; }
    double theta() const noexcept { return theta_; }  ///< Red only.
    double kappa() const noexcept { return kappa_; }  ///< Red only.
    double sigma() const noexcept { return sigma_; }  ///< White only.

    /// Same statistics with lambda and theta exchanged (Red only).
    StabilityParams swapped() const;

private:
    StabilityParams(Kind kind, double lambda, double theta, double kappa, double sigma)
        : kind_(kind), lambda_(lambda), theta_(theta), kappa_(kappa), sigma_(sigma) {}

    Kind kind_;
    double lambda_;
    double theta_;
    double kappa_;
    double sigma_;
};

double stationary_variance(const StabilityParams& p);

/// Autocorrelation at a non-negative lag (time units).
double stationary_ac(const StabilityParams& p, double tau);

/// Continuous-time spectral density at angular frequency omega.
double psd_continuous(const StabilityParams& p, double omega);

/// Spectral density of the process sampled at unit step, S(w) = sum_k gamma(k) e^{-iwk}.
/// Periodic in omega with period 2 pi; defined for any finite omega.
double psd_discrete(const StabilityParams& p, double omega);

namespace detail {

/// Red-noise discrete-time spectral shape for unit kappa, prepared for
/// repeated evaluation at many frequencies.  Frequencies are passed as
/// 1 - cos(omega) to keep precision near omega = 0.
class DtPsdShape {
public:
    DtPsdShape(double lambda, double theta);

    double operator()(double one_minus_cos) const;

private:
    enum class Regime { Equal, NearEqual, General };

    Regime regime_;
    double a_;  // smaller rate
    double b_;  // larger rate
    double scale_;
    // exp(-x), -expm1(-x), -expm1(-2x) for x = a, b
    double ea_, qa_, q2a_;
    double eb_, qb_, q2b_;
    // near-equal / equal terms
    double mid_, cosh_mid_, sinh_mid_, sinhc_d_, sinhc_half_d_;
    double cosh_a_m1_, cosh_b_m1_;
};

/// sinh(x) / (cosh(x) - cos(omega)) as a function of 1 - cos(omega).
double dt_kernel(double x, double one_minus_cos);

/// 1 - cos(omega) without cancellation near zero.
double one_minus_cos(double omega);

}  // namespace detail

// ---------------------------------------------------------------------------

enum class LambdaPath { Fold, Constant };

std::string_view to_string(LambdaPath path);
LambdaPath lambda_path_from_string(std::string_view name);

struct ScheduleValue {
    double lambda;
    double theta;
    double kappa;
};

/**
 * Deterministic parameter evolution over [0, T].
 *
 * theta and kappa interpolate linearly between their endpoint values over
 * [0, f T] and are held afterwards.  The fold path follows
 * lambda0 sqrt(1 - t/T) on the global time coordinate up to f T, so a
 * truncated run sees only the first fraction f of the decline.
 */
struct ParameterSchedule {
    double T = 14000.0;
    LambdaPath lambda_path = LambdaPath::Fold;
    double lambda0 = 0.4;
    double theta0 = 1.0;
    double thetaT = 1.0;
    double kappa0 = 1.0;
    double kappaT = 1.0;
    double trend_fraction = 1.0;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

ScheduleValue schedule_eval(const ParameterSchedule& s, double t);

}  // namespace redcsd

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "redcsd/model.hpp"

namespace redcsd {

/// Uniformly sampled series; sample k sits at t0 + k dt.
struct TimeSeries {
    std::vector<double> values;
    double dt = 1.0;
    double t0 = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    std::span<const double> view() const noexcept { return values; }

    /// Samples [begin, begin + count) as a new series with shifted origin.
    TimeSeries slice(std::size_t begin, std::size_t count) const;

    /// Throws DomainError unless dt > 0, length >= 2 and all values finite.
    void validate() const;
};

/// Samples discarded before stationary draws are recorded.
inline constexpr std::size_t BURN_IN = 1000;

enum class Scheme {
    Euler,  ///< Euler-Maruyama on (X, U); the benchmark integrator.
    Exact,  ///< Exact Gaussian transition with parameters frozen over each step.
};

struct SimConfig {
    ParameterSchedule schedule;
    double integrator_step = 0.1;
    double output_step = 1.0;
    /// Simulated span; defaults to trend_fraction * T.
    std::optional<double> duration;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    double u0 = 0.0;
    Scheme scheme = Scheme::Euler;
    /// Output intervals integrated at the t = 0 parameters before recording starts.
    std::size_t burn_in = 0;

    double effective_duration() const;
    std::size_t steps_per_output() const;
    std::size_t output_length() const;

    /// Throws ConfigError for inconsistent steps or an unstable Euler step.
    void validate() const;
};

/// Integrates the red-noise model under the configured schedule.  Sample k
/// is the state at time (k + 1) * output_step.  Deterministic in the seed.
TimeSeries integrate(const SimConfig& cfg);

/// Stationary path of constant parameters after a BURN_IN-sample transient,
/// sampled at unit step.  Red uses the (X, U) pair; White the plain OU process.
TimeSeries simulate_stationary(const StabilityParams& p, std::size_t n, std::uint64_t seed,
                               Scheme scheme = Scheme::Exact, double integrator_step = 0.1);

// ---------------------------------------------------------------------------

/// X_{k+1} = ar1 X_k + ar2 X_{k-1} + sigma0 z_k + sigma1 z_{k-1}
struct ArmaCoeffs {
    double ar1 = 0.0;
    double ar2 = 0.0;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
};

/// Autocovariances at lags 0..max_lag implied by an ARMA(2,1) model.
std::vector<double> arma_autocovariance(const ArmaCoeffs& c, std::size_t max_lag);

/// Coefficients whose ARMA(2,1) process matches the red-noise model sampled
/// at unit step.  AR part is closed form; the MA pair is found by Newton
/// iteration on the lag-0 and lag-1 autocovariances and normalized to the
/// invertible root with sigma0 > 0.  Throws EstimationError if the solve
/// does not reach a relative residual of 1e-10.
ArmaCoeffs solve_arma_coeffs(const StabilityParams& p);

TimeSeries simulate_arma(const ArmaCoeffs& c, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------

/**
 * Conceptual paired model of an observable V driven by a correlated
 * forcing P relaxing to moving equilibria:
 *
 *   dV = -lambda(t) (V - Veq(t)) dt + kappa_v(t) (P - Peq(t)) dt
 *   dP = -theta(t)  (P - Peq(t)) dt + kappa_p(t) dW
 */
struct ConceptualConfig {
    std::function<double(double)> lambda;
    std::function<double(double)> theta;
    std::function<double(double)> kappa_v;
    std::function<double(double)> kappa_p;
    std::function<double(double)> v_equilibrium;
    std::function<double(double)> p_equilibrium;
    double duration = 6000.0;
    double integrator_step = 0.1;
    double output_step = 1.0;
    std::uint64_t seed = 0;
};

struct PairedSeries {
    TimeSeries v;
    TimeSeries p;
};

PairedSeries integrate_conceptual(const ConceptualConfig& cfg);

}  // namespace redcsd

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "redcsd/simulate.hpp"
#include "redcsd/spectral.hpp"

namespace redcsd {

/**
 * Outcome of a constrained model fit.  Rates are per sample.
 *
 * Red:   0 < lambda < theta; kappa set by the PSD fit only.
 * White: theta ran past THETA_WHITE_CUTOFF; lambda (and sigma when
 *        available) come from the white-noise model.
 */
struct FitResult {
    enum class Kind { Red, White, Failed };

    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    Kind kind = Kind::Failed;
    double lambda = nan;
    double theta = nan;
    double kappa = nan;
    double sigma = nan;
    double objective = nan;
    int iterations = 0;
    std::string reason;

    bool ok() const noexcept { return kind != Kind::Failed; }

    static FitResult failed(std::string why, int iterations = 0) {
        FitResult r;
        r.reason = std::move(why);
        r.iterations = iterations;
        return r;
    }
};

std::string_view to_string(FitResult::Kind kind);

/// Scalar estimate that may fail (GLS slope, OU rate).
struct ScalarEstimate {
    double value = FitResult::nan;
    std::string reason;  ///< empty on success
    int iterations = 0;

    bool ok() const noexcept { return reason.empty(); }
};

/// Floor added to periodogram power before taking logarithms.
inline constexpr double EPS_POWER = 1e-300;

// Estimators take centered data: no mean is removed here.

/// (1/N) sum x_k^2.  Throws DomainError below two samples.
double var_hat(std::span<const double> x);
double var_hat(const TimeSeries& x);

/// (N/(N - tau)) sum x_k x_{k+tau} / sum x_k^2.  NaN for a zero series.
/// Throws DomainError unless 1 <= tau < N.
double ac_hat(std::span<const double> x, std::size_t tau);
double ac_hat(const TimeSeries& x, std::size_t tau);

/// Least-squares fit of the red-noise autocorrelation at lags 1..tau_max.
FitResult fit_acs(std::span<const double> x, std::size_t tau_max = 3);
FitResult fit_acs(const TimeSeries& x, std::size_t tau_max = 3);

/// Same fit against given autocorrelation targets for lags 1..targets.size().
FitResult fit_acs_targets(std::span<const double> targets);

/// Least-squares fit of log periodogram against the discrete-time red-noise
/// spectrum, smoothed over blocks of `block_size` bins.
FitResult fit_psd(std::span<const double> x, std::size_t block_size = 10);
FitResult fit_psd(const TimeSeries& x, std::size_t block_size = 10);

/// Same fit against a prepared periodogram.
FitResult fit_psd_periodogram(const Periodogram& pg);

/// AR(1) coefficient from regressing increments on the state with
/// AR(1)-correlated errors (iterated Cochrane-Orcutt with intercept).
ScalarEstimate fit_glsar(std::span<const double> x);
ScalarEstimate fit_glsar(const TimeSeries& x);

/// Correlation rate of an OU series from its lag-1 autocorrelation.
ScalarEstimate theta_from_ou(std::span<const double> x);
ScalarEstimate theta_from_ou(const TimeSeries& x);

/// Copy of x with its mean removed.
std::vector<double> centered(std::span<const double> x);

}  // namespace redcsd

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace redcsd::optim {

struct NelderMeadOptions {
    double ftol_rel = 1e-8;   ///< spread of vertex values relative to the best value
    double ftol_abs = 1e-20;  ///< absolute floor for zero-residual problems
    double xtol = 1e-10;      ///< simplex diameter in parameter space
    int max_evaluations = 4000;
    int restarts = 1;         ///< fresh simplex around the optimum after convergence
};

template <std::size_t D>
struct NelderMeadResult {
    std::array<double, D> x{};
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex descent (standard coefficients 1, 2, 1/2, 1/2).
template <std::size_t D, class Objective>
NelderMeadResult<D> nelder_mead(Objective&& f, std::array<double, D> x0, std::array<double, D> step,
                                const NelderMeadOptions& opt = {}) {
    using Point = std::array<double, D>;
    NelderMeadResult<D> res;

    auto eval = [&](const Point& p) {
        ++res.evaluations;
        const double v = f(p);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Point, D + 1> pts;
    std::array<double, D + 1> val;
    bool converged = false;

    for (int round = 0; round <= opt.restarts; ++round) {
        pts[0] = x0;
        val[0] = eval(x0);
        for (std::size_t i = 0; i < D; ++i) {
            pts[i + 1] = x0;
            pts[i + 1][i] += step[i];
            val[i + 1] = eval(pts[i + 1]);
        }
        converged = false;

        while (res.evaluations < opt.max_evaluations) {
            std::array<std::size_t, D + 1> order;
            for (std::size_t i = 0; i <= D; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
            {
                std::array<Point, D + 1> p2;
                std::array<double, D + 1> v2;
                for (std::size_t i = 0; i <= D; ++i) {
                    p2[i] = pts[order[i]];
                    v2[i] = val[order[i]];
                }
                pts = p2;
                val = v2;
            }

            const double spread = val[D] - val[0];
            double diam = 0.0;
            for (std::size_t i = 1; i <= D; ++i) {
                for (std::size_t k = 0; k < D; ++k) {
                    diam = std::max(diam, std::abs(pts[i][k] - pts[0][k]));
                }
            }
            if ((std::isfinite(spread) && spread <= opt.ftol_abs + opt.ftol_rel * std::abs(val[0])) ||
                diam <= opt.xtol) {
                converged = true;
                break;
            }

            Point centroid{};
            for (std::size_t i = 0; i < D; ++i) {
                for (std::size_t k = 0; k < D; ++k) centroid[k] += pts[i][k] / static_cast<double>(D);
            }
            auto along = [&](double t) {
                Point p;
                for (std::size_t k = 0; k < D; ++k) p[k] = centroid[k] + t * (pts[D][k] - centroid[k]);
                return p;
            };

            const Point xr = along(-1.0);
            const double fr = eval(xr);
            if (fr < val[0]) {
                const Point xe = along(-2.0);
                const double fe = eval(xe);
                if (fe < fr) {
                    pts[D] = xe;
                    val[D] = fe;
                } else {
                    pts[D] = xr;
                    val[D] = fr;
                }
            } else if (fr < val[D - 1]) {
                pts[D] = xr;
                val[D] = fr;
            } else {
                const bool outside = fr < val[D];
                const Point xc = along(outside ? -0.5 : 0.5);
                const double fc = eval(xc);
                if (fc < (outside ? fr : val[D])) {
                    pts[D] = xc;
                    val[D] = fc;
                } else {
                    for (std::size_t i = 1; i <= D; ++i) {
                        for (std::size_t k = 0; k < D; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                        val[i] = eval(pts[i]);
                    }
                }
            }
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i <= D; ++i) {
            if (val[i] < val[best]) best = i;
        }
        res.x = pts[best];
        res.value = val[best];
        x0 = res.x;
        for (auto& s : step) s *= 0.25;
        if (!converged) break;
    }
    res.converged = converged;
    return res;
}

}  // namespace redcsd::optim

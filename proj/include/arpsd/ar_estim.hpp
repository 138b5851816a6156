#pragma once

/** @file
 * Autoregressive parameter estimation: Levinson–Durbin, Yule–Walker, Burg,
 * and the periodogram-likelihood variance estimate, plus the AR spectrum.
 *
 * Every model uses the prediction-error sign convention of ArModel,
 * i.e. A(f) = 1 + a(1) exp(-j2 pi f) + ... + a(p) exp(-j2 pi f p).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arpsd/core_types.hpp"
#include "arpsd/preprocess.hpp"

namespace arpsd {

enum class FitMethod { YuleWalker, Burg, Mle };

[[nodiscard]] inline std::string_view to_string(FitMethod m) noexcept
{
    switch (m) {
    case FitMethod::YuleWalker: return "yw";
    case FitMethod::Burg: return "burg";
    case FitMethod::Mle: return "mle";
    }
    return "?";
}

[[nodiscard]] inline std::string_view display_name(FitMethod m) noexcept
{
    switch (m) {
    case FitMethod::YuleWalker: return "Yule-Walker";
    case FitMethod::Burg: return "Burg";
    case FitMethod::Mle: return "MLE";
    }
    return "?";
}

[[nodiscard]] inline FitMethod parse_fit_method(std::string_view s)
{
    if (s == "yw" || s == "yule-walker")
        return FitMethod::YuleWalker;
    if (s == "burg")
        return FitMethod::Burg;
    if (s == "mle")
        return FitMethod::Mle;
    throw std::invalid_argument("unknown fit method '" + std::string(s) + "'");
}

struct FitResult {
    ArModel model;
    FitMethod method = FitMethod::YuleWalker;
    /// k(1..p)
    std::vector<double> reflection_coeffs;
    /// Innovation variance of the order-m model for m = 0..p.
    std::vector<double> prediction_error_by_order;
};

/// Step-up recursion: reflection coefficients k(1..p) to coefficients a(1..p).
[[nodiscard]] inline std::vector<double> reflection_to_coeffs(std::span<const double> k)
{
    std::vector<double> a;
    a.reserve(k.size());
    for (double km : k) {
        const std::size_t m = a.size();
        std::vector<double> next(m + 1);
        for (std::size_t i = 0; i < m; ++i)
            next[i] = a[i] + km * a[m - 1 - i];
        next[m] = km;
        a = std::move(next);
    }
    return a;
}

/**
 * Step-down (inverse Levinson) recursion.  Throws std::domain_error with
 * "unstable AR polynomial" as soon as some |k| >= 1.
 */
[[nodiscard]] inline std::vector<double> coeffs_to_reflection(std::span<const double> coeffs)
{
    std::vector<double> a(coeffs.begin(), coeffs.end());
    std::vector<double> k(a.size());
    for (std::size_t m = a.size(); m > 0; --m) {
        const double km = a[m - 1];
        if (!(std::abs(km) < 1.0))
            throw std::domain_error("unstable AR polynomial");
        k[m - 1] = km;
        const double scale = 1.0 / (1.0 - km * km);
        std::vector<double> prev(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i)
            prev[i] = (a[i] - km * a[m - 2 - i]) * scale;
        a = std::move(prev);
    }
    return k;
}

[[nodiscard]] inline bool is_stable(const ArModel& model)
{
    try {
        (void)coeffs_to_reflection(model.coeffs);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

/**
 * Solves sum_i a(i) r(l-i) = -r(l), l = 1..p, by the order recursion.
 * Intermediate reflection coefficients and innovation variances of every
 * order 0..p are kept.
 */
[[nodiscard]] inline FitResult levinson_durbin(const AutocovarianceSeq& r, std::size_t p)
{
    if (p == 0)
        throw std::invalid_argument("AR order must be positive");
    if (r.values.size() < p + 1)
        throw std::invalid_argument("autocovariance has " + std::to_string(r.values.size()) +
                                    " lags, order " + std::to_string(p) + " needs " + std::to_string(p + 1));
    if (!(r.values[0] > 0.0))
        throw std::domain_error("degenerate autocovariance");

    FitResult out;
    out.method = FitMethod::YuleWalker;
    out.reflection_coeffs.reserve(p);
    out.prediction_error_by_order.reserve(p + 1);

    std::vector<double> a;
    a.reserve(p);
    double err = r.values[0];
    out.prediction_error_by_order.push_back(err);
    for (std::size_t m = 1; m <= p; ++m) {
        double acc = r.values[m];
        for (std::size_t i = 1; i < m; ++i)
            acc += a[i - 1] * r.values[m - i];
        const double k = -acc / err;
        if (!(std::abs(k) < 1.0))
            throw std::domain_error("non-positive-definite autocovariance");
        std::vector<double> next(m);
        for (std::size_t i = 1; i < m; ++i)
            next[i - 1] = a[i - 1] + k * a[m - i - 1];
        next[m - 1] = k;
        a = std::move(next);
        err *= (1.0 - k * k);
        out.reflection_coeffs.push_back(k);
        out.prediction_error_by_order.push_back(err);
    }
    // sigma2 = r(0) + sum a(i) r(i); equal to err up to rounding.
    double sigma2 = r.values[0];
    for (std::size_t i = 1; i <= p; ++i)
        sigma2 += a[i - 1] * r.values[i];
    out.model = ArModel(std::move(a), std::max(sigma2, 0.0));
    return out;
}

[[nodiscard]] inline FitResult yule_walker_fit(const TimeSeries& x, std::size_t p)
{
    if (p == 0)
        throw std::invalid_argument("AR order must be positive");
    if (x.size() <= p)
        throw std::invalid_argument("series of length " + std::to_string(x.size()) +
                                    " is too short for order " + std::to_string(p));
    const AutocovarianceSeq r = biased_autocov(x, p);
    if (!(r.values[0] > 0.0))
        throw std::domain_error("zero-variance signal");
    return levinson_durbin(r, p);
}

/**
 * Burg lattice recursion on the samples exactly as given (no demeaning).
 *
 * At order m the reflection coefficient minimises the summed forward and
 * backward prediction error power,
 *
 *     k_m = -2 sum f_{m-1}(n) b_{m-1}(n-1) / sum [f_{m-1}(n)^2 + b_{m-1}(n-1)^2],
 *
 * over n = m..N-1 (0-based).  Errors then advance as
 * f_m(n) = f_{m-1}(n) + k_m b_{m-1}(n-1) and b_m(n) = b_{m-1}(n-1) + k_m f_{m-1}(n).
 * The innovation variance follows sigma2_m = sigma2_{m-1} (1 - k_m^2) from
 * sigma2_0 = mean(x^2).
 */
[[nodiscard]] inline FitResult burg_recursion(std::span<const double> x, std::size_t p)
{
    if (p == 0)
        throw std::invalid_argument("AR order must be positive");
    const std::size_t n = x.size();
    if (n < p + 1)
        throw std::invalid_argument("series of length " + std::to_string(n) + " is too short for Burg order " +
                                    std::to_string(p));

    std::vector<double> f(x.begin(), x.end());
    std::vector<double> b(x.begin(), x.end());

    FitResult out;
    out.method = FitMethod::Burg;
    out.reflection_coeffs.reserve(p);
    out.prediction_error_by_order.reserve(p + 1);

    double err = 0.0;
    for (double v : x)
        err += v * v;
    err /= static_cast<double>(n);
    out.prediction_error_by_order.push_back(err);

    std::vector<double> a;
    a.reserve(p);
    for (std::size_t m = 1; m <= p; ++m) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = m; i < n; ++i) {
            num += f[i] * b[i - 1];
            den += f[i] * f[i] + b[i - 1] * b[i - 1];
        }
        if (den == 0.0)
            throw std::domain_error("degenerate signal");
        const double k = -2.0 * num / den;

        // Descending so b[i-1] is still the order m-1 value when read.
        for (std::size_t i = n - 1; i >= m; --i) {
            const double fi = f[i];
            f[i] = fi + k * b[i - 1];
            b[i] = b[i - 1] + k * fi;
        }

        std::vector<double> next(m);
        for (std::size_t i = 1; i < m; ++i)
            next[i - 1] = a[i - 1] + k * a[m - i - 1];
        next[m - 1] = k;
        a = std::move(next);

        err *= (1.0 - k * k);
        out.reflection_coeffs.push_back(k);
        out.prediction_error_by_order.push_back(err);
    }
    out.model = ArModel(std::move(a), std::max(err, 0.0));
    return out;
}

/// Burg fit of the demeaned series.
[[nodiscard]] inline FitResult burg_fit(const TimeSeries& x, std::size_t p)
{
    const TimeSeries y = demean(x);
    return burg_recursion(y.samples(), p);
}

[[nodiscard]] inline double polynomial_power_response(std::span<const double> coeffs, double f) noexcept
{
    const double w = 2.0 * std::numbers::pi * f;
    double re = 1.0;
    double im = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double phase = w * static_cast<double>(i + 1);
        re += coeffs[i] * std::cos(phase);
        im -= coeffs[i] * std::sin(phase);
    }
    return re * re + im * im;
}

/**
 * Yule–Walker coefficients with the innovation variance taken from the
 * periodogram likelihood, sigma2 = integral over [-1/2, 1/2] of |A(f)|^2 I(f) df.
 *
 * The integral uses the trapezoidal rule on [0, 1/2] (doubled by symmetry).
 * The integrand is a trigonometric polynomial of degree N-1+p, so the
 * quadrature grid is refined from `grid_size` up to the point where the
 * rule is exact.
 */
[[nodiscard]] inline FitResult mle_fit(const TimeSeries& x, std::size_t p, std::size_t grid_size)
{
    if (grid_size < 2 * p)
        throw std::invalid_argument("grid too coarse for order");
    FitResult out = yule_walker_fit(x, p);
    out.method = FitMethod::Mle;

    const TimeSeries y = demean(x);
    // Full-circle node count 2(G-1) must exceed the integrand degree.
    const std::size_t exact_grid = (y.size() + p) / 2 + 2;
    const std::size_t quad_grid = std::max(grid_size, exact_grid);
    const Periodogram pg = periodogram(y, quad_grid);
    const double h = pg.freqs_normalized[1] - pg.freqs_normalized[0];

    double integral = 0.0;
    for (std::size_t g = 0; g < quad_grid; ++g) {
        const double w = (g == 0 || g + 1 == quad_grid) ? 0.5 * h : h;
        integral += w * polynomial_power_response(out.model.coeffs, pg.freqs_normalized[g]) * pg.values[g];
    }
    out.model.sigma2 = 2.0 * integral;
    return out;
}

[[nodiscard]] inline FitResult fit(const TimeSeries& x, std::size_t p, FitMethod method, std::size_t grid_size = 512)
{
    switch (method) {
    case FitMethod::YuleWalker: return yule_walker_fit(x, p);
    case FitMethod::Burg: return burg_fit(x, p);
    case FitMethod::Mle: return mle_fit(x, p, grid_size);
    }
    throw std::invalid_argument("unknown fit method");
}

/// P(f) = sigma2 / |A(f)|^2 on `grid_size` points of [0, 0.5].
[[nodiscard]] inline SpectrumEstimate ar_psd(const ArModel& model, std::size_t grid_size, double sample_rate_hz)
{
    if (grid_size < 2)
        throw std::invalid_argument("PSD grid needs at least two points");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("sample rate must be positive");
    (void)coeffs_to_reflection(model.coeffs);

    std::vector<double> grid = normalized_grid(grid_size);
    std::vector<double> values(grid_size, 0.0);
    if (model.sigma2 > 0.0)
        for (std::size_t i = 0; i < grid_size; ++i)
            values[i] = model.sigma2 / polynomial_power_response(model.coeffs, grid[i]);
    return make_spectrum(std::move(grid), std::move(values), sample_rate_hz);
}

}  // namespace arpsd

#pragma once

/** @file
 * Stationarity transforms and nonparametric second-order statistics.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "arpsd/core_types.hpp"

namespace arpsd {

struct Periodogram {
    std::vector<double> freqs_normalized;
    std::vector<double> values;
};

struct NormalityResult {
    double statistic = 0.0;
    bool is_normal_at_5pct = false;
};

/// Applies y(n) = x(n) - x(n-1) `d` times.
[[nodiscard]] inline TimeSeries difference(const TimeSeries& x, std::size_t d)
{
    if (x.size() <= d)
        throw std::invalid_argument("insufficient samples for differencing order");
    std::vector<double> y = x.values();
    for (std::size_t pass = 0; pass < d; ++pass) {
        for (std::size_t n = 0; n + 1 < y.size(); ++n)
            y[n] = y[n + 1] - y[n];
        y.pop_back();
    }
    return TimeSeries(std::move(y), x.sample_rate_hz());
}

[[nodiscard]] inline double mean(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

[[nodiscard]] inline TimeSeries demean(const TimeSeries& x)
{
    const double mu = mean(x.samples());
    std::vector<double> y(x.values());
    for (double& v : y)
        v -= mu;
    return TimeSeries(std::move(y), x.sample_rate_hz());
}

/**
 * Biased autocovariance r(l) = (1/N) sum_{n=0}^{N-1-l} x(n) x(n+l) of the
 * demeaned signal for l = 0..max_lag.  The 1/N normalisation keeps the
 * Toeplitz matrix positive semidefinite.
 */
[[nodiscard]] inline AutocovarianceSeq biased_autocov(const TimeSeries& x, std::size_t max_lag)
{
    const std::size_t n = x.size();
    if (max_lag >= n)
        throw std::invalid_argument("max lag " + std::to_string(max_lag) + " must be below the sample count " +
                                    std::to_string(n));
    const TimeSeries y = demean(x);
    const auto s = y.samples();
    AutocovarianceSeq r;
    r.values.resize(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            acc += s[i] * s[i + lag];
        r.values[lag] = acc / static_cast<double>(n);
    }
    return r;
}

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// Owns an FFTW real-to-complex plan and its buffers.
class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))))
    {
        if (in_ == nullptr || out_ == nullptr) {
            release();
            throw std::bad_alloc();
        }
        // Only fftw_execute is thread-safe.
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() { release(); }

    [[nodiscard]] std::span<double> input() noexcept { return {in_, n_}; }

    /// Squared magnitudes of bins 0..n/2.
    [[nodiscard]] std::vector<double> power()
    {
        fftw_execute(plan_);
        std::vector<double> p(n_ / 2 + 1);
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
        return p;
    }

private:
    void release() noexcept
    {
        if (plan_ != nullptr) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        if (in_ != nullptr)
            fftw_free(in_);
        if (out_ != nullptr)
            fftw_free(out_);
    }

    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace detail

/**
 * I(f) = (1/N) |sum_n x(n) exp(-j 2 pi f n)|^2 on an equispaced [0, 0.5] grid.
 *
 * The G grid points are the first G bins of an M = 2(G-1) point DFT, so the
 * signal is folded modulo M and transformed once.  The signal is used as
 * given (no demeaning): a constant series shows its full power at f = 0.
 */
[[nodiscard]] inline Periodogram periodogram(std::span<const double> x, std::size_t grid_size)
{
    if (x.empty())
        throw std::invalid_argument("periodogram of an empty signal");
    Periodogram out;
    out.freqs_normalized = normalized_grid(grid_size);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    if (grid_size == 1) {
        double s = 0.0;
        for (double v : x)
            s += v;
        out.values = {s * s * inv_n};
        return out;
    }
    const std::size_t m = 2 * (grid_size - 1);
    detail::RealFft fft(m);
    auto folded = fft.input();
    std::fill(folded.begin(), folded.end(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n)
        folded[n % m] += x[n];
    out.values = fft.power();
    for (double& v : out.values)
        v *= inv_n;
    return out;
}

[[nodiscard]] inline Periodogram periodogram(const TimeSeries& x, std::size_t grid_size)
{
    return periodogram(x.samples(), grid_size);
}

/// Jarque–Bera test against the chi-square(2) 5% critical value.
[[nodiscard]] inline NormalityResult normality_check(const TimeSeries& x)
{
    constexpr double critical_5pct = 5.99;
    const std::size_t n = x.size();
    if (n < 8)
        throw std::invalid_argument("too few samples");
    const double mu = mean(x.samples());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x.samples()) {
        const double d = v - mu;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double nn = static_cast<double>(n);
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (m2 <= 0.0)
        return {std::numeric_limits<double>::infinity(), false};
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    const double jb = nn / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
    return {jb, jb < critical_5pct};
}

}  // namespace arpsd

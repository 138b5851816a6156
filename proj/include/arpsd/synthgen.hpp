#pragma once

/** @file
 * Seeded AR process and multichannel recording generators with known truth.
 *
 * Gaussian innovations come from generator "mt19937_64/box-muller v1":
 * std::mt19937_64 words mapped to (0,1] doubles with 53 bits and turned
 * into normal pairs by the Box–Muller transform.  Both pieces are fully
 * specified, so outputs are identical across standard libraries.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "arpsd/ar_estim.hpp"
#include "arpsd/core_types.hpp"

namespace arpsd {

inline constexpr const char* generator_name = "mt19937_64/box-muller v1";

class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal()
    {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// SplitMix64 finaliser, used to derive independent per-channel seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

[[nodiscard]] inline std::size_t default_burn_in(const ArModel& model) noexcept
{
    return 10 * model.order() + 100;
}

namespace detail {

inline std::vector<double> run_ar(const ArModel& model, std::size_t n, GaussianRng& rng, std::size_t burn_in)
{
    if (!is_stable(model))
        throw std::domain_error("unstable AR polynomial");
    const std::size_t p = model.order();
    const double sd = std::sqrt(model.sigma2);
    std::vector<double> buf(n + burn_in, 0.0);
    for (std::size_t t = 0; t < buf.size(); ++t) {
        double v = sd * rng.normal();
        for (std::size_t i = 1; i <= p && i <= t; ++i)
            v -= model.coeffs[i - 1] * buf[t - i];
        buf[t] = v;
    }
    return {buf.begin() + static_cast<std::ptrdiff_t>(burn_in), buf.end()};
}

}  // namespace detail

/**
 * Runs x(n) = -a(1) x(n-1) - ... - a(p) x(n-p) + e(n) from zero initial
 * state and drops the first `burn_in` samples (default 10p + 100).
 */
[[nodiscard]] inline TimeSeries simulate_ar(const ArModel& model, std::size_t n, std::uint64_t seed,
                                            std::optional<std::size_t> burn_in = std::nullopt,
                                            double sample_rate_hz = 1.0)
{
    if (n == 0)
        throw std::invalid_argument("sample count must be positive");
    GaussianRng rng(seed);
    return TimeSeries(detail::run_ar(model, n, rng, burn_in.value_or(default_burn_in(model))), sample_rate_hz);
}

/// Two-pole resonator with poles r exp(+-j 2 pi fc / fs) and unit innovations.
[[nodiscard]] inline ArModel resonator(double center_hz, double pole_radius, double sample_rate_hz)
{
    if (!(center_hz > 0.0) || !(center_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument("resonator centre must lie in (0, fs/2)");
    if (!(pole_radius > 0.0) || !(pole_radius < 1.0))
        throw std::invalid_argument("pole radius must lie in (0, 1)");
    const double theta = 2.0 * std::numbers::pi * center_hz / sample_rate_hz;
    return ArModel({-2.0 * pole_radius * std::cos(theta), pole_radius * pole_radius}, 1.0);
}

/**
 * Random stable AR(order) model: reflection coefficients with magnitude
 * uniform in [k_min, k_max] and random sign, mapped through the step-up
 * recursion.
 */
[[nodiscard]] inline ArModel random_stable_model(std::size_t order, std::uint64_t seed, double k_min = 0.3,
                                                 double k_max = 0.7, double sigma2 = 1.0)
{
    if (!(0.0 <= k_min && k_min <= k_max && k_max < 1.0))
        throw std::invalid_argument("reflection magnitudes must satisfy 0 <= k_min <= k_max < 1");
    GaussianRng rng(seed);
    std::vector<double> k(order);
    for (double& v : k) {
        const double mag = k_min + (k_max - k_min) * rng.uniform();
        v = rng.uniform() < 0.5 ? -mag : mag;
    }
    return ArModel(reflection_to_coeffs(k), sigma2);
}

struct BurstSpec {
    std::string channel;
    double center_hz = 5.0;
    double pole_radius = 0.98;
    double gain = 1.0;
};

struct SimulatedRecording {
    Recording recording;
    std::map<std::string, bool> annotations;
};

/**
 * Every channel is white noise of variance noise_sigma^2.  A burst channel
 * adds resonator output rescaled to sample variance gain^2 * snr *
 * noise_sigma^2 (snr is a power ratio).  Channel c draws from seed
 * mix_seed(seed, c), so per-channel content does not depend on the other
 * channels.
 */
[[nodiscard]] inline SimulatedRecording simulate_recording(const std::vector<std::string>& montage, std::size_t n,
                                                           double sample_rate_hz, double noise_sigma,
                                                           const std::vector<BurstSpec>& bursts, double snr,
                                                           std::uint64_t seed)
{
    if (montage.empty())
        throw std::invalid_argument("montage is empty");
    if (!(noise_sigma >= 0.0))
        throw std::invalid_argument("noise sigma must be nonnegative");
    if (!(snr >= 0.0))
        throw std::invalid_argument("snr must be nonnegative");
    for (const auto& b : bursts) {
        if (std::find(montage.begin(), montage.end(), b.channel) == montage.end())
            throw std::invalid_argument("unknown burst channel '" + b.channel + "'");
        if (!(b.center_hz > 0.0 && b.center_hz < sample_rate_hz / 2.0))
            throw std::invalid_argument("burst centre must lie below fs/2");
        if (!(b.pole_radius > 0.0 && b.pole_radius < 1.0))
            throw std::invalid_argument("burst pole radius must lie in (0, 1)");
        if (!(b.gain > 0.0))
            throw std::invalid_argument("burst gain must be positive");
    }

    std::vector<Recording::Channel> channels;
    std::map<std::string, bool> truth;
    for (std::size_t c = 0; c < montage.size(); ++c) {
        GaussianRng rng(mix_seed(seed, c));
        std::vector<double> x(n);
        for (double& v : x)
            v = noise_sigma * rng.normal();
        bool has_burst = false;
        for (const auto& b : bursts) {
            if (b.channel != montage[c])
                continue;
            has_burst = true;
            const ArModel res = resonator(b.center_hz, b.pole_radius, sample_rate_hz);
            const std::vector<double> y = detail::run_ar(res, n, rng, default_burn_in(res));
            double mu = 0.0;
            for (double v : y)
                mu += v;
            mu /= static_cast<double>(n);
            double var = 0.0;
            for (double v : y)
                var += (v - mu) * (v - mu);
            var /= static_cast<double>(n);
            const double target = b.gain * b.gain * snr * noise_sigma * noise_sigma;
            const double scale = var > 0.0 ? std::sqrt(target / var) : 0.0;
            for (std::size_t i = 0; i < n; ++i)
                x[i] += scale * (y[i] - mu);
        }
        truth[montage[c]] = has_burst;
        channels.emplace_back(montage[c], TimeSeries(std::move(x), sample_rate_hz));
    }
    return {Recording(std::move(channels)), std::move(truth)};
}

}  // namespace arpsd

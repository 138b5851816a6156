#pragma once

/** @file
 * Value types shared by every stage of the AR spectral pipeline.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace arpsd {

/// Uniformly sampled real signal. Amplitudes are typically microvolts.
class TimeSeries {
public:
    TimeSeries(std::vector<double> samples, double sample_rate_hz)
        : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz)
    {
        if (samples_.empty())
            throw std::invalid_argument("time series must hold at least one sample");
        if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
            throw std::invalid_argument("sample rate must be positive and finite");
        for (std::size_t i = 0; i < samples_.size(); ++i)
            if (!std::isfinite(samples_[i]))
                throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double sample_rate_hz() const noexcept { return sample_rate_hz_; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

/// Named channels of equal length and sample rate, kept in insertion order.
class Recording {
public:
    using Channel = std::pair<std::string, TimeSeries>;

    explicit Recording(std::vector<Channel> channels) : channels_(std::move(channels))
    {
        if (channels_.empty())
            throw std::invalid_argument("recording must hold at least one channel");
        std::unordered_set<std::string> seen;
        const auto& first = channels_.front().second;
        for (const auto& [name, ts] : channels_) {
            if (!seen.insert(name).second)
                throw std::invalid_argument("duplicate channel name '" + name + "'");
            if (ts.size() != first.size())
                throw std::invalid_argument("channel '" + name + "' has " + std::to_string(ts.size()) +
                                            " samples, expected " + std::to_string(first.size()));
            if (ts.sample_rate_hz() != first.sample_rate_hz())
                throw std::invalid_argument("channel '" + name + "' has a different sample rate");
        }
    }

    [[nodiscard]] const std::vector<Channel>& channels() const noexcept { return channels_; }
    [[nodiscard]] std::size_t channel_count() const noexcept { return channels_.size(); }
    [[nodiscard]] std::size_t sample_count() const noexcept { return channels_.front().second.size(); }
    [[nodiscard]] double sample_rate_hz() const noexcept { return channels_.front().second.sample_rate_hz(); }

    [[nodiscard]] std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        out.reserve(channels_.size());
        for (const auto& c : channels_)
            out.push_back(c.first);
        return out;
    }

    [[nodiscard]] const TimeSeries& channel(const std::string& name) const
    {
        for (const auto& c : channels_)
            if (c.first == name)
                return c.second;
        throw std::invalid_argument("no channel named '" + name + "'");
    }

    friend bool operator==(const Recording&, const Recording&) = default;

private:
    std::vector<Channel> channels_;
};

/**
 * AR(p) model in the prediction-error convention
 *
 *     e(n) = x(n) + a(1) x(n-1) + ... + a(p) x(n-p),   e ~ N(0, sigma2)
 *
 * so A(f) = 1 + sum a(i) exp(-j 2 pi f i) and P(f) = sigma2 / |A(f)|^2.
 */
struct ArModel {
    std::vector<double> coeffs;
    double sigma2 = 0.0;

    ArModel() = default;
    ArModel(std::vector<double> a, double s2) : coeffs(std::move(a)), sigma2(s2)
    {
        if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
            throw std::invalid_argument("innovation variance must be finite and nonnegative");
        for (double c : coeffs)
            if (!std::isfinite(c))
                throw std::invalid_argument("non-finite AR coefficient");
    }

    [[nodiscard]] std::size_t order() const noexcept { return coeffs.size(); }

    friend bool operator==(const ArModel&, const ArModel&) = default;
};

/// Autocovariance lags r(0..L).
struct AutocovarianceSeq {
    std::vector<double> values;

    [[nodiscard]] std::size_t max_lag() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    [[nodiscard]] double operator[](std::size_t lag) const { return values.at(lag); }
};

/// Parametric or masked PSD on an equispaced [0, 0.5] cycles/sample grid.
struct SpectrumEstimate {
    std::vector<double> freqs_normalized;
    std::vector<double> freqs_hz;
    std::vector<double> values;
    double sample_rate_hz = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Equispaced grid of `grid_size` frequencies covering [0, 0.5] inclusive.
[[nodiscard]] inline std::vector<double> normalized_grid(std::size_t grid_size)
{
    if (grid_size == 0)
        throw std::invalid_argument("grid size must be positive");
    std::vector<double> grid(grid_size, 0.0);
    if (grid_size == 1)
        return grid;
    const double step = 0.5 / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i)
        grid[i] = step * static_cast<double>(i);
    grid.back() = 0.5;
    return grid;
}

[[nodiscard]] inline SpectrumEstimate make_spectrum(std::vector<double> freqs_normalized,
                                                    std::vector<double> values,
                                                    double sample_rate_hz)
{
    SpectrumEstimate s;
    s.freqs_hz.reserve(freqs_normalized.size());
    for (double f : freqs_normalized)
        s.freqs_hz.push_back(f * sample_rate_hz);
    s.freqs_normalized = std::move(freqs_normalized);
    s.values = std::move(values);
    s.sample_rate_hz = sample_rate_hz;
    return s;
}

/// Half-open rhythm band [lo_hz, hi_hz).
struct FrequencyBand {
    std::string name;
    double lo_hz = 0.0;
    double hi_hz = 0.0;

    FrequencyBand() = default;
    FrequencyBand(std::string n, double lo, double hi) : name(std::move(n)), lo_hz(lo), hi_hz(hi)
    {
        if (!(lo_hz >= 0.0) || !(hi_hz > lo_hz))
            throw std::invalid_argument("band '" + name + "' must satisfy 0 <= lo < hi");
    }

    [[nodiscard]] bool contains(double hz) const noexcept { return hz >= lo_hz && hz < hi_hz; }
    [[nodiscard]] bool overlaps(const FrequencyBand& o) const noexcept
    {
        return lo_hz < o.hi_hz && o.lo_hz < hi_hz;
    }

    friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

/// Clinical EEG rhythms. Gamma is not used.
[[nodiscard]] inline std::vector<FrequencyBand> default_bands()
{
    return {
        {"delta", 0.5, 4.0},
        {"theta", 4.0, 8.0},
        {"alpha", 8.0, 14.0},
        {"beta", 14.0, 30.0},
    };
}

[[nodiscard]] inline std::optional<FrequencyBand> band_containing(const std::vector<FrequencyBand>& bands,
                                                                  double hz)
{
    for (const auto& b : bands)
        if (b.contains(hz))
            return b;
    return std::nullopt;
}

/// Throws if any two bands overlap.
inline void require_disjoint(const std::vector<FrequencyBand>& bands)
{
    for (std::size_t i = 0; i < bands.size(); ++i)
        for (std::size_t j = i + 1; j < bands.size(); ++j)
            if (bands[i].overlaps(bands[j]))
                throw std::invalid_argument("bands '" + bands[i].name + "' and '" + bands[j].name +
                                            "' overlap");
}

/// The 18 bipolar derivations of the longitudinal montage, right chain first.
[[nodiscard]] inline std::vector<std::string> default_montage()
{
    return {"Fp2-F8", "F8-T4",  "T4-T6",  "T6-O2",  "Fp2-F4", "F4-C4",
            "C4-P4",  "P4-O2",  "Fz-Cz",  "Cz-Pz",  "Fp1-F7", "F7-T3",
            "T3-T5",  "T5-O1",  "Fp1-F3", "F3-C3",  "C3-P3",  "P3-O1"};
}

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }
    [[nodiscard]] std::size_t positives() const noexcept { return tp + fn; }
    [[nodiscard]] std::size_t negatives() const noexcept { return tn + fp; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

}  // namespace arpsd

#pragma once

/** @file
 * Mean-threshold masking of a PSD and rhythm-band power attribution.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "arpsd/core_types.hpp"

namespace arpsd {

/**
 * PSD with every value below k * mean(P) set to zero.  Survivors keep their
 * original value; the comparison is inclusive (P >= k * mean).
 */
struct MaskedSpectrum {
    SpectrumEstimate base;
    double k = 0.0;
    double mean_power = 0.0;
    std::vector<double> values;
    double survivor_fraction = 0.0;

    [[nodiscard]] SpectrumEstimate as_spectrum() const
    {
        SpectrumEstimate s = base;
        s.values = values;
        return s;
    }

    [[nodiscard]] std::vector<std::size_t> survivors() const
    {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (base.values[i] >= k * mean_power)
                idx.push_back(i);
        return idx;
    }
};

[[nodiscard]] inline MaskedSpectrum threshold_psd(const SpectrumEstimate& psd, double k)
{
    if (psd.values.empty())
        throw std::invalid_argument("cannot threshold an empty spectrum");
    MaskedSpectrum out;
    out.base = psd;
    out.k = k;
    double sum = 0.0;
    for (double v : psd.values)
        sum += v;
    // Rounding can push the computed mean outside [min, max]; a flat
    // spectrum must keep every bin at k = 1.
    const auto [lo, hi] = std::minmax_element(psd.values.begin(), psd.values.end());
    out.mean_power = std::clamp(sum / static_cast<double>(psd.values.size()), *lo, *hi);
    const double cut = k * out.mean_power;
    out.values.resize(psd.values.size(), 0.0);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < psd.values.size(); ++i) {
        if (psd.values[i] >= cut) {
            out.values[i] = psd.values[i];
            ++kept;
        }
    }
    out.survivor_fraction = static_cast<double>(kept) / static_cast<double>(psd.values.size());
    return out;
}

struct BandPower {
    std::string name;
    double power = 0.0;
    double fraction = 0.0;
};

struct BandPowerReport {
    std::vector<BandPower> per_band;  // same order as the input bands
    double total_power = 0.0;
    std::string dominant_band = "none";

    [[nodiscard]] const BandPower* find(const std::string& name) const
    {
        for (const auto& b : per_band)
            if (b.name == name)
                return &b;
        return nullptr;
    }
};

/// Composite trapezoid weights (in Hz) for an equispaced grid.
[[nodiscard]] inline std::vector<double> trapezoid_weights(const std::vector<double>& freqs_hz)
{
    std::vector<double> w(freqs_hz.size(), 0.0);
    for (std::size_t i = 0; i + 1 < freqs_hz.size(); ++i) {
        const double half = 0.5 * (freqs_hz[i + 1] - freqs_hz[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    return w;
}

/**
 * Integrates the spectrum within each band.  A grid point contributes its
 * trapezoid weight times its value to the band holding its Hz frequency;
 * fractions are relative to the integral over the whole grid, so power
 * outside every band (e.g. above beta) is not attributed.
 */
[[nodiscard]] inline BandPowerReport band_powers(const SpectrumEstimate& s, const std::vector<FrequencyBand>& bands)
{
    require_disjoint(bands);
    if (s.freqs_hz.size() != s.values.size())
        throw std::invalid_argument("spectrum is missing its Hz axis");

    BandPowerReport out;
    out.per_band.reserve(bands.size());
    for (const auto& b : bands)
        out.per_band.push_back({b.name, 0.0, 0.0});

    const auto w = trapezoid_weights(s.freqs_hz);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double mass = w[i] * s.values[i];
        out.total_power += mass;
        for (std::size_t j = 0; j < bands.size(); ++j) {
            if (bands[j].contains(s.freqs_hz[i])) {
                out.per_band[j].power += mass;
                break;
            }
        }
    }
    if (out.total_power > 0.0) {
        for (auto& b : out.per_band)
            b.fraction = b.power / out.total_power;
        // Ties go to the lower band.
        std::vector<std::size_t> order(bands.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return bands[l].lo_hz < bands[r].lo_hz; });
        const BandPower* best = nullptr;
        for (std::size_t j : order) {
            const auto& b = out.per_band[j];
            if (b.fraction > 0.0 && (best == nullptr || b.fraction > best->fraction))
                best = &b;
        }
        if (best != nullptr)
            out.dominant_band = best->name;
    }
    return out;
}

[[nodiscard]] inline BandPowerReport band_powers(const MaskedSpectrum& m, const std::vector<FrequencyBand>& bands)
{
    return band_powers(m.as_spectrum(), bands);
}

/**
 * Divides out the squared response |1 - exp(-j 2 pi f)|^2 of a first
 * difference.  The f = 0 bin, where the response vanishes, is set to zero.
 */
[[nodiscard]] inline SpectrumEstimate undifference(const SpectrumEstimate& s)
{
    SpectrumEstimate out = s;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double gain = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * out.freqs_normalized[i]);
        out.values[i] = out.freqs_normalized[i] > 0.0 ? out.values[i] / gain : 0.0;
    }
    return out;
}

}  // namespace arpsd

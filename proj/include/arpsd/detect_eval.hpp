#pragma once

/** @file
 * Per-channel seizure-rhythm decisions and their scoring against annotations.
 */

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arpsd/ar_estim.hpp"
#include "arpsd/core_types.hpp"
#include "arpsd/order_select.hpp"
#include "arpsd/preprocess.hpp"
#include "arpsd/spectral.hpp"

namespace arpsd {

struct ChannelDecision {
    std::string derivation;
    bool flagged = false;
    std::string dominant_band = "none";
    double low_band_fraction = 0.0;  // delta + theta share of surviving power
    double survivor_fraction = 0.0;
    std::size_t order = 0;           // AR order actually fitted
    std::optional<std::string> error;

    friend bool operator==(const ChannelDecision&, const ChannelDecision&) = default;
};

/// Pipeline settings.  order == nullopt means per-channel order_scan.
struct DetectionConfig {
    FitMethod method = FitMethod::Burg;
    std::optional<std::size_t> order = 10;
    Criterion criterion = Criterion::Bic;
    std::size_t p_max = 30;
    std::size_t diff_order = 1;
    double k = 2.0;
    double rho = 0.5;
    std::size_t grid_size = 512;
    std::vector<FrequencyBand> bands = default_bands();
    bool undifference_correction = false;

    void validate() const
    {
        if (order && *order == 0)
            throw std::invalid_argument("order must be positive");
        if (p_max == 0)
            throw std::invalid_argument("p_max must be positive");
        if (!(rho >= 0.0 && rho <= 1.0))
            throw std::invalid_argument("rho must lie in [0, 1]");
        if (grid_size < 2)
            throw std::invalid_argument("grid size must be at least 2");
        if (!std::isfinite(k))
            throw std::invalid_argument("k must be finite");
        if (undifference_correction && diff_order != 1)
            throw std::invalid_argument("undifference correction requires diff order 1");
        require_disjoint(bands);
    }
};

struct DetectionReport {
    std::vector<ChannelDecision> per_channel;
    DetectionConfig parameters;

    [[nodiscard]] std::vector<std::pair<std::string, bool>> decisions() const
    {
        std::vector<std::pair<std::string, bool>> out;
        out.reserve(per_channel.size());
        for (const auto& c : per_channel) {
            if (c.error)
                throw std::invalid_argument("channel '" + c.derivation + "' has no decision: " + *c.error);
            out.emplace_back(c.derivation, c.flagged);
        }
        return out;
    }
};

struct MetricsReport {
    ConfusionCounts counts;
    std::optional<double> sensitivity;  // absent without actual positives
    std::optional<double> specificity;  // absent without actual negatives
    std::optional<double> accuracy;     // absent for zero cases
};

[[nodiscard]] inline bool is_low_band(const std::string& name) noexcept
{
    return name == "delta" || name == "theta";
}

/**
 * Flags a channel when its surviving power is nonzero and the delta+theta
 * share reaches rho.  A channel whose surviving power falls outside every
 * band is never flagged.
 */
[[nodiscard]] inline ChannelDecision classify_channel(const MaskedSpectrum& masked,
                                                      const std::vector<FrequencyBand>& bands, double rho)
{
    const BandPowerReport bp = band_powers(masked, bands);
    ChannelDecision d;
    d.dominant_band = bp.dominant_band;
    d.survivor_fraction = masked.survivor_fraction;
    for (const auto& b : bp.per_band)
        if (is_low_band(b.name))
            d.low_band_fraction += b.fraction;
    d.flagged = bp.total_power > 0.0 && d.dominant_band != "none" && d.low_band_fraction >= rho;
    return d;
}

/// difference -> demean -> fit -> PSD -> threshold -> classify, for one channel.
[[nodiscard]] inline ChannelDecision detect_channel(const std::string& name, const TimeSeries& x,
                                                    const DetectionConfig& cfg)
{
    const TimeSeries y = demean(difference(x, cfg.diff_order));
    const std::size_t p =
        cfg.order ? *cfg.order : order_scan(y, cfg.p_max, cfg.method, cfg.criterion, cfg.grid_size).selected_p;
    const FitResult fr = fit(y, p, cfg.method, cfg.grid_size);
    SpectrumEstimate psd = ar_psd(fr.model, cfg.grid_size, y.sample_rate_hz());
    if (cfg.undifference_correction)
        psd = undifference(psd);
    ChannelDecision d = classify_channel(threshold_psd(psd, cfg.k), cfg.bands, cfg.rho);
    d.derivation = name;
    d.order = p;
    return d;
}

/**
 * Runs every channel independently.  A channel whose fit fails gets an
 * explicit error entry instead of a decision; the report keeps channel order.
 */
[[nodiscard]] inline DetectionReport detect_recording(const Recording& rec, const DetectionConfig& cfg)
{
    cfg.validate();
    DetectionReport report;
    report.parameters = cfg;
    report.per_channel.reserve(rec.channel_count());
    for (const auto& [name, ts] : rec.channels()) {
        try {
            report.per_channel.push_back(detect_channel(name, ts, cfg));
        } catch (const std::exception& e) {
            ChannelDecision d;
            d.derivation = name;
            d.error = e.what();
            report.per_channel.push_back(std::move(d));
        }
    }
    return report;
}

[[nodiscard]] inline MetricsReport metrics_from_counts(const ConfusionCounts& c)
{
    MetricsReport m;
    m.counts = c;
    if (c.positives() > 0)
        m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.positives());
    if (c.negatives() > 0)
        m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.negatives());
    if (c.total() > 0)
        m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    return m;
}

/// Tallies predictions against truth; the key sets must match exactly.
[[nodiscard]] inline MetricsReport evaluate(const std::vector<std::pair<std::string, bool>>& predicted,
                                           const std::map<std::string, bool>& annotations)
{
    std::set<std::string> pred_keys;
    for (const auto& [name, flag] : predicted)
        if (!pred_keys.insert(name).second)
            throw std::invalid_argument("duplicate prediction for '" + name + "'");

    std::string missing, extra;
    for (const auto& [name, label] : annotations)
        if (!pred_keys.contains(name))
            missing += (missing.empty() ? "" : ", ") + name;
    for (const auto& name : pred_keys)
        if (!annotations.contains(name))
            extra += (extra.empty() ? "" : ", ") + name;
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "annotation keys do not match report derivations";
        if (!missing.empty())
            msg += "; not in report: " + missing;
        if (!extra.empty())
            msg += "; not annotated: " + extra;
        throw std::invalid_argument(msg);
    }

    ConfusionCounts c;
    for (const auto& [name, flag] : predicted) {
        const bool truth = annotations.at(name);
        if (truth && flag)
            ++c.tp;
        else if (truth)
            ++c.fn;
        else if (flag)
            ++c.fp;
        else
            ++c.tn;
    }
    return metrics_from_counts(c);
}

[[nodiscard]] inline MetricsReport evaluate(const DetectionReport& predicted,
                                           const std::map<std::string, bool>& annotations)
{
    return evaluate(predicted.decisions(), annotations);
}

}  // namespace arpsd

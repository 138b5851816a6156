#pragma once

/** @file
 * Information criteria for AR order selection.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arpsd/ar_estim.hpp"
#include "arpsd/core_types.hpp"

namespace arpsd {

enum class Criterion { Aic, Aicc, Bic };

[[nodiscard]] inline std::string_view to_string(Criterion c) noexcept
{
    switch (c) {
    case Criterion::Aic: return "aic";
    case Criterion::Aicc: return "aicc";
    case Criterion::Bic: return "bic";
    }
    return "?";
}

[[nodiscard]] inline Criterion parse_criterion(std::string_view s)
{
    if (s == "aic")
        return Criterion::Aic;
    if (s == "aicc")
        return Criterion::Aicc;
    if (s == "bic")
        return Criterion::Bic;
    throw std::invalid_argument("unknown criterion '" + std::string(s) + "'");
}

namespace detail {
inline void require_positive_variance(double sigma2)
{
    if (!(sigma2 > 0.0))
        throw std::domain_error("information criterion needs a positive innovation variance");
}
}  // namespace detail

/// log(sigma2) + (n + 2p) / n
[[nodiscard]] inline double aic(double sigma2, double n, std::size_t p)
{
    detail::require_positive_variance(sigma2);
    if (!(n >= 1.0))
        throw std::invalid_argument("sample count must be at least 1");
    return std::log(sigma2) + (n + 2.0 * static_cast<double>(p)) / n;
}

/// log(sigma2) + (n + p) / (n - p - 2)
[[nodiscard]] inline double aicc(double sigma2, double n, std::size_t p)
{
    detail::require_positive_variance(sigma2);
    const double pp = static_cast<double>(p);
    if (!(n - pp - 2.0 > 0.0))
        throw std::domain_error("AICc undefined for this n,p");
    return std::log(sigma2) + (n + pp) / (n - pp - 2.0);
}

/// log(sigma2) + p log(n) / n
[[nodiscard]] inline double bic(double sigma2, double n, std::size_t p)
{
    detail::require_positive_variance(sigma2);
    if (!(n >= 1.0))
        throw std::invalid_argument("sample count must be at least 1");
    return std::log(sigma2) + static_cast<double>(p) * std::log(n) / n;
}

struct OrderScore {
    std::size_t p = 0;
    double sigma2 = 0.0;
    double aic = 0.0;
    std::optional<double> aicc;  // absent where n <= p + 2
    double bic = 0.0;

    [[nodiscard]] std::optional<double> value(Criterion c) const
    {
        switch (c) {
        case Criterion::Aic: return aic;
        case Criterion::Aicc: return aicc;
        case Criterion::Bic: return bic;
        }
        return std::nullopt;
    }
};

struct OrderScanResult {
    std::vector<OrderScore> per_order;  // p = 1..p_max
    std::size_t selected_p = 0;
    Criterion criterion_used = Criterion::Bic;
};

/// Picks the minimising order; ties go to the smaller p.
[[nodiscard]] inline std::size_t select_order(const std::vector<OrderScore>& scores, Criterion c)
{
    std::optional<double> best;
    std::size_t best_p = 0;
    for (const auto& s : scores) {
        const auto v = s.value(c);
        if (!v)
            continue;
        if (!best || *v < *best) {
            best = v;
            best_p = s.p;
        }
    }
    if (!best)
        throw std::domain_error("no order has a defined " + std::string(to_string(c)));
    return best_p;
}

/**
 * Scores orders 1..p_max from one recursion to p_max; the per-order
 * variances come from FitResult::prediction_error_by_order.
 */
[[nodiscard]] inline OrderScanResult order_scan(const TimeSeries& x, std::size_t p_max, FitMethod method,
                                                Criterion criterion, std::size_t grid_size = 512)
{
    if (p_max == 0)
        throw std::invalid_argument("p_max must be at least 1");
    if (x.size() <= p_max + 2)
        throw std::invalid_argument("series of length " + std::to_string(x.size()) +
                                    " is too short to scan up to order " + std::to_string(p_max));
    // MLE shares the Yule-Walker recursion; its exact variance integral
    // reproduces the Levinson error at every order.
    const FitResult sweep = method == FitMethod::Burg ? burg_fit(x, p_max)
                                                      : yule_walker_fit(x, p_max);
    (void)grid_size;

    const double n = static_cast<double>(x.size());
    OrderScanResult out;
    out.criterion_used = criterion;
    out.per_order.reserve(p_max);
    for (std::size_t p = 1; p <= p_max; ++p) {
        OrderScore s;
        s.p = p;
        s.sigma2 = sweep.prediction_error_by_order[p];
        s.aic = aic(s.sigma2, n, p);
        s.bic = bic(s.sigma2, n, p);
        if (n - static_cast<double>(p) - 2.0 > 0.0)
            s.aicc = aicc(s.sigma2, n, p);
        out.per_order.push_back(s);
    }
    out.selected_p = select_order(out.per_order, criterion);
    return out;
}

}  // namespace arpsd

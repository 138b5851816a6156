// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arpsd/arpsd.hpp"
#include "oracles.hpp"

using namespace arpsd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail)
{
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void levinson_equivalence()
{
    std::mt19937_64 rng(1);
    double max_err = 0.0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = 1 + static_cast<std::size_t>(trial % 20);
        const auto r = oracle::random_pd_autocov(p, rng);
        const auto fr = levinson_durbin({r}, p);
        const auto ref = oracle::toeplitz_yule_walker(r, p);
        for (std::size_t i = 0; i < p; ++i)
            max_err = std::max(max_err, std::abs(fr.model.coeffs[i] - ref[i]));
    }
    const double secs = seconds_since(t0);
    report(1, max_err < 1e-10 && secs < 1.0, "Levinson-Durbin equals dense Toeplitz solve",
           fmt("200 cases, orders 1-20, max |err| = %.2e, %.3f s", max_err, secs));
}

void closed_form_order_one()
{
    const auto fr = levinson_durbin({{1.0, 0.5}}, 1);
    const double a = fr.model.coeffs[0];
    const double s2 = fr.model.sigma2;
    const double p0 = ar_psd(fr.model, 512, 1.0).values[0];
    const bool ok = std::abs(a + 0.5) <= 1e-14 && std::abs(s2 - 0.75) <= 1e-14 && std::abs(p0 - 3.0) <= 1e-12;
    report(2, ok, "closed-form order 1", fmt("a(1) = %.17g, sigma2 = %.17g, P(0) = %.17g", a, s2, p0));
}

void coefficient_recovery()
{
    const ArModel truth({-1.2, 0.8}, 1.0);
    int burg_ok = 0, yw_ok = 0;
    bool mle_equal = true;
    const auto t0 = Clock::now();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = simulate_ar(truth, 2560, seed);
        const auto b = burg_fit(x, 2);
        const auto y = yule_walker_fit(x, 2);
        const auto m = mle_fit(x, 2, 512);
        auto within = [&](const FitResult& f) {
            return std::abs(f.model.coeffs[0] + 1.2) <= 0.05 && std::abs(f.model.coeffs[1] - 0.8) <= 0.05;
        };
        burg_ok += within(b);
        yw_ok += within(y);
        mle_equal = mle_equal && m.model.coeffs == y.model.coeffs;
    }
    const double secs = seconds_since(t0);
    report(3, burg_ok >= 95 && yw_ok >= 95 && mle_equal && secs < 10.0, "AR(2) coefficient recovery, N = 2560",
           fmt("Burg %d/100, Yule-Walker %d/100 within 0.05; MLE == YW coefficients: %s; %.2f s", burg_ok, yw_ok,
               mle_equal ? "yes" : "no", secs));
}

void burg_hand_cases()
{
    const std::vector<double> same{1.0, 1.0}, alt{1.0, -1.0};
    const double k_same = burg_recursion(same, 1).reflection_coeffs[0];
    const double k_alt = burg_recursion(alt, 1).reflection_coeffs[0];
    report(4, k_same == -1.0 && k_alt == 1.0, "Burg reflection hand cases",
           fmt("[1,1] -> k1 = %g, [1,-1] -> k1 = %g", k_same, k_alt));
}

void order_selection()
{
    const ArModel model = random_stable_model(10, 2024);
    int bic_hits = 0, aic_hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = simulate_ar(model, 2560, 10000 + seed);
        const auto bic_scan = order_scan(x, 30, FitMethod::Burg, Criterion::Bic);
        const auto aic_scan = order_scan(x, 30, FitMethod::Burg, Criterion::Aic);
        bic_hits += bic_scan.selected_p == 10;
        aic_hits += aic_scan.selected_p >= 10;
    }
    report(5, bic_hits >= 80 && aic_hits >= 80, "order selection on AR(10)",
           fmt("BIC picks 10 in %d/100, AIC picks >= 10 in %d/100", bic_hits, aic_hits));
}

void criterion_formulas()
{
    const double a = aic(1.0, 100, 0), c = aicc(1.0, 100, 10), b = bic(1.0, 100, 0);
    report(6, a == 1.0 && c == 1.25 && b == 0.0, "criterion formulas",
           fmt("AIC(1,100,0) = %.17g, AICc(1,100,10) = %.17g, BIC(1,100,0) = %.17g", a, c, b));
}

void threshold_properties()
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(2, 600);
    std::lognormal_distribution<double> lg(0.0, 1.5);
    std::uniform_real_distribution<double> uk(0.0, 5.0);
    std::uniform_real_distribution<double> uc(-6.0, 6.0);
    int identity = 0, monotone = 0, scale = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> v(len(rng));
        for (double& x : v)
            x = lg(rng);
        const SpectrumEstimate s = make_spectrum(normalized_grid(v.size()), v, 128.0);

        identity += threshold_psd(s, 0.0).values == s.values;

        double k1 = uk(rng), k2 = uk(rng);
        if (k1 > k2)
            std::swap(k1, k2);
        const auto lo = threshold_psd(s, k1).survivors();
        const auto hi = threshold_psd(s, k2).survivors();
        monotone += std::includes(lo.begin(), lo.end(), hi.begin(), hi.end());

        SpectrumEstimate scaled = s;
        const double c = std::pow(10.0, uc(rng));
        for (double& x : scaled.values)
            x *= c;
        scale += threshold_psd(scaled, k1).survivors() == lo;
    }
    report(7, identity == 1000 && monotone == 1000 && scale == 1000, "threshold mask properties",
           fmt("identity %d/1000, monotone %d/1000, scale-invariant %d/1000", identity, monotone, scale));
}

void end_to_end_detection()
{
    const auto montage = default_montage();
    const std::vector<BurstSpec> bursts{{"F8-T4"}, {"T4-T6"}};
    const DetectionConfig cfg;  // k = 2, rho = 0.5, p = 10, Burg
    int exact = 0;
    std::size_t worst_noise = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto sim = simulate_recording(montage, 2560, 128.0, 1.0, bursts, 10.0, seed);
        const auto report = detect_recording(sim.recording, cfg);
        bool same = true;
        for (const auto& c : report.per_channel)
            same = same && !c.error && c.flagged == sim.annotations.at(c.derivation);
        exact += same;

        const auto noise = simulate_recording(montage, 2560, 128.0, 1.0, {}, 10.0, 500 + seed);
        std::size_t flagged = 0;
        for (const auto& c : detect_recording(noise.recording, cfg).per_channel)
            flagged += c.flagged || c.error;
        worst_noise = std::max(worst_noise, flagged);
    }
    report(8, exact >= 18 && worst_noise <= 2, "end-to-end detection on synthetic recordings",
           fmt("flagged set == burst set in %d/20 seeds; noise-only max flagged %zu per run", exact, worst_noise));
}

void metrics_fixture()
{
    const std::string dir = ARPSD_FIXTURE_DIR;
    std::ifstream in(dir + "/expected_metrics.csv");
    std::string line;
    bool header = false;
    int matched = 0, rows = 0;
    std::string detail;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> cell;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');)
            cell.push_back(c);
        ++rows;
        const std::string p = cell[0];
        const auto truth = read_annotations(dir + "/patient" + p + "_truth.csv");
        const auto pred = read_annotations(dir + "/patient" + p + "_pred.csv");
        const auto m = evaluate(std::vector<std::pair<std::string, bool>>(pred.begin(), pred.end()), truth);
        const bool ok = std::to_string(m.counts.tp) == cell[1] && std::to_string(m.counts.fp) == cell[2] &&
                        std::to_string(m.counts.tn) == cell[3] && std::to_string(m.counts.fn) == cell[4] &&
                        csv::fixed(100 * *m.sensitivity, 2) == cell[5] &&
                        csv::fixed(100 * *m.specificity, 2) == cell[6] && csv::fixed(100 * *m.accuracy, 2) == cell[7];
        matched += ok;
        detail += fmt("%sP%s %s/%s/%s", detail.empty() ? "" : ", ", p.c_str(),
                      csv::fixed(100 * *m.sensitivity, 2).c_str(), csv::fixed(100 * *m.specificity, 2).c_str(),
                      csv::fixed(100 * *m.accuracy, 2).c_str());
    }
    report(9, rows == 3 && matched == 3, "confusion metrics on the three patient fixtures",
           fmt("%d/3 match the hand tally (sens/spec/acc %%: ", matched) + detail + ")");
}

void parseval()
{
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> len(16, 500);
    std::normal_distribution<double> g;
    constexpr std::size_t grid = 512;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(len(rng));
        const double offset = g(rng);
        for (double& v : x)
            v = offset + g(rng);
        const auto pg = periodogram(std::span<const double>(x), grid);
        const double h = 0.5 / static_cast<double>(grid - 1);
        double integral = 0.0;
        for (std::size_t i = 0; i < grid; ++i)
            integral += (i == 0 || i + 1 == grid ? 0.5 : 1.0) * h * pg.values[i];
        integral *= 2.0;
        double power = 0.0;
        for (double v : x)
            power += v * v;
        power /= static_cast<double>(x.size());
        worst = std::max(worst, std::abs(integral - power) / power);
    }
    report(10, worst < 0.02, "periodogram integrates to sample power",
           fmt("50 signals, N < grid, worst relative error %.2e", worst));
}

}  // namespace

int main()
{
    const auto t0 = Clock::now();
    levinson_equivalence();
    closed_form_order_one();
    coefficient_recovery();
    burg_hand_cases();
    order_selection();
    criterion_formulas();
    threshold_properties();
    end_to_end_detection();
    metrics_fixture();
    parseval();
    std::printf("%d of 10 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}

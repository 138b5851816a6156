#pragma once

/** @file
 * Command-line front end.  run_cli() is the whole program; tools/arpsd.cpp
 * only forwards argv to it.
 */

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arpsd/ar_estim.hpp"
#include "arpsd/cli_io.hpp"
#include "arpsd/core_types.hpp"
#include "arpsd/detect_eval.hpp"
#include "arpsd/order_select.hpp"
#include "arpsd/preprocess.hpp"
#include "arpsd/spectral.hpp"
#include "arpsd/synthgen.hpp"

namespace arpsd {

namespace cli_detail {

/// Raw flag values shared by the analysis subcommands.
struct ConfigFlags {
    std::string method = "burg";
    std::string order = "10";
    std::string criterion = "bic";
    std::size_t p_max = 30;
    std::size_t diff_order = 1;
    double k = 2.0;
    double rho = 0.5;
    std::size_t grid_size = 512;
    double sample_rate_hz = 128.0;
    std::string bands;
    bool undifference_correction = false;

    void attach(CLI::App& cmd, bool allow_all_methods)
    {
        cmd.add_option("--method", method, allow_all_methods ? "yw|burg|mle|all" : "yw|burg|mle")
            ->capture_default_str();
        cmd.add_option("--order", order, "fixed AR order or 'auto'")->capture_default_str();
        cmd.add_option("--criterion", criterion, "aic|aicc|bic (used with --order auto)")->capture_default_str();
        cmd.add_option("--pmax", p_max, "largest order scanned")->capture_default_str()->check(CLI::PositiveNumber);
        cmd.add_option("--diff", diff_order, "differencing order")->capture_default_str();
        cmd.add_option("--k", k, "threshold multiplier on the mean PSD")->capture_default_str();
        cmd.add_option("--rho", rho, "low-band share needed to flag")->capture_default_str()->check(
            CLI::Range(0.0, 1.0));
        cmd.add_option("--grid", grid_size, "PSD grid points on [0, fs/2]")->capture_default_str()->check(
            CLI::Range(std::size_t{2}, std::size_t{1} << 24));
        cmd.add_option("--fs", sample_rate_hz, "sample rate when the CSV has no '# fs=' line")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--bands", bands, "bands as name:lo:hi;name:lo:hi;...");
        cmd.add_flag("--undiff-correction", undifference_correction,
                     "divide the PSD by the first-difference response before banding");
    }

    [[nodiscard]] RunConfig build(std::optional<FitMethod> method_override = std::nullopt) const
    {
        RunConfig cfg;
        auto& d = cfg.detection;
        d.method = method_override ? *method_override : parse_fit_method(method);
        if (order == "auto") {
            d.order.reset();
        } else {
            const auto v = csv::parse_double(order);
            if (!v || *v < 1.0 || *v != std::floor(*v))
                throw std::invalid_argument("--order must be a positive integer or 'auto'");
            d.order = static_cast<std::size_t>(*v);
        }
        d.criterion = parse_criterion(criterion);
        d.p_max = p_max;
        d.diff_order = diff_order;
        d.k = k;
        d.rho = rho;
        d.grid_size = grid_size;
        if (!bands.empty())
            d.bands = parse_bands(bands);
        d.undifference_correction = undifference_correction;
        cfg.sample_rate_hz = sample_rate_hz;
        d.validate();
        return cfg;
    }
};

inline void write_echo(std::ostream& out, const std::vector<std::string>& lines)
{
    for (const auto& l : lines)
        out << "# " << l << '\n';
}

/// Writes `content` to `path` in one go so failures never leave partial files.
inline void write_file(const std::string& path, const std::string& content)
{
    auto out = csv::open_output(path);
    out << content;
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string pad(std::string s, std::size_t width, bool left = false)
{
    if (s.size() >= width)
        return s;
    const std::string fill(width - s.size(), ' ');
    return left ? s + fill : fill + s;
}

/// Differenced, demeaned channel ready for fitting.
inline TimeSeries prepared(const Recording& rec, const std::string& channel, const DetectionConfig& d)
{
    return demean(difference(rec.channel(channel), d.diff_order));
}

inline FitResult fit_with(const TimeSeries& y, const DetectionConfig& d, FitMethod method)
{
    const std::size_t p = d.order ? *d.order : order_scan(y, d.p_max, method, d.criterion, d.grid_size).selected_p;
    return fit(y, p, method, d.grid_size);
}

inline int cmd_fit(const std::string& csv_path, const std::string& channel, const ConfigFlags& flags,
                   std::ostream& out)
{
    std::vector<FitMethod> methods;
    if (flags.method == "all")
        methods = {FitMethod::Mle, FitMethod::YuleWalker, FitMethod::Burg};
    else
        methods = {parse_fit_method(flags.method)};

    const RunConfig cfg = flags.build(methods.front());
    const Recording rec = read_recording_csv(csv_path, cfg.sample_rate_hz);
    const TimeSeries y = prepared(rec, channel, cfg.detection);

    std::vector<FitResult> fits;
    std::size_t rows = 0;
    for (FitMethod m : methods) {
        fits.push_back(fit_with(y, cfg.detection, m));
        rows = std::max(rows, fits.back().model.order());
    }

    auto echo = parameter_echo(cfg);
    echo[1] = "method=" + flags.method;
    echo.push_back("channel=" + channel);
    echo.push_back("samples_fitted=" + std::to_string(y.size()));
    write_echo(out, echo);

    constexpr std::size_t label_w = 16, col_w = 13;
    auto cell = [&](std::optional<double> v) { return pad(v ? csv::fixed(*v, 3) : std::string("-"), col_w); };
    out << pad("AR parameters", label_w, true);
    for (const auto& f : fits)
        out << pad(std::string(display_name(f.method)), col_w);
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        out << pad("a(" + std::to_string(i + 1) + ")", label_w, true);
        for (const auto& f : fits)
            out << cell(i < f.model.order() ? std::optional(f.model.coeffs[i]) : std::nullopt);
        out << '\n';
    }
    out << pad("sigma2_e", label_w, true);
    for (const auto& f : fits)
        out << cell(f.model.sigma2);
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        out << pad("k(" + std::to_string(i + 1) + ")", label_w, true);
        for (const auto& f : fits)
            out << cell(i < f.reflection_coeffs.size() ? std::optional(f.reflection_coeffs[i]) : std::nullopt);
        out << '\n';
    }
    return 0;
}

inline int cmd_order_scan(const std::string& csv_path, const std::string& channel, const ConfigFlags& flags,
                          std::ostream& out)
{
    const RunConfig cfg = flags.build();
    const Recording rec = read_recording_csv(csv_path, cfg.sample_rate_hz);
    const TimeSeries y = prepared(rec, channel, cfg.detection);
    const auto scan = order_scan(y, cfg.detection.p_max, cfg.detection.method, cfg.detection.criterion,
                                 cfg.detection.grid_size);

    auto echo = parameter_echo(cfg);
    echo.push_back("channel=" + channel);
    echo.push_back("samples_fitted=" + std::to_string(y.size()));
    write_echo(out, echo);
    out << "p,sigma2,aic,aicc,bic\n";
    for (const auto& s : scan.per_order) {
        out << s.p << ',' << csv::format_double(s.sigma2) << ',' << csv::format_double(s.aic) << ','
            << (s.aicc ? csv::format_double(*s.aicc) : std::string()) << ',' << csv::format_double(s.bic) << '\n';
    }
    out << "# selected_p=" << scan.selected_p << " criterion=" << to_string(scan.criterion_used) << '\n';
    return 0;
}

inline int cmd_psd(const std::string& csv_path, const std::optional<std::string>& channel, const std::string& dir,
                   const ConfigFlags& flags, std::ostream& out)
{
    const RunConfig cfg = flags.build();
    const auto& d = cfg.detection;
    const Recording rec = read_recording_csv(csv_path, cfg.sample_rate_hz);
    const std::vector<std::string> names = channel ? std::vector{*channel} : rec.names();

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& name : names) {
        const TimeSeries y = prepared(rec, name, d);
        const FitResult fr = fit_with(y, d, d.method);
        SpectrumEstimate psd = ar_psd(fr.model, d.grid_size, y.sample_rate_hz());
        if (d.undifference_correction)
            psd = undifference(psd);
        const MaskedSpectrum masked = threshold_psd(psd, d.k);

        std::ostringstream os;
        auto echo = parameter_echo(cfg);
        echo.push_back("channel=" + name);
        echo.push_back("fitted_order=" + std::to_string(fr.model.order()));
        echo.push_back("mean_power=" + csv::format_double(masked.mean_power));
        write_echo(os, echo);
        os << "freq_hz,psd,psd_masked\n";
        for (std::size_t i = 0; i < psd.size(); ++i)
            os << csv::format_double(psd.freqs_hz[i]) << ',' << csv::format_double(psd.values[i]) << ','
               << csv::format_double(masked.values[i]) << '\n';
        files.emplace_back(std::filesystem::path(dir) / (name + ".csv"), os.str());
    }
    std::filesystem::create_directories(dir);
    for (const auto& [path, content] : files) {
        write_file(path.string(), content);
        out << "wrote " << path.string() << '\n';
    }
    return 0;
}

inline int cmd_detect(const std::string& csv_path, const std::string& report_path, const ConfigFlags& flags,
                      std::ostream& out)
{
    const RunConfig cfg = flags.build();
    const Recording rec = read_recording_csv(csv_path, cfg.sample_rate_hz);
    const DetectionReport report = detect_recording(rec, cfg.detection);

    auto echo = parameter_echo(cfg);
    echo.push_back("input=" + csv_path);
    std::ostringstream os;
    write_report_csv(os, report, echo);
    write_file(report_path, os.str());

    std::size_t flagged = 0, failed = 0;
    for (const auto& c : report.per_channel) {
        if (c.error) {
            ++failed;
            out << c.derivation << ": error: " << *c.error << '\n';
        } else if (c.flagged) {
            ++flagged;
        }
    }
    out << flagged << " of " << report.per_channel.size() << " channels flagged";
    if (failed)
        out << ", " << failed << " failed";
    out << "; report written to " << report_path << '\n';
    return 0;
}

inline std::string percent(const std::optional<double>& v)
{
    return v ? csv::fixed(100.0 * *v, 2) : std::string("n/a");
}

inline int cmd_eval(const std::string& pred_path, const std::string& truth_path,
                    const std::optional<std::string>& out_path, std::ostream& out)
{
    const auto decisions = read_report_csv(pred_path);
    std::vector<std::pair<std::string, bool>> predicted;
    for (const auto& d : decisions) {
        if (d.error)
            throw std::invalid_argument("channel '" + d.derivation + "' has no decision: " + *d.error);
        predicted.emplace_back(d.derivation, d.flagged);
    }
    const auto truth = read_annotations(truth_path);
    const MetricsReport m = evaluate(predicted, truth);

    std::ostringstream os;
    os << "# version=" << version << '\n';
    os << "# pred=" << pred_path << '\n';
    os << "# truth=" << truth_path << '\n';
    os << "tp,fp,tn,fn,sensitivity_pct,specificity_pct,accuracy_pct\n";
    os << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << ','
       << percent(m.sensitivity) << ',' << percent(m.specificity) << ',' << percent(m.accuracy) << '\n';
    if (!m.sensitivity)
        os << "# sensitivity undefined: no annotated positives\n";
    if (!m.specificity)
        os << "# specificity undefined: no annotated negatives\n";
    if (out_path)
        write_file(*out_path, os.str());
    out << os.str();
    return 0;
}

inline int cmd_simulate(const std::string& spec_path, std::uint64_t seed, const std::string& rec_path,
                        const std::string& truth_path, std::ostream& out)
{
    const SimulationSpec spec = read_simulation_spec(spec_path);
    const SimulatedRecording sim = simulate_recording(spec.montage, spec.n, spec.sample_rate_hz, spec.noise_sigma,
                                                      spec.bursts, spec.snr, seed);
    const std::vector<std::string> echo = {
        std::string("version=") + version,
        std::string("generator=") + generator_name,
        "seed=" + std::to_string(seed),
        "spec=" + spec_path,
        "n=" + std::to_string(spec.n),
        "noise_sigma=" + csv::format_double(spec.noise_sigma),
        "snr=" + csv::format_double(spec.snr),
        "bursts=" + std::to_string(spec.bursts.size()),
    };
    std::ostringstream rec_os, truth_os;
    write_recording_csv(rec_os, sim.recording, echo);
    write_annotations(truth_os, sim.annotations, spec.montage, echo);
    write_file(rec_path, rec_os.str());
    write_file(truth_path, truth_os.str());
    out << "simulated " << spec.montage.size() << " channels x " << spec.n << " samples -> " << rec_path << ", "
        << truth_path << '\n';
    return 0;
}

}  // namespace cli_detail

/// Runs the CLI on `args` (args[0] is the program name).  Returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    using namespace cli_detail;
    CLI::App app{"AR spectral estimation and low-frequency rhythm detection", "arpsd"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);

    std::string csv_path, channel, dir, report_path, pred_path, truth_path, spec_path, rec_path;
    std::optional<std::string> eval_out;
    bool all_channels = false;
    std::uint64_t seed = 0;

    ConfigFlags fit_flags, scan_flags, psd_flags, detect_flags;

    auto* fit_cmd = app.add_subcommand("fit", "fit AR models to one channel and print the parameters");
    fit_cmd->add_option("csv", csv_path, "recording CSV")->required();
    fit_cmd->add_option("--channel", channel, "derivation name")->required();
    fit_flags.attach(*fit_cmd, true);

    auto* scan_cmd = app.add_subcommand("order-scan", "tabulate AIC/AICc/BIC over orders 1..pmax");
    scan_cmd->add_option("csv", csv_path, "recording CSV")->required();
    scan_cmd->add_option("--channel", channel, "derivation name")->required();
    scan_flags.attach(*scan_cmd, false);

    auto* psd_cmd = app.add_subcommand("psd", "write freq_hz,psd,psd_masked per channel");
    psd_cmd->add_option("csv", csv_path, "recording CSV")->required();
    auto* psd_channel = psd_cmd->add_option("--channel", channel, "derivation name");
    auto* psd_all = psd_cmd->add_flag("--all", all_channels, "every channel");
    psd_channel->excludes(psd_all);
    psd_cmd->add_option("--out", dir, "output directory")->required();
    psd_flags.attach(*psd_cmd, false);

    auto* detect_cmd = app.add_subcommand("detect", "flag channels dominated by low-frequency rhythm");
    detect_cmd->add_option("csv", csv_path, "recording CSV")->required();
    detect_cmd->add_option("--out", report_path, "report CSV")->required();
    detect_flags.attach(*detect_cmd, false);

    auto* eval_cmd = app.add_subcommand("eval", "score a detection report against annotations");
    eval_cmd->add_option("--pred", pred_path, "detection report CSV")->required();
    eval_cmd->add_option("--truth", truth_path, "annotation CSV (derivation,label)")->required();
    eval_cmd->add_option("--out", eval_out, "also write the metrics CSV here");

    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic recording with known truth");
    sim_cmd->add_option("--spec", spec_path, "simulation spec CSV")->required();
    sim_cmd->add_option("--seed", seed, "generator seed")->required();
    sim_cmd->add_option("--out", rec_path, "recording CSV to write")->required();
    sim_cmd->add_option("--truth", truth_path, "annotation CSV to write")->required();

    std::vector<std::string> argv_store = args.empty() ? std::vector<std::string>{"arpsd"} : args;
    std::vector<const char*> argv;
    argv.reserve(argv_store.size());
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        const auto parsed = app.get_subcommands();
        err << "error: " << e.what() << "\n\n" << (parsed.empty() ? app.help() : parsed.front()->help());
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (*fit_cmd)
            return cmd_fit(csv_path, channel, fit_flags, out);
        if (*scan_cmd)
            return cmd_order_scan(csv_path, channel, scan_flags, out);
        if (*psd_cmd) {
            if (channel.empty() && !all_channels)
                throw std::invalid_argument("psd needs --channel NAME or --all");
            return cmd_psd(csv_path, channel.empty() ? std::nullopt : std::optional(channel), dir, psd_flags, out);
        }
        if (*detect_cmd)
            return cmd_detect(csv_path, report_path, detect_flags, out);
        if (*eval_cmd)
            return cmd_eval(pred_path, truth_path, eval_out, out);
        if (*sim_cmd)
            return cmd_simulate(spec_path, seed, rec_path, truth_path, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace arpsd

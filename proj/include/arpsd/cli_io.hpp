#pragma once

/** @file
 * CSV formats for recordings, annotations, detection reports and simulation
 * specs, plus the run configuration echoed into every output file.
 *
 * Recording CSV: optional leading '#' comment lines (one may be "# fs=<hz>"),
 * a header row of channel names, then one row of finite decimals per sample.
 */

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <vector>

#include "arpsd/core_types.hpp"
#include "arpsd/detect_eval.hpp"
#include "arpsd/synthgen.hpp"

namespace arpsd {

inline constexpr const char* version = "0.1.0";

/// Error in an input file; what() names the source and line.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& source, std::size_t line, const std::string& msg)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line)
    {
    }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace csv {

[[nodiscard]] inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[nodiscard]] inline std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) noexcept
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the same double.
[[nodiscard]] inline std::string format_double(double v)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

[[nodiscard]] inline std::string fixed(double v, int decimals)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
    return os.str();
}

/// "key=value" from a comment line body, or nullopt.
[[nodiscard]] inline std::optional<std::pair<std::string, std::string>> comment_kv(std::string_view body)
{
    body = trim(body);
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
        return std::nullopt;
    return std::pair{std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1)))};
}

/// Line reader that tracks 1-based physical line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line)
    {
        if (!std::getline(in_, line))
            return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    }
    [[nodiscard]] std::size_t line_no() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return in;
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace csv

// --- recordings -------------------------------------------------------------

[[nodiscard]] inline Recording read_recording_csv(std::istream& in, double default_fs_hz = 128.0,
                                                  const std::string& source = "<recording>")
{
    csv::LineReader reader(in);
    std::string line;
    double fs = default_fs_hz;
    std::vector<std::string> header;
    while (reader.next(line)) {
        const auto t = csv::trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            if (const auto kv = csv::comment_kv(t.substr(1)); kv && kv->first == "fs") {
                const auto v = csv::parse_double(kv->second);
                if (!v || !(*v > 0.0))
                    throw FormatError(source, reader.line_no(), "invalid sample rate '" + kv->second + "'");
                fs = *v;
            }
            continue;
        }
        header = csv::split(t);
        break;
    }
    if (header.empty())
        throw FormatError(source, reader.line_no(), "missing header row");
    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
        if (h.empty())
            throw FormatError(source, reader.line_no(), "empty channel name in header");
        if (!seen.insert(h).second)
            throw FormatError(source, reader.line_no(), "duplicate channel name '" + h + "'");
    }

    std::vector<std::vector<double>> columns(header.size());
    while (reader.next(line)) {
        const auto t = csv::trim(line);
        if (t.empty())
            continue;
        const auto cells = csv::split(t);
        if (cells.size() != header.size())
            throw FormatError(source, reader.line_no(),
                              "expected " + std::to_string(header.size()) + " cells, found " +
                                  std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = csv::parse_double(cells[c]);
            if (!v)
                throw FormatError(source, reader.line_no(), "non-numeric cell '" + cells[c] + "'");
            columns[c].push_back(*v);
        }
    }
    if (columns.front().empty())
        throw FormatError(source, reader.line_no(), "no sample rows");

    std::vector<Recording::Channel> channels;
    channels.reserve(header.size());
    for (std::size_t c = 0; c < header.size(); ++c)
        channels.emplace_back(header[c], TimeSeries(std::move(columns[c]), fs));
    return Recording(std::move(channels));
}

[[nodiscard]] inline Recording read_recording_csv(const std::string& path, double default_fs_hz = 128.0)
{
    auto in = csv::open_input(path);
    return read_recording_csv(in, default_fs_hz, path);
}

/// Writes "# fs=", the extra comment lines, the header and the samples.
inline void write_recording_csv(std::ostream& out, const Recording& rec,
                                const std::vector<std::string>& comments = {})
{
    out << "# fs=" << csv::format_double(rec.sample_rate_hz()) << '\n';
    for (const auto& c : comments)
        out << "# " << c << '\n';
    const auto& ch = rec.channels();
    for (std::size_t c = 0; c < ch.size(); ++c)
        out << (c ? "," : "") << ch[c].first;
    out << '\n';
    for (std::size_t i = 0; i < rec.sample_count(); ++i) {
        for (std::size_t c = 0; c < ch.size(); ++c)
            out << (c ? "," : "") << csv::format_double(ch[c].second.values()[i]);
        out << '\n';
    }
}

// --- annotations ------------------------------------------------------------

/// "derivation,label" with label in {0,1}.
[[nodiscard]] inline std::map<std::string, bool> read_annotations(std::istream& in,
                                                                  const std::string& source = "<annotations>")
{
    csv::LineReader reader(in);
    std::string line;
    bool header_seen = false;
    std::map<std::string, bool> out;
    while (reader.next(line)) {
        const auto t = csv::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto cells = csv::split(t);
        if (!header_seen) {
            if (cells.size() != 2 || cells[0] != "derivation" || cells[1] != "label")
                throw FormatError(source, reader.line_no(), "expected header 'derivation,label'");
            header_seen = true;
            continue;
        }
        if (cells.size() != 2)
            throw FormatError(source, reader.line_no(), "expected 2 cells");
        if (cells[1] != "0" && cells[1] != "1")
            throw FormatError(source, reader.line_no(), "label must be 0 or 1, found '" + cells[1] + "'");
        if (!out.emplace(cells[0], cells[1] == "1").second)
            throw FormatError(source, reader.line_no(), "duplicate derivation '" + cells[0] + "'");
    }
    if (!header_seen)
        throw FormatError(source, reader.line_no(), "missing header 'derivation,label'");
    return out;
}

[[nodiscard]] inline std::map<std::string, bool> read_annotations(const std::string& path)
{
    auto in = csv::open_input(path);
    return read_annotations(in, path);
}

/// Rows follow `order`; names absent from `labels` are skipped.
inline void write_annotations(std::ostream& out, const std::map<std::string, bool>& labels,
                              const std::vector<std::string>& order, const std::vector<std::string>& comments = {})
{
    for (const auto& c : comments)
        out << "# " << c << '\n';
    out << "derivation,label\n";
    for (const auto& name : order)
        if (const auto it = labels.find(name); it != labels.end())
            out << name << ',' << (it->second ? 1 : 0) << '\n';
}

// --- run configuration ------------------------------------------------------

struct RunConfig {
    DetectionConfig detection;
    double sample_rate_hz = 128.0;
};

[[nodiscard]] inline std::string format_bands(const std::vector<FrequencyBand>& bands)
{
    std::string s;
    for (const auto& b : bands) {
        if (!s.empty())
            s += ';';
        s += b.name + ':' + csv::format_double(b.lo_hz) + ':' + csv::format_double(b.hi_hz);
    }
    return s;
}

/// Parses "name:lo:hi;name:lo:hi;...".
[[nodiscard]] inline std::vector<FrequencyBand> parse_bands(std::string_view spec)
{
    std::vector<FrequencyBand> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto semi = spec.find(';', start);
        const auto item = csv::trim(spec.substr(start, semi == spec.npos ? spec.npos : semi - start));
        if (!item.empty()) {
            const auto c1 = item.find(':');
            const auto c2 = c1 == item.npos ? item.npos : item.find(':', c1 + 1);
            if (c2 == item.npos)
                throw std::invalid_argument("band '" + std::string(item) + "' is not name:lo:hi");
            const auto lo = csv::parse_double(item.substr(c1 + 1, c2 - c1 - 1));
            const auto hi = csv::parse_double(item.substr(c2 + 1));
            if (!lo || !hi)
                throw std::invalid_argument("band '" + std::string(item) + "' has non-numeric edges");
            out.emplace_back(std::string(item.substr(0, c1)), *lo, *hi);
        }
        if (semi == spec.npos)
            break;
        start = semi + 1;
    }
    if (out.empty())
        throw std::invalid_argument("no bands given");
    require_disjoint(out);
    return out;
}

/// key=value lines reproducing the configuration.
[[nodiscard]] inline std::vector<std::string> parameter_echo(const RunConfig& cfg)
{
    const auto& d = cfg.detection;
    return {
        std::string("version=") + version,
        "method=" + std::string(to_string(d.method)),
        "order=" + (d.order ? std::to_string(*d.order) : std::string("auto")),
        "criterion=" + std::string(to_string(d.criterion)),
        "p_max=" + std::to_string(d.p_max),
        "diff_order=" + std::to_string(d.diff_order),
        "k=" + csv::format_double(d.k),
        "rho=" + csv::format_double(d.rho),
        "grid_size=" + std::to_string(d.grid_size),
        "sample_rate_hz=" + csv::format_double(cfg.sample_rate_hz),
        "bands=" + format_bands(d.bands),
        "undifference_correction=" + std::string(d.undifference_correction ? "on" : "off"),
        "rule=flag iff surviving power > 0 and (delta+theta)/surviving >= rho",
    };
}

// --- detection reports ------------------------------------------------------

inline void write_report_csv(std::ostream& out, const DetectionReport& report,
                             const std::vector<std::string>& echo)
{
    for (const auto& e : echo)
        out << "# " << e << '\n';
    out << "derivation,flagged,dominant_band,low_band_fraction,survivor_fraction,order,error\n";
    for (const auto& c : report.per_channel) {
        out << c.derivation << ',';
        if (c.error) {
            std::string msg = *c.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n')
                    ch = ';';
            out << ",,,,," << msg << '\n';
            continue;
        }
        out << (c.flagged ? 1 : 0) << ',' << c.dominant_band << ',' << csv::format_double(c.low_band_fraction)
            << ',' << csv::format_double(c.survivor_fraction) << ',' << c.order << ",\n";
    }
}

[[nodiscard]] inline std::vector<ChannelDecision> read_report_csv(std::istream& in,
                                                                  const std::string& source = "<report>")
{
    csv::LineReader reader(in);
    std::string line;
    bool header_seen = false;
    std::vector<ChannelDecision> out;
    while (reader.next(line)) {
        const auto t = csv::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        auto cells = csv::split(t);
        if (!header_seen) {
            if (cells.size() < 5 || cells[0] != "derivation" || cells[1] != "flagged")
                throw FormatError(source, reader.line_no(), "expected a detection report header");
            header_seen = true;
            continue;
        }
        if (cells.size() < 5 || cells.size() > 7)
            throw FormatError(source, reader.line_no(), "expected 5 to 7 cells");
        ChannelDecision d;
        d.derivation = cells[0];
        if (cells.size() == 7 && !cells[6].empty()) {
            d.error = cells[6];
            out.push_back(std::move(d));
            continue;
        }
        if (cells[1] != "0" && cells[1] != "1")
            throw FormatError(source, reader.line_no(), "flagged must be 0 or 1");
        d.flagged = cells[1] == "1";
        d.dominant_band = cells[2];
        const auto low = csv::parse_double(cells[3]);
        const auto surv = csv::parse_double(cells[4]);
        if (!low || !surv)
            throw FormatError(source, reader.line_no(), "non-numeric fraction");
        d.low_band_fraction = *low;
        d.survivor_fraction = *surv;
        if (cells.size() >= 6 && !cells[5].empty()) {
            const auto p = csv::parse_double(cells[5]);
            if (!p || *p < 0.0)
                throw FormatError(source, reader.line_no(), "invalid order");
            d.order = static_cast<std::size_t>(*p);
        }
        out.push_back(std::move(d));
    }
    if (!header_seen)
        throw FormatError(source, reader.line_no(), "missing header");
    return out;
}

[[nodiscard]] inline std::vector<ChannelDecision> read_report_csv(const std::string& path)
{
    auto in = csv::open_input(path);
    return read_report_csv(in, path);
}

// --- simulation specs -------------------------------------------------------

/**
 * Simulation spec CSV:
 *
 *     # n=2560
 *     # fs=128
 *     # noise_sigma=1
 *     # snr=10
 *     # montage=default            (or names separated by ';')
 *     channel,center_hz,pole_radius,gain
 *     F8-T4,5,0.98,1
 *
 * Every comment key is optional; the defaults are shown above.
 */
struct SimulationSpec {
    std::size_t n = 2560;
    double sample_rate_hz = 128.0;
    double noise_sigma = 1.0;
    double snr = 10.0;
    std::vector<std::string> montage = default_montage();
    std::vector<BurstSpec> bursts;
};

[[nodiscard]] inline SimulationSpec read_simulation_spec(std::istream& in, const std::string& source = "<spec>")
{
    SimulationSpec spec;
    csv::LineReader reader(in);
    std::string line;
    bool header_seen = false;
    auto number = [&](const std::string& key, const std::string& text) {
        const auto v = csv::parse_double(text);
        if (!v)
            throw FormatError(source, reader.line_no(), "invalid value for " + key + ": '" + text + "'");
        return *v;
    };
    while (reader.next(line)) {
        const auto t = csv::trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            const auto kv = csv::comment_kv(t.substr(1));
            if (!kv)
                continue;
            const auto& [key, value] = *kv;
            if (key == "n") {
                const double v = number(key, value);
                if (!(v >= 1.0) || v != std::floor(v))
                    throw FormatError(source, reader.line_no(), "n must be a positive integer");
                spec.n = static_cast<std::size_t>(v);
            } else if (key == "fs") {
                spec.sample_rate_hz = number(key, value);
            } else if (key == "noise_sigma") {
                spec.noise_sigma = number(key, value);
            } else if (key == "snr") {
                spec.snr = number(key, value);
            } else if (key == "montage") {
                if (value != "default") {
                    spec.montage.clear();
                    std::string_view rest = value;
                    while (!rest.empty()) {
                        const auto semi = rest.find(';');
                        const auto name = csv::trim(rest.substr(0, semi));
                        if (!name.empty())
                            spec.montage.emplace_back(name);
                        rest = semi == rest.npos ? std::string_view{} : rest.substr(semi + 1);
                    }
                }
            }
            continue;
        }
        const auto cells = csv::split(t);
        if (!header_seen) {
            if (cells.size() < 2 || cells[0] != "channel" || cells[1] != "center_hz")
                throw FormatError(source, reader.line_no(), "expected header 'channel,center_hz,pole_radius,gain'");
            header_seen = true;
            continue;
        }
        if (cells.size() < 2 || cells.size() > 4)
            throw FormatError(source, reader.line_no(), "expected 2 to 4 cells");
        BurstSpec b;
        b.channel = cells[0];
        b.center_hz = number("center_hz", cells[1]);
        if (cells.size() >= 3 && !cells[2].empty())
            b.pole_radius = number("pole_radius", cells[2]);
        if (cells.size() >= 4 && !cells[3].empty())
            b.gain = number("gain", cells[3]);
        spec.bursts.push_back(std::move(b));
    }
    return spec;
}

[[nodiscard]] inline SimulationSpec read_simulation_spec(const std::string& path)
{
    auto in = csv::open_input(path);
    return read_simulation_spec(in, path);
}

}  // namespace arpsd

#include <greenmig/energy_trace.hpp>
#include <greenmig/random.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <random>

namespace greenmig {

namespace {

constexpr std::string_view kTraceHeader = "site_id,start_s,duration_s";

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view field, std::size_t line, const char* name)
{
    field = trim(field);
    // from_chars for double is not available on every toolchain we target.
    std::string buf(field);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
        throw ParseError(line, fmt::format("invalid {} '{}'", name, field));
    }
    return v;
}

std::uint32_t parse_site(std::string_view field, std::size_t line)
{
    field = trim(field);
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line, fmt::format("invalid site_id '{}'", field));
    }
    return v;
}

} // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line)
{
}

SiteEnergyTrace::SiteEnergyTrace(SiteId site, std::vector<EnergyWindow> windows)
    : site_(site), windows_(std::move(windows))
{
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        const EnergyWindow& w = windows_[i];
        if (w.site != site_) {
            throw std::invalid_argument("window belongs to a different site");
        }
        if (w.duration.value() <= 0.0) {
            throw std::invalid_argument("window duration must be > 0");
        }
        if (i > 0 && w.start.value() < windows_[i - 1].end()) {
            throw std::invalid_argument(
                fmt::format("site {}: windows unsorted or overlapping at index {}", site_, i));
        }
    }
}

std::optional<EnergyWindow> SiteEnergyTrace::window_at(double t) const
{
    // Last window starting at or before t.
    auto it = std::upper_bound(windows_.begin(), windows_.end(), t,
                               [](double x, const EnergyWindow& w) { return x < w.start.value(); });
    if (it == windows_.begin()) {
        return std::nullopt;
    }
    --it;
    if (it->contains(t)) {
        return *it;
    }
    return std::nullopt;
}

double SiteEnergyTrace::covered_seconds(double from, double to) const
{
    double total = 0.0;
    for (const EnergyWindow& w : windows_) {
        const double lo = std::max(from, w.start.value());
        const double hi = std::min(to, w.end());
        if (hi > lo) {
            total += hi - lo;
        }
    }
    return total;
}

TraceSet::TraceSet(std::vector<SiteEnergyTrace> sites) : sites_(std::move(sites))
{
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (sites_[i].site() != i) {
            throw std::invalid_argument("trace set must be indexed by dense site id");
        }
    }
}

TraceSet TraceSet::empty(std::size_t site_count)
{
    std::vector<SiteEnergyTrace> sites;
    sites.reserve(site_count);
    for (std::size_t i = 0; i < site_count; ++i) {
        sites.emplace_back(static_cast<SiteId>(i));
    }
    return TraceSet{std::move(sites)};
}

const SiteEnergyTrace& TraceSet::site(SiteId id) const
{
    if (id >= sites_.size()) {
        throw std::out_of_range(fmt::format("unknown site {}", id));
    }
    return sites_[id];
}

std::size_t TraceSet::window_count() const
{
    std::size_t n = 0;
    for (const auto& s : sites_) {
        n += s.windows().size();
    }
    return n;
}

bool TraceSet::operator==(const TraceSet& other) const
{
    if (sites_.size() != other.sites_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const auto& a = sites_[i].windows();
        const auto& b = other.sites_[i].windows();
        if (a.size() != b.size()) {
            return false;
        }
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k].start != b[k].start || a[k].duration != b[k].duration) {
                return false;
            }
        }
    }
    return true;
}

void TraceGenConfig::validate() const
{
    if (horizon.value() <= 0.0) {
        throw std::invalid_argument("trace horizon must be > 0");
    }
    if (!(windows_per_site_per_day > 0.0) || !std::isfinite(windows_per_site_per_day)) {
        throw std::invalid_argument("window rate must be > 0");
    }
    if (!(min_duration <= mean_duration && mean_duration <= max_duration)) {
        throw std::invalid_argument("window durations must satisfy min <= mean <= max");
    }
    if (min_duration.value() <= 0.0) {
        throw std::invalid_argument("minimum window duration must be > 0");
    }
}

TraceSet generate_trace(const TraceGenConfig& config)
{
    config.validate();
    const double horizon = config.horizon.value();
    const double mean_gap = 86400.0 / config.windows_per_site_per_day;

    std::vector<SiteEnergyTrace> sites;
    sites.reserve(config.sites);
    for (std::size_t s = 0; s < config.sites; ++s) {
        std::mt19937_64 rng(derive_seed(config.seed, {0x7472616365ULL, s}));
        std::exponential_distribution<double> gap(1.0 / mean_gap);
        std::exponential_distribution<double> length(1.0 / config.mean_duration.value());

        std::vector<EnergyWindow> windows;
        double t = gap(rng);
        while (t < horizon) {
            const double d = std::clamp(length(rng), config.min_duration.value(), config.max_duration.value());
            const double end = std::min(t + d, horizon);
            if (!windows.empty() && t < windows.back().end()) {
                EnergyWindow& prev = windows.back();
                prev.duration = Seconds{std::max(prev.end(), end) - prev.start.value()};
            } else {
                windows.push_back(EnergyWindow{static_cast<SiteId>(s), Seconds{t}, Seconds{end - t}});
            }
            t += gap(rng);
        }
        sites.emplace_back(static_cast<SiteId>(s), std::move(windows));
    }
    return TraceSet{std::move(sites)};
}

TraceSet ingest_trace(std::string_view text, std::optional<std::size_t> site_count)
{
    std::vector<std::vector<EnergyWindow>> per_site(site_count.value_or(0));
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != kTraceHeader) {
                throw ParseError(line_no, fmt::format("expected header '{}'", kTraceHeader));
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ParseError(line_no, fmt::format("expected 3 fields, got {}", fields.size()));
        }
        const SiteId site = parse_site(fields[0], line_no);
        const double start = parse_number(fields[1], line_no, "start_s");
        const double duration = parse_number(fields[2], line_no, "duration_s");
        if (start < 0.0) {
            throw ParseError(line_no, "start_s must be >= 0");
        }
        if (duration <= 0.0) {
            throw ParseError(line_no, "duration_s must be > 0");
        }
        if (site_count && site >= *site_count) {
            throw ParseError(line_no, fmt::format("unknown site {}", site));
        }
        if (site >= per_site.size()) {
            per_site.resize(site + 1);
        }
        auto& windows = per_site[site];
        if (!windows.empty() && start < windows.back().end()) {
            throw ParseError(line_no, fmt::format("window for site {} is unsorted or overlaps the previous one", site));
        }
        windows.push_back(EnergyWindow{site, Seconds{start}, Seconds{duration}});
    }
    if (!header_seen) {
        throw ParseError(1, fmt::format("missing header '{}'", kTraceHeader));
    }
    std::vector<SiteEnergyTrace> sites;
    sites.reserve(per_site.size());
    for (std::size_t i = 0; i < per_site.size(); ++i) {
        sites.emplace_back(static_cast<SiteId>(i), std::move(per_site[i]));
    }
    return TraceSet{std::move(sites)};
}

std::string serialize_trace(const TraceSet& traces)
{
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& site : traces.sites()) {
        for (const EnergyWindow& w : site.windows()) {
            // Shortest round-trip representation.
            out += fmt::format("{},{},{}\n", w.site, w.start.value(), w.duration.value());
        }
    }
    return out;
}

bool renewable_at(const TraceSet& traces, SiteId site, Seconds t)
{
    return traces.site(site).window_at(t.value()).has_value();
}

WindowForecast forecast_remaining(const TraceSet& traces, SiteId site, Seconds now, Seconds sigma,
                                  std::uint64_t seed)
{
    const auto window = traces.site(site).window_at(now.value());
    if (!window) {
        return WindowForecast{Seconds{0.0}, sigma};
    }
    const double truth = window->end() - now.value();
    if (sigma.value() == 0.0) {
        return WindowForecast{Seconds{truth}, sigma};
    }
    std::mt19937_64 rng(derive_seed(seed, {0x666f7265ULL, site, std::bit_cast<std::uint64_t>(now.value())}));
    return WindowForecast{Seconds{truncated_normal(rng, truth, sigma.value(), 0.0)}, sigma};
}

} // namespace greenmig

#pragma once

#include <greenmig/feasibility.hpp>
#include <greenmig/units.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace greenmig {

/// Sites are dense non-negative integers.
using SiteId = std::uint32_t;

/// Raised by the CSV readers; carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// One contiguous renewable-surplus interval, [start, start + duration).
struct EnergyWindow {
    SiteId site{0};
    Seconds start;
    Seconds duration;

    [[nodiscard]] double end() const { return start.value() + duration.value(); }
    [[nodiscard]] bool contains(double t) const { return start.value() <= t && t < end(); }
};

/// Windows of a single site, sorted by start and non-overlapping.
class SiteEnergyTrace {
public:
    explicit SiteEnergyTrace(SiteId site, std::vector<EnergyWindow> windows = {});

    [[nodiscard]] SiteId site() const { return site_; }
    [[nodiscard]] const std::vector<EnergyWindow>& windows() const { return windows_; }

    /// Window containing `t`, if any.
    [[nodiscard]] std::optional<EnergyWindow> window_at(double t) const;

    /// Total renewable seconds inside [from, to).
    [[nodiscard]] double covered_seconds(double from, double to) const;

private:
    SiteId site_;
    std::vector<EnergyWindow> windows_;
};

/// Traces for sites 0..site_count()-1, indexed by site id.
class TraceSet {
public:
    TraceSet() = default;
    explicit TraceSet(std::vector<SiteEnergyTrace> sites);

    /// A trace set with `site_count` sites and no windows.
    static TraceSet empty(std::size_t site_count);

    [[nodiscard]] std::size_t site_count() const { return sites_.size(); }
    [[nodiscard]] const std::vector<SiteEnergyTrace>& sites() const { return sites_; }
    /// Throws std::out_of_range for an unknown site.
    [[nodiscard]] const SiteEnergyTrace& site(SiteId id) const;
    [[nodiscard]] std::size_t window_count() const;

    bool operator==(const TraceSet& other) const;

private:
    std::vector<SiteEnergyTrace> sites_;
};

struct TraceGenConfig {
    std::uint64_t seed{1};
    Seconds horizon{7.0 * 24.0 * 3600.0};
    std::size_t sites{5};
    Seconds mean_duration{Seconds::from_hours(2.5)};
    Seconds min_duration{Seconds::from_hours(0.5)};
    Seconds max_duration{Seconds::from_hours(9.5)};
    double windows_per_site_per_day{1.0};

    void validate() const;
};

/// Poisson window arrivals per site with exponential durations clipped to
/// [min_duration, max_duration]; overlapping windows are merged and windows
/// are cut at the horizon.
TraceSet generate_trace(const TraceGenConfig& config);

/// Parses the `site_id,start_s,duration_s` CSV. When `site_count` is given,
/// site ids at or above it are rejected; otherwise the set spans 0..max id.
TraceSet ingest_trace(std::string_view text, std::optional<std::size_t> site_count = std::nullopt);

std::string serialize_trace(const TraceSet& traces);

bool renewable_at(const TraceSet& traces, SiteId site, Seconds t);

/// Remaining renewable time at `site` seen from `now`. Outside a window the
/// remaining time is 0. Inside one, the true remainder is perturbed by
/// Normal(0, sigma) noise truncated at 0, drawn deterministically from
/// (seed, site, now).
WindowForecast forecast_remaining(const TraceSet& traces, SiteId site, Seconds now, Seconds sigma,
                                  std::uint64_t seed);

} // namespace greenmig

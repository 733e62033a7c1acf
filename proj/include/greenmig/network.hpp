#pragma once

#include <greenmig/energy_trace.hpp>
#include <greenmig/units.hpp>

#include <cstdint>
#include <string_view>
#include <vector>

namespace greenmig {

/// Directed inter-site links. Self-links are never consulted.
class Topology {
public:
    /// Every ordered pair of distinct sites linked at `bw`.
    static Topology full_mesh(std::size_t site_count, Bandwidth bw);

    [[nodiscard]] std::size_t site_count() const { return site_count_; }

    /// Throws std::invalid_argument for src == dst or an unknown site.
    [[nodiscard]] Bandwidth link(SiteId src, SiteId dst) const;
    void set_link(SiteId src, SiteId dst, Bandwidth bw);

private:
    Topology(std::size_t site_count, Bandwidth bw);
    void check_pair(SiteId src, SiteId dst) const;

    std::size_t site_count_;
    std::vector<Bandwidth> links_; // row-major [src * n + dst]
};

/// Reads a `src,dst,gbps` CSV. Listed links override a full mesh at `default_bw`.
Topology ingest_topology(std::string_view text, std::size_t site_count, Bandwidth default_bw);

struct BandwidthNoise {
    double relative_sigma{0.0};
};

/// Observed bandwidth on src->dst at `now`: the nominal link capacity scaled by
/// a Normal(1, relative_sigma) factor truncated below at 0.05. Reproducible per
/// (seed, src, dst, now); zero noise returns the nominal value exactly.
Bandwidth measure_bandwidth(const Topology& topology, SiteId src, SiteId dst, Seconds now,
                            BandwidthNoise noise, std::uint64_t seed);

} // namespace greenmig

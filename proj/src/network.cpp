#include <greenmig/network.hpp>
#include <greenmig/random.hpp>

#include <fmt/format.h>

#include <bit>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace greenmig {

namespace {

constexpr double kMinBandwidthFactor = 0.05;

} // namespace

Topology::Topology(std::size_t site_count, Bandwidth bw) : site_count_(site_count), links_(site_count * site_count, bw)
{
    if (site_count == 0) {
        throw std::invalid_argument("topology needs at least one site");
    }
}

Topology Topology::full_mesh(std::size_t site_count, Bandwidth bw)
{
    return Topology{site_count, bw};
}

void Topology::check_pair(SiteId src, SiteId dst) const
{
    if (src >= site_count_ || dst >= site_count_) {
        throw std::invalid_argument(fmt::format("unknown site in link {}->{}", src, dst));
    }
    if (src == dst) {
        throw std::invalid_argument(fmt::format("self-link {}->{} has no bandwidth", src, dst));
    }
}

Bandwidth Topology::link(SiteId src, SiteId dst) const
{
    check_pair(src, dst);
    return links_[static_cast<std::size_t>(src) * site_count_ + dst];
}

void Topology::set_link(SiteId src, SiteId dst, Bandwidth bw)
{
    check_pair(src, dst);
    links_[static_cast<std::size_t>(src) * site_count_ + dst] = bw;
}

Topology ingest_topology(std::string_view text, std::size_t site_count, Bandwidth default_bw)
{
    Topology topo = Topology::full_mesh(site_count, default_bw);
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != "src,dst,gbps") {
                throw ParseError(line_no, "expected header 'src,dst,gbps'");
            }
            header_seen = true;
            continue;
        }
        unsigned long src = 0;
        unsigned long dst = 0;
        double gbps = 0.0;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%lu,%lu,%lf%n", &src, &dst, &gbps, &consumed) != 3 ||
            static_cast<std::size_t>(consumed) != line.size()) {
            throw ParseError(line_no, fmt::format("malformed link row '{}'", line));
        }
        try {
            topo.set_link(static_cast<SiteId>(src), static_cast<SiteId>(dst), Bandwidth::from_gbps(gbps));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!header_seen) {
        throw ParseError(1, "missing header 'src,dst,gbps'");
    }
    return topo;
}

Bandwidth measure_bandwidth(const Topology& topology, SiteId src, SiteId dst, Seconds now,
                            BandwidthNoise noise, std::uint64_t seed)
{
    const Bandwidth nominal = topology.link(src, dst);
    if (noise.relative_sigma < 0.0) {
        throw std::invalid_argument("bandwidth noise must be >= 0");
    }
    if (noise.relative_sigma == 0.0) {
        return nominal;
    }
    std::mt19937_64 rng(derive_seed(seed, {0x6e6574ULL, src, dst, std::bit_cast<std::uint64_t>(now.value())}));
    const double factor = truncated_normal(rng, 1.0, noise.relative_sigma, kMinBandwidthFactor);
    return Bandwidth{nominal.bits_per_second() * factor};
}

} // namespace greenmig

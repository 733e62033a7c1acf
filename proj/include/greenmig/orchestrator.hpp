#pragma once

#include <greenmig/energy_trace.hpp>
#include <greenmig/feasibility.hpp>
#include <greenmig/network.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace greenmig {

using JobId = std::uint32_t;

enum class JobStatus { queued, running, migrating, done };

/// Scheduler view of a job: checkpoint size S and remaining compute time tau.
struct JobState {
    JobId id{0};
    ByteSize checkpoint;
    Seconds remaining_compute;
    SiteId site{0};
    JobStatus status{JobStatus::queued};
};

/// Per-site observables at one scheduling instant.
struct SiteSnapshot {
    SiteId site{0};
    bool renewable_active{false};
    WindowForecast forecast;
    std::size_t running_count{0};
    std::size_t queued_count{0};
    std::size_t slots{4};
};

/// Weights of renewable availability (gamma) against load (beta).
struct UtilityParams {
    double gamma{1.0};
    double beta{0.5};
};

enum class PolicyKind { Static, EnergyOnly, FeasibilityAware, Oracle };

std::string_view to_string(PolicyKind p);
/// Accepts the CLI spellings: static, energy-only, feasibility, oracle.
std::optional<PolicyKind> parse_policy(std::string_view s);

struct MigrationDecision {
    JobId job{0};
    SiteId src{0};
    SiteId dst{0};
    FeasibilityVerdict verdict;
    double benefit{0.0}; // seconds-equivalent
};

/// Everything a scheduling pass needs besides jobs and snapshots.
struct SchedulerContext {
    FeasibilityParams params;
    UtilityParams utility;
    BandwidthNoise noise;
    /// When set, destinations with sigma > 0 use the chance-constrained time gate.
    std::optional<double> epsilon;
    Seconds now;
    std::uint64_t seed{0};
};

struct Destination {
    SiteId site{0};
    FeasibilityVerdict verdict;
};

/// Feasible migration targets of a running job: every other site whose verdict
/// passes the time gate, the energy gate and is not class C.
std::vector<Destination> feasible_destinations(const JobState& job, std::span<const SiteSnapshot> snapshots,
                                               const Topology& topology, const SchedulerContext& ctx);

/// gamma * R - beta * L with R = [renewable] * min(1, remaining / 1 h) and
/// L = (running + queued) / slots.
double utility(const SiteSnapshot& snapshot, const UtilityParams& up);

/// Utility gap scaled by min(remaining compute, destination window), in seconds.
double calc_benefit(const JobState& job, const SiteSnapshot& src, const SiteSnapshot& dst, const UtilityParams& up);

/// One scheduling pass. Snapshots must be indexed by site id and cover the
/// topology. Jobs are visited in the given order; each emitted decision moves
/// one unit of load from src to dst in the pass's working copy of the snapshots.
std::vector<MigrationDecision> scheduler_tick(std::span<const JobState> jobs, std::span<const SiteSnapshot> snapshots,
                                              const Topology& topology, PolicyKind policy,
                                              const SchedulerContext& ctx);

} // namespace greenmig

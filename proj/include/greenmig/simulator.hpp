#pragma once

#include <greenmig/energy_trace.hpp>
#include <greenmig/feasibility.hpp>
#include <greenmig/network.hpp>
#include <greenmig/orchestrator.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace greenmig {

/// Checkpoint-size regime a job was drawn from (A: 1-6 GiB, B: 10-40 GiB, C: 100-300 GiB
/// by default). Distinct from FeasibilityClass, which depends on bandwidth.
enum class WorkloadClass { A = 0, B = 1, C = 2 };

std::string_view to_string(WorkloadClass c);

/// Size-table label of a checkpoint: A below 10 GiB, B up to 100 GiB, C above.
WorkloadClass workload_class_of(ByteSize size);

struct GibRange {
    double min;
    double max;
};

struct SimConfig {
    std::uint64_t seed{1};
    std::size_t sites{5};
    double wan_gbps{10.0};
    Seconds horizon{7.0 * 86400.0};
    Seconds tick{60.0};
    std::size_t job_count{200};
    std::array<double, 3> job_mix{0.70, 0.20, 0.10};
    std::array<GibRange, 3> size_gib{{{1.0, 6.0}, {10.0, 40.0}, {100.0, 300.0}}};
    Seconds compute_min{Seconds::from_hours(1.0)};
    Seconds compute_max{Seconds::from_hours(8.0)};
    std::size_t slots{4};

    FeasibilityParams feasibility;
    UtilityParams utility;

    /// Forecast error (std-dev) seen by FeasibilityAware and EnergyOnly; Oracle always sees 0.
    Seconds forecast_sigma{1800.0};
    bool stochastic_gate{false};
    double epsilon{0.05};
    double bandwidth_noise{0.0};
    /// Serialize transfers FIFO per directed link.
    bool contention{false};

    double windows_per_site_per_day{1.0};
    Seconds mean_window{Seconds::from_hours(2.5)};
    Seconds min_window{Seconds::from_hours(0.5)};
    Seconds max_window{Seconds::from_hours(9.5)};

    /// Representative checkpoint sizes for validate_classes.
    std::vector<double> validation_sizes_gib{1.0, 6.0, 40.0, 280.0};
    Seconds validation_compute{Seconds::from_hours(1.0)};
    Seconds validation_window{Seconds::from_hours(2.5)};
    double acceptable_overhead{0.10};

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;

    [[nodiscard]] TraceGenConfig trace_config() const;
};

/// A job as submitted: arrival, checkpoint, compute demand, initial site.
struct JobSpec {
    JobId id{0};
    Seconds arrival;
    ByteSize checkpoint;
    Seconds compute;
    SiteId site0{0};
    WorkloadClass workload{WorkloadClass::A};
};

/// Deterministic per seed: class from the mix, size uniform within the class
/// range, compute uniform within [compute_min, compute_max], Poisson arrivals
/// over the horizon, initial sites round-robin in arrival order.
std::vector<JobSpec> generate_jobs(const SimConfig& config);

enum class EventKind : std::uint8_t {
    window_end = 0,
    window_start = 1,
    job_complete = 2,
    migration_complete = 3,
    job_arrival = 4,
    scheduler_tick = 5,
};

std::string_view to_string(EventKind k);

struct Event {
    double time{0.0};
    EventKind kind{EventKind::scheduler_tick};
    std::uint32_t id{0};
    std::uint64_t version{0};

    /// Total order by (time, kind, id, version).
    auto operator<=>(const Event&) const = default;
};

struct MigrationCounts {
    std::uint64_t attempted{0};
    std::uint64_t completed{0};
    std::uint64_t window_missed{0};

    bool operator==(const MigrationCounts&) const = default;
};

struct ClassMetrics {
    std::size_t jobs{0};
    double mean_jct{0.0};
    double nonrenewable_kwh{0.0};
    double renewable_kwh{0.0};
    MigrationCounts migrations;

    bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
    PolicyKind policy{PolicyKind::Static};
    double nonrenewable_kwh{0.0};
    double renewable_kwh{0.0};
    double mean_jct{0.0};
    double jct_ratio_vs_static{1.0};
    double nonrenewable_ratio_vs_static{1.0};
    double migration_overhead_fraction{0.0};
    MigrationCounts migrations;
    std::array<ClassMetrics, 3> per_class{};

    // Accounting totals behind the ratios. The overhead fraction is
    // (disruption + resume wait) / compute.
    double compute_seconds{0.0};
    double transfer_seconds{0.0};
    double disruption_seconds{0.0};
    /// Time migrated jobs spent queued at a full destination before resuming.
    double resume_wait_seconds{0.0};
    /// Hash of the processed event sequence.
    std::string digest;

    bool operator==(const MetricsReport&) const = default;
};

/// Fully specified simulation input. Any part may come from files instead of
/// the generators.
struct Scenario {
    SimConfig config;
    TraceSet trace;
    Topology topology;
    std::vector<JobSpec> jobs;

    /// Generated trace, full mesh at config.wan_gbps, generated jobs.
    static Scenario from_config(const SimConfig& config);
};

/// Migration injected at a fixed instant regardless of policy gates.
struct ForcedMigration {
    Seconds at;
    JobId job{0};
    SiteId dst{0};
};

struct RunOptions {
    std::vector<ForcedMigration> forced;
    /// Collect the processed events (for tests).
    bool record_events{false};
};

struct RunResult {
    MetricsReport metrics;
    std::vector<Event> events;
    std::vector<double> completion; // per job id
    std::vector<double> executed;   // compute seconds actually run, per job id
};

/// Executes one policy without normalization: the *_vs_static ratios are left at 1.
/// Throws std::logic_error if energy or work conservation is violated.
RunResult simulate(const Scenario& scenario, PolicyKind policy, const RunOptions& options = {});

/// Runs `policy` and a Static baseline on the same scenario and fills in the ratios.
MetricsReport run(const Scenario& scenario, PolicyKind policy);
MetricsReport run(const SimConfig& config, PolicyKind policy);

/// All four policies on shared inputs, in the order Static, EnergyOnly,
/// FeasibilityAware, Oracle. Policies run concurrently.
std::vector<MetricsReport> compare(const Scenario& scenario);
std::vector<MetricsReport> compare(const SimConfig& config);

struct ClassValidation {
    ByteSize checkpoint;
    Seconds transfer;
    FeasibilityClass cls{FeasibilityClass::A};
    Seconds disruption;
    double jct_overhead_fraction{0.0};
    bool feasible{false};
    bool within_budget{false};
};

struct ValidationReport {
    double wan_gbps{0.0};
    std::vector<ClassValidation> rows;
};

/// Forces one migration per representative job at the middle of a renewable
/// window and reports its JCT overhead against an unmigrated twin.
ValidationReport validate_classes(const SimConfig& config);

} // namespace greenmig

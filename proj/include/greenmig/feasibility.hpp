#pragma once

#include <greenmig/units.hpp>

#include <span>
#include <string_view>
#include <vector>

namespace greenmig {

/// Migration eligibility band, decided by checkpoint transfer time alone.
/// Intervals are half-open: A = [0, a_max), B = [a_max, b_max), C = [b_max, inf).
enum class FeasibilityClass { A, B, C };

std::string_view to_string(FeasibilityClass c);

struct FeasibilityParams {
    double alpha{0.1};
    Seconds class_a_max{60.0};
    Seconds class_b_max{300.0};
    PowerKw p_sys{1.8};
    PowerKw p_node{0.75};
    Seconds load_time{10.3};
    Seconds downtime{0.4};

    /// Throws std::invalid_argument when alpha is outside (0, 1], the class
    /// thresholds are not ordered or p_node is zero.
    void validate() const;
};

/// Full job pause caused by one migration.
struct MigrationTiming {
    Seconds transfer;
    Seconds load;
    Seconds downtime;
    Seconds total; // transfer + load + downtime
};

struct MigrationEnergy {
    EnergyKwh cost;
    Seconds breakeven;
};

struct FeasibilityVerdict {
    MigrationTiming timing;
    MigrationEnergy energy;
    FeasibilityClass cls{FeasibilityClass::A};
    bool time_ok{false};
    bool energy_ok{false};
    bool feasible{false}; // time_ok && energy_ok && cls != C
};

/// Forecast of the remaining renewable window at a destination. `sigma` is the
/// standard deviation of the duration error; 0 means a perfect forecast.
struct WindowForecast {
    Seconds remaining;
    Seconds sigma;
};

Seconds transfer_time(ByteSize size, Bandwidth bw);

MigrationTiming migration_timing(ByteSize size, Bandwidth bw, const FeasibilityParams& params);

/// Disruption bound: strict `total < alpha * window`.
bool time_feasible(const MigrationTiming& timing, Seconds window, double alpha);

/// Only the transfer phase is charged, at p_sys.
EnergyKwh energy_cost(const MigrationTiming& timing, const FeasibilityParams& params);

/// Renewable execution time at p_node needed to pay back `cost`.
Seconds breakeven_time(EnergyKwh cost, const FeasibilityParams& params);

bool energy_feasible(Seconds breakeven, Seconds window);

FeasibilityClass classify(Seconds transfer, const FeasibilityParams& params);

FeasibilityVerdict assess(ByteSize size, Bandwidth bw, Seconds window, const FeasibilityParams& params);

/// Probability that `timing.total < alpha * D` where D ~ Normal(remaining, sigma)
/// truncated to D >= 0. With sigma == 0 this is 1 or 0 from the deterministic check.
double time_feasible_probability(const MigrationTiming& timing, const WindowForecast& forecast,
                                 double alpha);

/// Chance-constrained time gate: true iff the probability above is >= 1 - epsilon.
/// epsilon must lie in (0, 1).
bool stochastic_time_feasible(const MigrationTiming& timing, const WindowForecast& forecast,
                              double alpha, double epsilon);

struct PhaseRow {
    ByteSize size;
    Bandwidth bandwidth;
    Seconds transfer;
    FeasibilityClass cls;
};

/// Size-major Cartesian product of sizes and bandwidths.
std::vector<PhaseRow> phase_grid(std::span<const ByteSize> sizes, std::span<const Bandwidth> bandwidths,
                                 const FeasibilityParams& params);

struct BreakevenRow {
    ByteSize size;
    EnergyKwh cost;
    Seconds breakeven;
};

std::vector<BreakevenRow> breakeven_curve(std::span<const ByteSize> sizes, Bandwidth bw,
                                          const FeasibilityParams& params);

} // namespace greenmig

#include <greenmig/feasibility.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace greenmig {

namespace {

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

} // namespace

std::string_view to_string(FeasibilityClass c)
{
    switch (c) {
    case FeasibilityClass::A:
        return "A";
    case FeasibilityClass::B:
        return "B";
    case FeasibilityClass::C:
        return "C";
    }
    return "?";
}

void FeasibilityParams::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    if (!(class_a_max < class_b_max)) {
        throw std::invalid_argument("class_a_max must be below class_b_max");
    }
    if (p_node.value() <= 0.0) {
        throw std::invalid_argument("p_node must be > 0");
    }
}

Seconds transfer_time(ByteSize size, Bandwidth bw)
{
    // Bandwidth cannot be constructed non-positive; the quotient is exact up to
    // one rounding.
    return Seconds{size.bits() / bw.bits_per_second()};
}

MigrationTiming migration_timing(ByteSize size, Bandwidth bw, const FeasibilityParams& params)
{
    const Seconds transfer = transfer_time(size, bw);
    return MigrationTiming{
        .transfer = transfer,
        .load = params.load_time,
        .downtime = params.downtime,
        .total = transfer + params.load_time + params.downtime,
    };
}

bool time_feasible(const MigrationTiming& timing, Seconds window, double alpha)
{
    return timing.total.value() < alpha * window.value();
}

EnergyKwh energy_cost(const MigrationTiming& timing, const FeasibilityParams& params)
{
    return energy_over(params.p_sys, timing.transfer);
}

Seconds breakeven_time(EnergyKwh cost, const FeasibilityParams& params)
{
    if (params.p_node.value() <= 0.0) {
        throw std::invalid_argument("p_node must be > 0 to compute breakeven");
    }
    return Seconds::from_hours(cost.value() / params.p_node.value());
}

bool energy_feasible(Seconds breakeven, Seconds window)
{
    return breakeven <= window;
}

FeasibilityClass classify(Seconds transfer, const FeasibilityParams& params)
{
    if (transfer < params.class_a_max) {
        return FeasibilityClass::A;
    }
    if (transfer < params.class_b_max) {
        return FeasibilityClass::B;
    }
    return FeasibilityClass::C;
}

FeasibilityVerdict assess(ByteSize size, Bandwidth bw, Seconds window, const FeasibilityParams& params)
{
    FeasibilityVerdict v;
    v.timing = migration_timing(size, bw, params);
    v.energy.cost = energy_cost(v.timing, params);
    v.energy.breakeven = breakeven_time(v.energy.cost, params);
    v.cls = classify(v.timing.transfer, params);
    v.time_ok = time_feasible(v.timing, window, params.alpha);
    v.energy_ok = energy_feasible(v.energy.breakeven, window);
    v.feasible = v.time_ok && v.energy_ok && v.cls != FeasibilityClass::C;
    return v;
}

double time_feasible_probability(const MigrationTiming& timing, const WindowForecast& forecast,
                                 double alpha)
{
    if (forecast.sigma.value() == 0.0) {
        return time_feasible(timing, forecast.remaining, alpha) ? 1.0 : 0.0;
    }
    // P[D > total / alpha | D >= 0] for D ~ N(mu, sigma).
    const double mu = forecast.remaining.value();
    const double sigma = forecast.sigma.value();
    const double threshold = timing.total.value() / alpha;
    const double tail = 1.0 - normal_cdf((threshold - mu) / sigma);
    const double mass = 1.0 - normal_cdf(-mu / sigma);
    if (mass <= 0.0) {
        return 0.0;
    }
    return std::min(1.0, tail / mass);
}

bool stochastic_time_feasible(const MigrationTiming& timing, const WindowForecast& forecast,
                              double alpha, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (forecast.sigma.value() == 0.0) {
        return time_feasible(timing, forecast.remaining, alpha);
    }
    return time_feasible_probability(timing, forecast, alpha) >= 1.0 - epsilon;
}

std::vector<PhaseRow> phase_grid(std::span<const ByteSize> sizes, std::span<const Bandwidth> bandwidths,
                                 const FeasibilityParams& params)
{
    if (sizes.empty() || bandwidths.empty()) {
        throw std::invalid_argument("phase grid needs at least one size and one bandwidth");
    }
    std::vector<PhaseRow> rows;
    rows.reserve(sizes.size() * bandwidths.size());
    for (const ByteSize size : sizes) {
        for (const Bandwidth bw : bandwidths) {
            const Seconds t = transfer_time(size, bw);
            rows.push_back(PhaseRow{size, bw, t, classify(t, params)});
        }
    }
    return rows;
}

std::vector<BreakevenRow> breakeven_curve(std::span<const ByteSize> sizes, Bandwidth bw,
                                          const FeasibilityParams& params)
{
    std::vector<BreakevenRow> rows;
    rows.reserve(sizes.size());
    for (const ByteSize size : sizes) {
        const MigrationTiming timing = migration_timing(size, bw, params);
        const EnergyKwh cost = energy_cost(timing, params);
        rows.push_back(BreakevenRow{size, cost, breakeven_time(cost, params)});
    }
    return rows;
}

} // namespace greenmig

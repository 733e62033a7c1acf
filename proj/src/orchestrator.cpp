#include <greenmig/orchestrator.hpp>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace greenmig {

namespace {

void check_snapshots(std::span<const SiteSnapshot> snapshots, const Topology& topology)
{
    if (snapshots.size() != topology.site_count()) {
        throw std::invalid_argument("snapshot set does not cover the topology");
    }
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (snapshots[i].site != i) {
            throw std::invalid_argument("snapshots must be indexed by site id");
        }
        if (snapshots[i].slots == 0) {
            throw std::invalid_argument("site slots must be >= 1");
        }
    }
}

FeasibilityVerdict verdict_for(const JobState& job, const SiteSnapshot& dst, const Topology& topology,
                               const SchedulerContext& ctx)
{
    const Bandwidth bw = measure_bandwidth(topology, job.site, dst.site, ctx.now, ctx.noise, ctx.seed);
    FeasibilityVerdict v = assess(job.checkpoint, bw, dst.forecast.remaining, ctx.params);
    if (ctx.epsilon && dst.forecast.sigma.value() > 0.0) {
        v.time_ok = stochastic_time_feasible(v.timing, dst.forecast, ctx.params.alpha, *ctx.epsilon);
        v.feasible = v.time_ok && v.energy_ok && v.cls != FeasibilityClass::C;
    }
    return v;
}

// Strict weak order: higher benefit first, then shorter transfer, then lower site id.
bool better(double benefit_a, const Destination& a, double benefit_b, const Destination& b)
{
    if (benefit_a != benefit_b) {
        return benefit_a > benefit_b;
    }
    if (a.verdict.timing.transfer != b.verdict.timing.transfer) {
        return a.verdict.timing.transfer < b.verdict.timing.transfer;
    }
    return a.site < b.site;
}

void apply_move(std::vector<SiteSnapshot>& sites, SiteId src, SiteId dst)
{
    if (sites[src].running_count > 0) {
        --sites[src].running_count;
    }
    ++sites[dst].running_count;
}

std::optional<MigrationDecision> feasibility_aware_choice(const JobState& job, std::span<const SiteSnapshot> sites,
                                                          const Topology& topology, const SchedulerContext& ctx)
{
    const auto candidates = feasible_destinations(job, sites, topology, ctx);
    const Destination* best = nullptr;
    double best_benefit = 0.0;
    for (const Destination& d : candidates) {
        const SiteSnapshot& dst = sites[d.site];
        if (dst.running_count + dst.queued_count >= dst.slots) {
            continue; // would only queue behind local work
        }
        // The source load already counts the job; count it at the destination too.
        SiteSnapshot projected = dst;
        ++projected.running_count;
        const double b = calc_benefit(job, sites[job.site], projected, ctx.utility);
        if (best == nullptr || better(b, d, best_benefit, *best)) {
            best = &d;
            best_benefit = b;
        }
    }
    if (best == nullptr || !(best_benefit > best->verdict.timing.total.value())) {
        return std::nullopt;
    }
    return MigrationDecision{job.id, job.site, best->site, best->verdict, best_benefit};
}

std::optional<MigrationDecision> energy_only_choice(const JobState& job, std::span<const SiteSnapshot> sites,
                                                    const Topology& topology, const SchedulerContext& ctx)
{
    if (sites[job.site].renewable_active) {
        return std::nullopt;
    }
    std::optional<Destination> best;
    double best_utility = 0.0;
    for (const SiteSnapshot& s : sites) {
        if (s.site == job.site || !s.renewable_active) {
            continue;
        }
        const Destination d{s.site, verdict_for(job, s, topology, ctx)};
        const double u = utility(s, ctx.utility);
        if (!best || better(u, d, best_utility, *best)) {
            best = d;
            best_utility = u;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return MigrationDecision{job.id, job.site, best->site, best->verdict,
                             calc_benefit(job, sites[job.site], sites[best->site], ctx.utility)};
}

} // namespace

std::string_view to_string(PolicyKind p)
{
    switch (p) {
    case PolicyKind::Static:
        return "static";
    case PolicyKind::EnergyOnly:
        return "energy-only";
    case PolicyKind::FeasibilityAware:
        return "feasibility";
    case PolicyKind::Oracle:
        return "oracle";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view s)
{
    for (const PolicyKind p : {PolicyKind::Static, PolicyKind::EnergyOnly, PolicyKind::FeasibilityAware,
                               PolicyKind::Oracle}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

std::vector<Destination> feasible_destinations(const JobState& job, std::span<const SiteSnapshot> snapshots,
                                               const Topology& topology, const SchedulerContext& ctx)
{
    std::vector<Destination> out;
    for (const SiteSnapshot& dst : snapshots) {
        if (dst.site == job.site) {
            continue;
        }
        FeasibilityVerdict v = verdict_for(job, dst, topology, ctx);
        if (v.feasible) {
            out.push_back(Destination{dst.site, v});
        }
    }
    return out;
}

double utility(const SiteSnapshot& snapshot, const UtilityParams& up)
{
    const double renewable =
        snapshot.renewable_active ? std::min(1.0, snapshot.forecast.remaining.value() / 3600.0) : 0.0;
    const double load = static_cast<double>(snapshot.running_count + snapshot.queued_count) /
                        static_cast<double>(snapshot.slots);
    return up.gamma * renewable - up.beta * load;
}

double calc_benefit(const JobState& job, const SiteSnapshot& src, const SiteSnapshot& dst, const UtilityParams& up)
{
    const double horizon = std::min(job.remaining_compute.value(), dst.forecast.remaining.value());
    return (utility(dst, up) - utility(src, up)) * horizon;
}

std::vector<MigrationDecision> scheduler_tick(std::span<const JobState> jobs, std::span<const SiteSnapshot> snapshots,
                                              const Topology& topology, PolicyKind policy,
                                              const SchedulerContext& ctx)
{
    check_snapshots(snapshots, topology);
    for (const JobState& job : jobs) {
        if (job.site >= snapshots.size()) {
            throw std::invalid_argument("job references a site without a snapshot");
        }
    }
    if (policy == PolicyKind::Static) {
        return {};
    }

    std::vector<SiteSnapshot> sites(snapshots.begin(), snapshots.end());
    SchedulerContext local = ctx;
    if (policy == PolicyKind::Oracle) {
        // Forecasts are taken as exact.
        local.epsilon.reset();
        for (SiteSnapshot& s : sites) {
            s.forecast.sigma = Seconds{0.0};
        }
    }

    std::vector<MigrationDecision> decisions;
    for (const JobState& job : jobs) {
        if (job.status != JobStatus::running) {
            continue;
        }
        std::optional<MigrationDecision> d = policy == PolicyKind::EnergyOnly
                                                 ? energy_only_choice(job, sites, topology, local)
                                                 : feasibility_aware_choice(job, sites, topology, local);
        if (d) {
            apply_move(sites, d->src, d->dst);
            decisions.push_back(*d);
        }
    }
    return decisions;
}

} // namespace greenmig

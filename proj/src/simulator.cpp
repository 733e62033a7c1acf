#include <greenmig/random.hpp>
#include <greenmig/simulator.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <future>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace greenmig {

namespace {

constexpr double kConservationTolerance = 1e-6;

double kwh(double kw, double seconds)
{
    return kw * seconds / kSecondsPerHour;
}

class Engine {
public:
    Engine(const Scenario& scenario, PolicyKind policy, const RunOptions& options)
        : sc_(scenario), cfg_(scenario.config), policy_(policy), options_(options),
          sites_(scenario.config.sites), link_free_at_(scenario.config.sites * scenario.config.sites, 0.0)
    {
        if (sc_.topology.site_count() != cfg_.sites || sc_.trace.site_count() != cfg_.sites) {
            throw std::invalid_argument("trace, topology and config disagree on the site count");
        }
        jobs_.reserve(sc_.jobs.size());
        for (std::size_t i = 0; i < sc_.jobs.size(); ++i) {
            const JobSpec& spec = sc_.jobs[i];
            if (spec.id != i) {
                throw std::invalid_argument("job ids must be dense and ordered");
            }
            if (spec.site0 >= cfg_.sites) {
                throw std::invalid_argument(fmt::format("job {} starts at unknown site {}", spec.id, spec.site0));
            }
            JobRt rt;
            rt.spec = &spec;
            rt.state = JobState{spec.id, spec.checkpoint, spec.compute, spec.site0, JobStatus::queued};
            jobs_.push_back(rt);
        }
        forced_done_.assign(options_.forced.size(), false);
    }

    RunResult run()
    {
        seed_events();
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            if (ev.kind == EventKind::job_complete && ev.version != jobs_[ev.id].version) {
                continue; // superseded by a migration
            }
            advance(ev.time);
            record(ev);
            dispatch(ev);
        }
        return finish();
    }

private:
    struct JobRt {
        const JobSpec* spec{nullptr};
        JobState state;
        double started_at{0.0};
        std::uint64_t version{0};
        double completion{-1.0};
        double executed{0.0};
        double renewable_kwh{0.0};
        double nonrenewable_kwh{0.0};
        MigrationCounts migrations;
        // Set while migrating.
        SiteId dst{0};
        std::optional<double> dst_window_end;
        // Set when a migrated job lands on a full site.
        std::optional<double> waiting_since;
    };

    struct SiteRt {
        std::vector<JobId> running;
        std::deque<JobId> queue;
        std::size_t incoming{0};
    };

    void push(double time, EventKind kind, std::uint32_t id, std::uint64_t version = 0)
    {
        queue_.push(Event{time, kind, id, version});
    }

    void seed_events()
    {
        const double horizon = cfg_.horizon.value();
        for (const JobRt& j : jobs_) {
            push(j.spec->arrival.value(), EventKind::job_arrival, j.spec->id);
        }
        for (const SiteEnergyTrace& site : sc_.trace.sites()) {
            for (const EnergyWindow& w : site.windows()) {
                push(w.start.value(), EventKind::window_start, w.site);
                push(w.end(), EventKind::window_end, w.site);
            }
        }
        const double tick = cfg_.tick.value();
        for (std::uint32_t k = 0; k * tick < horizon; ++k) {
            push(k * tick, EventKind::scheduler_tick, k);
        }
    }

    void advance(double t)
    {
        const double dt = t - now_;
        if (dt > 0.0) {
            const double p_node = cfg_.feasibility.p_node.value();
            for (std::size_t s = 0; s < sites_.size(); ++s) {
                if (sites_[s].running.empty()) {
                    continue;
                }
                const double covered = sc_.trace.site(static_cast<SiteId>(s)).covered_seconds(now_, t);
                for (const JobId id : sites_[s].running) {
                    JobRt& j = jobs_[id];
                    j.executed += dt;
                    j.renewable_kwh += kwh(p_node, covered);
                    j.nonrenewable_kwh += kwh(p_node, dt - covered);
                    compute_seconds_ += dt;
                }
            }
        }
        now_ = std::max(now_, t);
    }

    void record(const Event& ev)
    {
        // FNV-1a over (time bits, kind, id).
        auto mix = [this](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                digest_ ^= (v >> (8 * i)) & 0xffU;
                digest_ *= 0x100000001b3ULL;
            }
        };
        mix(std::bit_cast<std::uint64_t>(ev.time));
        mix(static_cast<std::uint64_t>(ev.kind));
        mix(ev.id);
        if (options_.record_events) {
            events_.push_back(ev);
        }
    }

    void dispatch(const Event& ev)
    {
        switch (ev.kind) {
        case EventKind::window_start:
        case EventKind::window_end:
            break; // accounting breakpoints only
        case EventKind::job_arrival:
            enqueue(ev.id, jobs_[ev.id].spec->site0);
            break;
        case EventKind::job_complete:
            complete_job(ev.id);
            break;
        case EventKind::migration_complete:
            complete_migration(ev.id);
            break;
        case EventKind::scheduler_tick:
            tick();
            break;
        }
    }

    void start(JobId id)
    {
        JobRt& j = jobs_[id];
        if (j.waiting_since) {
            resume_wait_seconds_ += now_ - *j.waiting_since;
            j.waiting_since.reset();
        }
        j.state.status = JobStatus::running;
        j.started_at = now_;
        ++j.version;
        sites_[j.state.site].running.push_back(id);
        push(now_ + j.state.remaining_compute.value(), EventKind::job_complete, id, j.version);
    }

    void enqueue(JobId id, SiteId site)
    {
        JobRt& j = jobs_[id];
        j.state.site = site;
        j.state.status = JobStatus::queued;
        sites_[site].queue.push_back(id);
        fill_slots(site);
    }

    void fill_slots(SiteId site)
    {
        SiteRt& s = sites_[site];
        while (s.running.size() < cfg_.slots && !s.queue.empty()) {
            const JobId next = s.queue.front();
            s.queue.pop_front();
            start(next);
        }
    }

    void stop_running(JobId id)
    {
        JobRt& j = jobs_[id];
        auto& running = sites_[j.state.site].running;
        running.erase(std::find(running.begin(), running.end(), id));
        const double left = j.state.remaining_compute.value() - (now_ - j.started_at);
        j.state.remaining_compute = Seconds{std::max(0.0, left)};
        ++j.version;
    }

    void complete_job(JobId id)
    {
        JobRt& j = jobs_[id];
        const SiteId site = j.state.site;
        stop_running(id);
        j.state.remaining_compute = Seconds{0.0};
        j.state.status = JobStatus::done;
        j.completion = now_;
        fill_slots(site);
    }

    void complete_migration(JobId id)
    {
        JobRt& j = jobs_[id];
        --sites_[j.dst].incoming;
        ++j.migrations.completed;
        if (j.dst_window_end && now_ >= *j.dst_window_end) {
            ++j.migrations.window_missed;
        }
        j.waiting_since = now_;
        enqueue(id, j.dst);
        if (j.state.status == JobStatus::running) {
            j.waiting_since.reset();
        }
    }

    std::vector<SiteSnapshot> snapshots(Seconds sigma) const
    {
        std::vector<SiteSnapshot> out;
        out.reserve(sites_.size());
        for (std::size_t s = 0; s < sites_.size(); ++s) {
            const auto site = static_cast<SiteId>(s);
            out.push_back(SiteSnapshot{
                .site = site,
                .renewable_active = renewable_at(sc_.trace, site, Seconds{now_}),
                .forecast = forecast_remaining(sc_.trace, site, Seconds{now_}, sigma, cfg_.seed),
                .running_count = sites_[s].running.size() + sites_[s].incoming,
                .queued_count = sites_[s].queue.size(),
                .slots = cfg_.slots,
            });
        }
        return out;
    }

    void tick()
    {
        for (std::size_t i = 0; i < options_.forced.size(); ++i) {
            const ForcedMigration& f = options_.forced[i];
            if (!forced_done_[i] && f.at.value() <= now_ && jobs_[f.job].state.status == JobStatus::running) {
                forced_done_[i] = true;
                const JobRt& j = jobs_[f.job];
                const Bandwidth bw = sc_.topology.link(j.state.site, f.dst);
                const auto window = sc_.trace.site(f.dst).window_at(now_);
                const Seconds remaining{window ? window->end() - now_ : 0.0};
                migrate(f.job, f.dst, assess(j.state.checkpoint, bw, remaining, cfg_.feasibility), remaining,
                        /*gated=*/false);
            }
        }
        if (policy_ == PolicyKind::Static) {
            return;
        }

        std::vector<JobState> running;
        for (const JobRt& j : jobs_) {
            if (j.state.status == JobStatus::running) {
                JobState s = j.state;
                s.remaining_compute = Seconds{std::max(0.0, s.remaining_compute.value() - (now_ - j.started_at))};
                running.push_back(s);
            }
        }
        if (running.empty()) {
            return;
        }
        const Seconds sigma = policy_ == PolicyKind::Oracle ? Seconds{0.0} : cfg_.forecast_sigma;
        const std::vector<SiteSnapshot> snaps = snapshots(sigma);
        SchedulerContext ctx{
            .params = cfg_.feasibility,
            .utility = cfg_.utility,
            .noise = BandwidthNoise{cfg_.bandwidth_noise},
            .epsilon = cfg_.stochastic_gate ? std::optional<double>(cfg_.epsilon) : std::nullopt,
            .now = Seconds{now_},
            .seed = cfg_.seed,
        };
        const bool gated = policy_ == PolicyKind::FeasibilityAware || policy_ == PolicyKind::Oracle;
        for (const MigrationDecision& d : scheduler_tick(running, snaps, sc_.topology, policy_, ctx)) {
            migrate(d.job, d.dst, d.verdict, snaps[d.dst].forecast.remaining, gated);
        }
    }

    void migrate(JobId id, SiteId dst, const FeasibilityVerdict& verdict, Seconds dst_remaining, bool gated)
    {
        JobRt& j = jobs_[id];
        ++j.migrations.attempted;
        const SiteId src = j.state.site;
        double wait = 0.0;
        if (cfg_.contention) {
            wait = std::max(0.0, link_free_at_[src * cfg_.sites + dst] - now_);
        }
        const double disruption = wait + verdict.timing.total.value();
        if (gated && !(disruption < cfg_.feasibility.alpha * dst_remaining.value())) {
            return; // the gate no longer holds at execution time
        }

        stop_running(id);
        j.state.status = JobStatus::migrating;
        j.dst = dst;
        const auto window = sc_.trace.site(dst).window_at(now_);
        j.dst_window_end = window ? std::optional<double>(window->end()) : std::nullopt;
        ++sites_[dst].incoming;

        const double transfer = verdict.timing.transfer.value();
        const double energy = kwh(cfg_.feasibility.p_sys.value(), transfer);
        if (renewable_at(sc_.trace, src, Seconds{now_})) {
            j.renewable_kwh += energy;
        } else {
            j.nonrenewable_kwh += energy;
        }
        transfer_seconds_ += transfer;
        disruption_seconds_ += disruption;
        if (cfg_.contention) {
            link_free_at_[src * cfg_.sites + dst] = now_ + wait + transfer;
        }
        push(now_ + disruption, EventKind::migration_complete, id);
        fill_slots(src);
    }

    RunResult finish()
    {
        RunResult out;
        MetricsReport& m = out.metrics;
        m.policy = policy_;
        std::array<double, 3> jct_sum{};
        double jct_total = 0.0;
        for (const JobRt& j : jobs_) {
            if (j.state.status != JobStatus::done) {
                throw std::logic_error(fmt::format("job {} never completed", j.spec->id));
            }
            const double compute = j.spec->compute.value();
            if (std::abs(j.executed - compute) > 1e-6 * std::max(1.0, compute)) {
                throw std::logic_error(fmt::format("work conservation violated for job {}: ran {} of {} s",
                                                   j.spec->id, j.executed, compute));
            }
            const double jct = j.completion - j.spec->arrival.value();
            jct_total += jct;
            ClassMetrics& c = m.per_class[static_cast<std::size_t>(j.spec->workload)];
            ++c.jobs;
            jct_sum[static_cast<std::size_t>(j.spec->workload)] += jct;
            c.renewable_kwh += j.renewable_kwh;
            c.nonrenewable_kwh += j.nonrenewable_kwh;
            c.migrations.attempted += j.migrations.attempted;
            c.migrations.completed += j.migrations.completed;
            c.migrations.window_missed += j.migrations.window_missed;
            m.renewable_kwh += j.renewable_kwh;
            m.nonrenewable_kwh += j.nonrenewable_kwh;
            m.migrations.attempted += j.migrations.attempted;
            m.migrations.completed += j.migrations.completed;
            m.migrations.window_missed += j.migrations.window_missed;
            out.completion.push_back(j.completion);
            out.executed.push_back(j.executed);
        }
        for (std::size_t k = 0; k < 3; ++k) {
            if (m.per_class[k].jobs > 0) {
                m.per_class[k].mean_jct = jct_sum[k] / static_cast<double>(m.per_class[k].jobs);
            }
        }
        m.mean_jct = jobs_.empty() ? 0.0 : jct_total / static_cast<double>(jobs_.size());
        m.compute_seconds = compute_seconds_;
        m.transfer_seconds = transfer_seconds_;
        m.disruption_seconds = disruption_seconds_;
        m.resume_wait_seconds = resume_wait_seconds_;
        m.migration_overhead_fraction =
            compute_seconds_ > 0.0 ? (disruption_seconds_ + resume_wait_seconds_) / compute_seconds_ : 0.0;
        m.digest = fmt::format("{:016x}", digest_);

        const double expected = kwh(cfg_.feasibility.p_node.value(), compute_seconds_) +
                                kwh(cfg_.feasibility.p_sys.value(), transfer_seconds_);
        const double accounted = m.renewable_kwh + m.nonrenewable_kwh;
        if (std::abs(accounted - expected) > kConservationTolerance * std::max(1.0, expected)) {
            throw std::logic_error(
                fmt::format("energy conservation violated: accounted {} kWh, expected {} kWh", accounted, expected));
        }
        out.events = std::move(events_);
        return out;
    }

    const Scenario& sc_;
    const SimConfig& cfg_;
    PolicyKind policy_;
    const RunOptions& options_;
    std::vector<JobRt> jobs_;
    std::vector<SiteRt> sites_;
    std::vector<double> link_free_at_;
    std::vector<bool> forced_done_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::vector<Event> events_;
    double now_{0.0};
    double compute_seconds_{0.0};
    double transfer_seconds_{0.0};
    double disruption_seconds_{0.0};
    double resume_wait_seconds_{0.0};
    std::uint64_t digest_{0xcbf29ce484222325ULL};
};

double ratio(double value, double baseline)
{
    if (baseline == 0.0) {
        return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return value / baseline;
}

void normalize(MetricsReport& m, const MetricsReport& baseline)
{
    m.jct_ratio_vs_static = ratio(m.mean_jct, baseline.mean_jct);
    m.nonrenewable_ratio_vs_static = ratio(m.nonrenewable_kwh, baseline.nonrenewable_kwh);
}

} // namespace

std::string_view to_string(WorkloadClass c)
{
    switch (c) {
    case WorkloadClass::A:
        return "A";
    case WorkloadClass::B:
        return "B";
    case WorkloadClass::C:
        return "C";
    }
    return "?";
}

WorkloadClass workload_class_of(ByteSize size)
{
    if (size.gib() < 10.0) {
        return WorkloadClass::A;
    }
    if (size.gib() <= 100.0) {
        return WorkloadClass::B;
    }
    return WorkloadClass::C;
}

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::window_end:
        return "window_end";
    case EventKind::window_start:
        return "window_start";
    case EventKind::job_complete:
        return "job_complete";
    case EventKind::migration_complete:
        return "migration_complete";
    case EventKind::job_arrival:
        return "job_arrival";
    case EventKind::scheduler_tick:
        return "scheduler_tick";
    }
    return "?";
}

void SimConfig::validate() const
{
    feasibility.validate();
    if (sites == 0) {
        throw std::invalid_argument("sites must be >= 1");
    }
    if (!(wan_gbps > 0.0) || !std::isfinite(wan_gbps)) {
        throw std::invalid_argument("wan_gbps must be > 0");
    }
    if (horizon.value() <= 0.0 || tick.value() <= 0.0) {
        throw std::invalid_argument("horizon and tick must be > 0");
    }
    if (slots == 0) {
        throw std::invalid_argument("slots must be >= 1");
    }
    double mix_sum = 0.0;
    for (const double f : job_mix) {
        if (!(f >= 0.0)) {
            throw std::invalid_argument("job mix fractions must be >= 0");
        }
        mix_sum += f;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("job mix fractions must sum to 1");
    }
    for (const GibRange& r : size_gib) {
        if (!(r.min > 0.0 && r.min < r.max)) {
            throw std::invalid_argument("checkpoint size ranges must satisfy 0 < min < max");
        }
    }
    if (!(compute_min.value() > 0.0 && compute_min < compute_max)) {
        throw std::invalid_argument("compute range must satisfy 0 < min < max");
    }
    if (utility.gamma < 0.0 || utility.beta < 0.0) {
        throw std::invalid_argument("utility weights must be >= 0");
    }
    if (stochastic_gate && !(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (bandwidth_noise < 0.0) {
        throw std::invalid_argument("bandwidth_noise must be >= 0");
    }
    if (!(acceptable_overhead > 0.0)) {
        throw std::invalid_argument("acceptable_overhead must be > 0");
    }
    trace_config().validate();
}

TraceGenConfig SimConfig::trace_config() const
{
    TraceGenConfig t;
    t.seed = seed;
    t.horizon = horizon;
    t.sites = sites;
    t.mean_duration = mean_window;
    t.min_duration = min_window;
    t.max_duration = max_window;
    t.windows_per_site_per_day = windows_per_site_per_day;
    return t;
}

std::vector<JobSpec> generate_jobs(const SimConfig& config)
{
    config.validate();
    std::mt19937_64 rng(derive_seed(config.seed, {0x6a6f6273ULL}));
    std::uniform_real_distribution<double> arrival(0.0, config.horizon.value());
    std::discrete_distribution<int> cls(config.job_mix.begin(), config.job_mix.end());
    std::uniform_real_distribution<double> compute(config.compute_min.value(), config.compute_max.value());

    struct Draw {
        double arrival;
        int cls;
        double gib;
        double compute;
    };
    std::vector<Draw> draws;
    draws.reserve(config.job_count);
    for (std::size_t i = 0; i < config.job_count; ++i) {
        Draw d{};
        // A Poisson process conditioned on job_count arrivals places them uniformly.
        d.arrival = arrival(rng);
        d.cls = cls(rng);
        const GibRange r = config.size_gib[static_cast<std::size_t>(d.cls)];
        d.gib = std::uniform_real_distribution<double>(r.min, r.max)(rng);
        d.compute = compute(rng);
        draws.push_back(d);
    }
    std::stable_sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) { return a.arrival < b.arrival; });

    std::vector<JobSpec> jobs;
    jobs.reserve(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const Draw& d = draws[i];
        jobs.push_back(JobSpec{
            .id = static_cast<JobId>(i),
            .arrival = Seconds{d.arrival},
            .checkpoint = ByteSize::from_gib(d.gib),
            .compute = Seconds{d.compute},
            .site0 = static_cast<SiteId>(i % config.sites),
            .workload = static_cast<WorkloadClass>(d.cls),
        });
    }
    return jobs;
}

Scenario Scenario::from_config(const SimConfig& config)
{
    config.validate();
    return Scenario{
        .config = config,
        .trace = generate_trace(config.trace_config()),
        .topology = Topology::full_mesh(config.sites, Bandwidth::from_gbps(config.wan_gbps)),
        .jobs = generate_jobs(config),
    };
}

RunResult simulate(const Scenario& scenario, PolicyKind policy, const RunOptions& options)
{
    scenario.config.validate();
    Engine engine(scenario, policy, options);
    return engine.run();
}

MetricsReport run(const Scenario& scenario, PolicyKind policy)
{
    MetricsReport m = simulate(scenario, policy).metrics;
    if (policy != PolicyKind::Static) {
        normalize(m, simulate(scenario, PolicyKind::Static).metrics);
    }
    return m;
}

MetricsReport run(const SimConfig& config, PolicyKind policy)
{
    return run(Scenario::from_config(config), policy);
}

std::vector<MetricsReport> compare(const Scenario& scenario)
{
    scenario.config.validate();
    const MetricsReport baseline = simulate(scenario, PolicyKind::Static).metrics;
    std::vector<std::future<MetricsReport>> pending;
    for (const PolicyKind p : {PolicyKind::EnergyOnly, PolicyKind::FeasibilityAware, PolicyKind::Oracle}) {
        pending.push_back(std::async(std::launch::async, [&scenario, p] { return simulate(scenario, p).metrics; }));
    }
    std::vector<MetricsReport> out{baseline};
    for (auto& f : pending) {
        MetricsReport m = f.get();
        normalize(m, baseline);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<MetricsReport> compare(const SimConfig& config)
{
    return compare(Scenario::from_config(config));
}

ValidationReport validate_classes(const SimConfig& config)
{
    config.validate();
    ValidationReport report;
    report.wan_gbps = config.wan_gbps;

    // Two sites: the job starts on grid-only site 0 and is pushed to site 1 at
    // the middle of site 1's window.
    SimConfig cfg = config;
    cfg.sites = 2;
    cfg.horizon = config.validation_window;
    const double window = config.validation_window.value();
    const double mid = std::floor(window / 2.0 / cfg.tick.value()) * cfg.tick.value();
    TraceSet trace{{SiteEnergyTrace{0},
                    SiteEnergyTrace{1, {EnergyWindow{1, Seconds{0.0}, Seconds{window}}}}}};
    const Bandwidth bw = Bandwidth::from_gbps(config.wan_gbps);

    for (const double gib : config.validation_sizes_gib) {
        const ByteSize size = ByteSize::from_gib(gib);
        Scenario sc{
            .config = cfg,
            .trace = trace,
            .topology = Topology::full_mesh(2, bw),
            .jobs = {JobSpec{0, Seconds{mid}, size, config.validation_compute, 0, workload_class_of(size)}},
        };
        const RunResult twin = simulate(sc, PolicyKind::Static);
        RunOptions forced;
        forced.forced.push_back(ForcedMigration{Seconds{mid}, 0, 1});
        const RunResult moved = simulate(sc, PolicyKind::Static, forced);

        const double jct_twin = twin.completion[0] - mid;
        const double jct_moved = moved.completion[0] - mid;
        const FeasibilityVerdict v = assess(size, bw, Seconds{window - mid}, config.feasibility);

        ClassValidation row;
        row.checkpoint = size;
        row.transfer = v.timing.transfer;
        row.cls = v.cls;
        row.disruption = Seconds{moved.metrics.disruption_seconds};
        row.jct_overhead_fraction = (jct_moved - jct_twin) / jct_twin;
        row.feasible = v.feasible;
        row.within_budget = v.feasible && row.jct_overhead_fraction < config.acceptable_overhead;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace greenmig

#include <greenmig/cli.hpp>
#include <greenmig/energy_trace.hpp>
#include <greenmig/feasibility.hpp>
#include <greenmig/sim_io.hpp>
#include <greenmig/simulator.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace greenmig {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError(fmt::format("cannot open '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw UsageError(fmt::format("cannot write '{}'", path));
    }
    file << text;
}

/// `count` log-spaced points from lo to hi, each rounded to 4 significant digits.
std::vector<double> log_grid(double lo, double hi, int count)
{
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
        out.push_back(std::stod(format_sig(x)));
    }
    return out;
}

struct ParamFlags {
    double alpha{0.1};
    double load_s{10.3};
    double downtime_s{0.4};
    double p_sys_kw{1.8};
    double p_node_kw{0.75};

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--alpha", alpha, "Disruption budget as a fraction of the window")->capture_default_str();
        cmd.add_option("--load-s", load_s, "Checkpoint load time")->capture_default_str();
        cmd.add_option("--downtime-s", downtime_s, "Switch-over downtime")->capture_default_str();
        cmd.add_option("--p-sys-kw", p_sys_kw, "System power during transfer")->capture_default_str();
        cmd.add_option("--p-node-kw", p_node_kw, "Node power during compute")->capture_default_str();
    }

    [[nodiscard]] FeasibilityParams params() const
    {
        FeasibilityParams p;
        p.alpha = alpha;
        p.load_time = Seconds{load_s};
        p.downtime = Seconds{downtime_s};
        p.p_sys = PowerKw{p_sys_kw};
        p.p_node = PowerKw{p_node_kw};
        p.validate();
        return p;
    }
};

/// Inputs shared by simulate, compare and validate.
struct SimFlags {
    std::string config_path;
    std::string trace_path;
    std::string jobs_path;
    std::string topology_path;
    std::vector<std::string> settings;
    std::optional<std::uint64_t> seed;
    std::optional<double> wan_gbps;

    void add_to(CLI::App& cmd, bool with_inputs)
    {
        cmd.add_option("--config", config_path, "key=value configuration file");
        cmd.add_option("--seed", seed, "Random seed (overrides the config file)");
        cmd.add_option("--wan-gbps", wan_gbps, "Full-mesh WAN bandwidth (overrides the config file)");
        cmd.add_option("--set", settings, "Extra key=value override, repeatable");
        if (with_inputs) {
            cmd.add_option("--trace", trace_path, "Trace CSV instead of a generated trace");
            cmd.add_option("--jobs", jobs_path, "Jobs CSV instead of generated jobs");
            cmd.add_option("--topology", topology_path, "Topology CSV (src,dst,gbps)");
        }
    }

    [[nodiscard]] SimConfig config() const
    {
        SimConfig cfg;
        if (!config_path.empty()) {
            cfg = parse_config(read_file(config_path));
        }
        for (const std::string& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw UsageError(fmt::format("--set expects key=value, got '{}'", s));
            }
            apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (wan_gbps) {
            cfg.wan_gbps = *wan_gbps;
        }
        cfg.validate();
        return cfg;
    }

    [[nodiscard]] Scenario scenario() const
    {
        const SimConfig cfg = config();
        Scenario sc = Scenario::from_config(cfg);
        if (!trace_path.empty()) {
            sc.trace = ingest_trace(read_file(trace_path), cfg.sites);
        }
        if (!jobs_path.empty()) {
            sc.jobs = ingest_jobs(read_file(jobs_path), cfg.sites);
        }
        if (!topology_path.empty()) {
            sc.topology = ingest_topology(read_file(topology_path), cfg.sites, Bandwidth::from_gbps(cfg.wan_gbps));
        }
        return sc;
    }
};

std::string verdict_table(const FeasibilityVerdict& v, double size_gib, double gbps, double window_s,
                          std::optional<double> probability)
{
    std::string s;
    s += fmt::format("{:<20}{} GiB\n", "checkpoint", format_sig(size_gib));
    s += fmt::format("{:<20}{} Gbps\n", "bandwidth", format_sig(gbps));
    s += fmt::format("{:<20}{} s\n", "window", format_sig(window_s));
    s += fmt::format("{:<20}{}\n", "class", to_string(v.cls));
    s += fmt::format("{:<20}{:.1f} s\n", "transfer", v.timing.transfer.value());
    s += fmt::format("{:<20}{:.1f} s\n", "total disruption", v.timing.total.value());
    s += fmt::format("{:<20}{:.4f} kWh\n", "energy cost", v.energy.cost.value());
    s += fmt::format("{:<20}{:.1f} s\n", "breakeven", v.energy.breakeven.value());
    if (probability) {
        s += fmt::format("{:<20}{:.4f}\n", "P[time ok]", *probability);
    }
    s += fmt::format("{:<20}{}\n", "time ok", v.time_ok);
    s += fmt::format("{:<20}{}\n", "energy ok", v.energy_ok);
    s += fmt::format("{:<20}{}\n", "verdict", v.feasible ? "feasible" : "infeasible");
    return s;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Feasibility-domain analysis and migration simulator for renewable-powered micro-datacenters",
                 "greenmig"};
    app.require_subcommand(1);
    int exit_code = kExitOk;
    std::function<void()> action;

    // feasibility
    auto* feas = app.add_subcommand("feasibility", "Time/energy verdict for one migration");
    double f_size = 0.0;
    double f_bw = 0.0;
    double f_window = 0.0;
    std::optional<double> f_epsilon;
    double f_sigma = 0.0;
    ParamFlags f_params;
    feas->add_option("--size-gib", f_size, "Checkpoint size in GiB")->required()->check(CLI::NonNegativeNumber);
    feas->add_option("--bandwidth-gbps", f_bw, "WAN bandwidth in Gbps")->required()->check(CLI::PositiveNumber);
    feas->add_option("--window-s", f_window, "Remaining renewable window")->required()->check(CLI::NonNegativeNumber);
    feas->add_option("--epsilon", f_epsilon, "Chance-constraint tolerance for a noisy window")
        ->check(CLI::Range(0.0, 1.0));
    feas->add_option("--sigma-s", f_sigma, "Std-dev of the window forecast error")->check(CLI::NonNegativeNumber);
    f_params.add_to(*feas);
    feas->callback([&] {
        action = [&] {
            if (f_epsilon && (*f_epsilon <= 0.0 || *f_epsilon >= 1.0)) {
                throw std::invalid_argument("--epsilon must lie strictly inside (0, 1)");
            }
            const FeasibilityParams p = f_params.params();
            const Bandwidth bw = Bandwidth::from_gbps(f_bw);
            FeasibilityVerdict v = assess(ByteSize::from_gib(f_size), bw, Seconds{f_window}, p);
            std::optional<double> probability;
            if (f_epsilon && f_sigma > 0.0) {
                const WindowForecast fc{Seconds{f_window}, Seconds{f_sigma}};
                probability = time_feasible_probability(v.timing, fc, p.alpha);
                v.time_ok = stochastic_time_feasible(v.timing, fc, p.alpha, *f_epsilon);
                v.feasible = v.time_ok && v.energy_ok && v.cls != FeasibilityClass::C;
            }
            out << verdict_table(v, f_size, f_bw, f_window, probability);
            exit_code = v.feasible ? kExitOk : kExitInfeasible;
        };
    });

    // phase-grid
    auto* grid = app.add_subcommand("phase-grid", "Transfer time and class over a size x bandwidth grid");
    std::vector<double> g_sizes;
    std::vector<double> g_bws;
    std::string g_out;
    ParamFlags g_params;
    grid->add_option("--sizes-gib", g_sizes, "Checkpoint sizes (default: 25 log-spaced points, 1-300 GiB)")
        ->delimiter(',');
    grid->add_option("--bandwidths-gbps", g_bws, "Bandwidths (default: 19 log-spaced points, 0.1-100 Gbps)")
        ->delimiter(',');
    grid->add_option("--out", g_out, "Output CSV (default: stdout)");
    g_params.add_to(*grid);
    grid->callback([&] {
        action = [&] {
            const std::vector<double> sizes = g_sizes.empty() ? log_grid(1.0, 300.0, 25) : g_sizes;
            const std::vector<double> bws = g_bws.empty() ? log_grid(0.1, 100.0, 19) : g_bws;
            std::vector<ByteSize> s;
            std::vector<Bandwidth> b;
            for (const double x : sizes) {
                s.push_back(ByteSize::from_gib(x));
            }
            for (const double x : bws) {
                b.push_back(Bandwidth::from_gbps(x));
            }
            std::string csv = "size_gib,bandwidth_gbps,transfer_s,class\n";
            for (const PhaseRow& r : phase_grid(s, b, g_params.params())) {
                csv += fmt::format("{},{},{},{}\n", format_sig(r.size.gib()), format_sig(r.bandwidth.gbps()),
                                   format_sig(r.transfer.value()), to_string(r.cls));
            }
            emit(csv, g_out, out);
        };
    });

    // breakeven
    auto* be = app.add_subcommand("breakeven", "Migration energy cost and breakeven time per checkpoint size");
    std::vector<double> b_sizes;
    double b_bw = 10.0;
    std::string b_out;
    ParamFlags b_params;
    be->add_option("--sizes-gib", b_sizes, "Checkpoint sizes (default: 1-100 GiB, step 1)")->delimiter(',');
    be->add_option("--bandwidth-gbps", b_bw, "WAN bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
    be->add_option("--out", b_out, "Output CSV (default: stdout)");
    b_params.add_to(*be);
    be->callback([&] {
        action = [&] {
            std::vector<ByteSize> s;
            if (b_sizes.empty()) {
                for (int g = 1; g <= 100; ++g) {
                    s.push_back(ByteSize::from_gib(g));
                }
            } else {
                for (const double x : b_sizes) {
                    s.push_back(ByteSize::from_gib(x));
                }
            }
            std::string csv = "size_gib,cost_kwh,breakeven_s\n";
            for (const BreakevenRow& r : breakeven_curve(s, Bandwidth::from_gbps(b_bw), b_params.params())) {
                csv += fmt::format("{},{},{}\n", format_sig(r.size.gib()), format_sig(r.cost.value()),
                                   format_sig(r.breakeven.value()));
            }
            emit(csv, b_out, out);
        };
    });

    // gen-trace
    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic renewable-window trace");
    TraceGenConfig t_cfg;
    double t_days = 7.0;
    double t_mean_h = 2.5;
    std::string t_out;
    gen->add_option("--seed", t_cfg.seed, "Random seed")->capture_default_str();
    gen->add_option("--days", t_days, "Horizon in days")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--sites", t_cfg.sites, "Number of sites")->capture_default_str();
    gen->add_option("--mean-window-h", t_mean_h, "Mean window duration in hours")->capture_default_str();
    gen->add_option("--rate", t_cfg.windows_per_site_per_day, "Windows per site per day")->capture_default_str();
    gen->add_option("--out", t_out, "Output CSV (default: stdout)");
    gen->callback([&] {
        action = [&] {
            t_cfg.horizon = Seconds{t_days * 86400.0};
            t_cfg.mean_duration = Seconds::from_hours(t_mean_h);
            emit(serialize_trace(generate_trace(t_cfg)), t_out, out);
        };
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one policy over the trace");
    std::string s_policy;
    std::string s_format = "json";
    std::string s_out;
    SimFlags s_flags;
    sim->add_option("--policy", s_policy, "static | energy-only | feasibility | oracle")
        ->required()
        ->check(CLI::IsMember({"static", "energy-only", "feasibility", "oracle"}));
    sim->add_option("--format", s_format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sim->add_option("--out", s_out, "Output file (default: stdout)");
    s_flags.add_to(*sim, true);
    sim->callback([&] {
        action = [&] {
            const MetricsReport m = run(s_flags.scenario(), *parse_policy(s_policy));
            emit(s_format == "csv" ? metrics_csv_header() + metrics_csv_row(m) : metrics_json(m), s_out, out);
        };
    });

    // compare
    auto* cmp = app.add_subcommand("compare", "Run all four policies and normalize to Static");
    std::string c_out;
    SimFlags c_flags;
    cmp->add_option("--out", c_out, "Output CSV (default: stdout)");
    c_flags.add_to(*cmp, true);
    cmp->callback([&] {
        action = [&] {
            const auto reports = compare(c_flags.scenario());
            emit(comparison_csv(reports), c_out, out);
        };
    });

    // validate
    auto* val = app.add_subcommand("validate", "Forced single-migration JCT overhead per workload class");
    std::string v_out;
    SimFlags v_flags;
    val->add_option("--out", v_out, "Output CSV (default: stdout)");
    v_flags.add_to(*val, false);
    val->callback([&] {
        action = [&] { emit(validation_csv(validate_classes(v_flags.config())), v_out, out); };
    });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (action) {
            action();
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return exit_code;
}

} // namespace greenmig

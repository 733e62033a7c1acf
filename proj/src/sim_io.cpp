#include <greenmig/sim_io.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>

namespace greenmig {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double to_double(std::string_view v, std::string_view key)
{
    const std::string buf(trim(v));
    char* end = nullptr;
    const double d = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(d)) {
        throw std::invalid_argument(fmt::format("{}: expected a number, got '{}'", key, v));
    }
    return d;
}

std::uint64_t to_uint(std::string_view v, std::string_view key)
{
    const std::string buf(trim(v));
    char* end = nullptr;
    const unsigned long long u = std::strtoull(buf.c_str(), &end, 10);
    if (buf.empty() || buf.front() == '-' || end != buf.c_str() + buf.size()) {
        throw std::invalid_argument(fmt::format("{}: expected a non-negative integer, got '{}'", key, v));
    }
    return u;
}

bool to_bool(std::string_view v, std::string_view key)
{
    const std::string_view t = trim(v);
    if (t == "true" || t == "1") {
        return true;
    }
    if (t == "false" || t == "0") {
        return false;
    }
    throw std::invalid_argument(fmt::format("{}: expected true/false, got '{}'", key, v));
}

using Setter = std::function<void(SimConfig&, std::string_view, std::string_view)>;

Setter seconds_field(Seconds SimConfig::*field)
{
    return [field](SimConfig& c, std::string_view k, std::string_view v) { c.*field = Seconds{to_double(v, k)}; };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"seed", [](SimConfig& c, auto k, auto v) { c.seed = to_uint(v, k); }},
        {"sites", [](SimConfig& c, auto k, auto v) { c.sites = to_uint(v, k); }},
        {"wan_gbps", [](SimConfig& c, auto k, auto v) { c.wan_gbps = to_double(v, k); }},
        {"horizon_s", seconds_field(&SimConfig::horizon)},
        {"tick_s", seconds_field(&SimConfig::tick)},
        {"job_count", [](SimConfig& c, auto k, auto v) { c.job_count = to_uint(v, k); }},
        {"mix_a", [](SimConfig& c, auto k, auto v) { c.job_mix[0] = to_double(v, k); }},
        {"mix_b", [](SimConfig& c, auto k, auto v) { c.job_mix[1] = to_double(v, k); }},
        {"mix_c", [](SimConfig& c, auto k, auto v) { c.job_mix[2] = to_double(v, k); }},
        {"size_a_min_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[0].min = to_double(v, k); }},
        {"size_a_max_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[0].max = to_double(v, k); }},
        {"size_b_min_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[1].min = to_double(v, k); }},
        {"size_b_max_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[1].max = to_double(v, k); }},
        {"size_c_min_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[2].min = to_double(v, k); }},
        {"size_c_max_gib", [](SimConfig& c, auto k, auto v) { c.size_gib[2].max = to_double(v, k); }},
        {"compute_min_s", seconds_field(&SimConfig::compute_min)},
        {"compute_max_s", seconds_field(&SimConfig::compute_max)},
        {"slots", [](SimConfig& c, auto k, auto v) { c.slots = to_uint(v, k); }},
        {"alpha", [](SimConfig& c, auto k, auto v) { c.feasibility.alpha = to_double(v, k); }},
        {"class_a_max_s", [](SimConfig& c, auto k, auto v) { c.feasibility.class_a_max = Seconds{to_double(v, k)}; }},
        {"class_b_max_s", [](SimConfig& c, auto k, auto v) { c.feasibility.class_b_max = Seconds{to_double(v, k)}; }},
        {"p_sys_kw", [](SimConfig& c, auto k, auto v) { c.feasibility.p_sys = PowerKw{to_double(v, k)}; }},
        {"p_node_kw", [](SimConfig& c, auto k, auto v) { c.feasibility.p_node = PowerKw{to_double(v, k)}; }},
        {"load_time_s", [](SimConfig& c, auto k, auto v) { c.feasibility.load_time = Seconds{to_double(v, k)}; }},
        {"downtime_s", [](SimConfig& c, auto k, auto v) { c.feasibility.downtime = Seconds{to_double(v, k)}; }},
        {"gamma", [](SimConfig& c, auto k, auto v) { c.utility.gamma = to_double(v, k); }},
        {"beta", [](SimConfig& c, auto k, auto v) { c.utility.beta = to_double(v, k); }},
        {"forecast_sigma_s", seconds_field(&SimConfig::forecast_sigma)},
        {"stochastic_gate", [](SimConfig& c, auto k, auto v) { c.stochastic_gate = to_bool(v, k); }},
        {"epsilon", [](SimConfig& c, auto k, auto v) { c.epsilon = to_double(v, k); }},
        {"bandwidth_noise", [](SimConfig& c, auto k, auto v) { c.bandwidth_noise = to_double(v, k); }},
        {"contention", [](SimConfig& c, auto k, auto v) { c.contention = to_bool(v, k); }},
        {"windows_per_site_per_day",
         [](SimConfig& c, auto k, auto v) { c.windows_per_site_per_day = to_double(v, k); }},
        {"mean_window_s", seconds_field(&SimConfig::mean_window)},
        {"min_window_s", seconds_field(&SimConfig::min_window)},
        {"max_window_s", seconds_field(&SimConfig::max_window)},
        {"validation_sizes_gib",
         [](SimConfig& c, auto k, auto v) {
             c.validation_sizes_gib.clear();
             std::size_t pos = 0;
             while (pos <= v.size()) {
                 const std::size_t comma = v.find(',', pos);
                 c.validation_sizes_gib.push_back(to_double(v.substr(pos, comma - pos), k));
                 if (comma == std::string_view::npos) {
                     break;
                 }
                 pos = comma + 1;
             }
         }},
        {"validation_compute_s", seconds_field(&SimConfig::validation_compute)},
        {"validation_window_s", seconds_field(&SimConfig::validation_window)},
        {"acceptable_overhead", [](SimConfig& c, auto k, auto v) { c.acceptable_overhead = to_double(v, k); }},
    };
    return table;
}

nlohmann::ordered_json counts_json(const MigrationCounts& c)
{
    return {{"attempted", c.attempted}, {"completed", c.completed}, {"window_missed", c.window_missed}};
}

} // namespace

void apply_setting(SimConfig& config, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    const auto it = table.find(trim(key));
    if (it == table.end()) {
        throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
    }
    it->second(config, trim(key), value);
}

SimConfig parse_config(std::string_view text, SimConfig base)
{
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, fmt::format("expected key=value, got '{}'", line));
        }
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return base;
}

std::vector<JobSpec> ingest_jobs(std::string_view text, std::size_t site_count)
{
    constexpr std::string_view header = "job_id,arrival_s,checkpoint_gib,compute_s,site0";
    std::vector<JobSpec> jobs;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != header) {
                throw ParseError(line_no, fmt::format("expected header '{}'", header));
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t p = 0;
        while (true) {
            const std::size_t c = line.find(',', p);
            f.push_back(line.substr(p, c == std::string_view::npos ? std::string_view::npos : c - p));
            if (c == std::string_view::npos) {
                break;
            }
            p = c + 1;
        }
        if (f.size() != 5) {
            throw ParseError(line_no, fmt::format("expected 5 fields, got {}", f.size()));
        }
        try {
            const auto id = to_uint(f[0], "job_id");
            if (id != jobs.size()) {
                throw std::invalid_argument(fmt::format("job_id {} out of sequence (expected {})", id, jobs.size()));
            }
            const auto site = to_uint(f[4], "site0");
            if (site >= site_count) {
                throw std::invalid_argument(fmt::format("unknown site {}", site));
            }
            const double compute = to_double(f[3], "compute_s");
            if (!(compute > 0.0)) {
                throw std::invalid_argument("compute_s must be > 0");
            }
            const ByteSize size = ByteSize::from_gib(to_double(f[2], "checkpoint_gib"));
            jobs.push_back(JobSpec{
                .id = static_cast<JobId>(id),
                .arrival = Seconds{to_double(f[1], "arrival_s")},
                .checkpoint = size,
                .compute = Seconds{compute},
                .site0 = static_cast<SiteId>(site),
                .workload = workload_class_of(size),
            });
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!header_seen) {
        throw ParseError(1, fmt::format("missing header '{}'", header));
    }
    return jobs;
}

std::string serialize_jobs(std::span<const JobSpec> jobs)
{
    std::string out = "job_id,arrival_s,checkpoint_gib,compute_s,site0\n";
    for (const JobSpec& j : jobs) {
        out += fmt::format("{},{},{},{},{}\n", j.id, j.arrival.value(), j.checkpoint.gib(), j.compute.value(), j.site0);
    }
    return out;
}

std::string format_sig(double value, int digits)
{
    if (value == 0.0 || !std::isfinite(value)) {
        return fmt::format("{}", value == 0.0 ? 0.0 : value);
    }
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
    const double scale = std::pow(10.0, digits - 1 - exponent);
    const double rounded = std::round(value * scale) / scale;
    // Shortest representation of the rounded value, never in exponent form.
    std::string s = fmt::format("{:.{}f}", rounded, std::max(0, digits - 1 - exponent));
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') {
            s.pop_back();
        }
        if (s.back() == '.') {
            s.pop_back();
        }
    }
    return s;
}

std::string metrics_csv_header()
{
    return "policy,nonrenewable_kwh,renewable_kwh,mean_jct,jct_ratio_vs_static,nonrenewable_ratio_vs_static,"
           "migration_overhead_fraction,migrations_attempted,migrations_completed,migrations_window_missed\n";
}

std::string metrics_csv_row(const MetricsReport& m)
{
    return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", to_string(m.policy), format_sig(m.nonrenewable_kwh),
                       format_sig(m.renewable_kwh), format_sig(m.mean_jct), format_sig(m.jct_ratio_vs_static),
                       format_sig(m.nonrenewable_ratio_vs_static), format_sig(m.migration_overhead_fraction),
                       m.migrations.attempted, m.migrations.completed, m.migrations.window_missed);
}

std::string metrics_json(const MetricsReport& m)
{
    nlohmann::ordered_json per_class;
    for (std::size_t k = 0; k < m.per_class.size(); ++k) {
        const ClassMetrics& c = m.per_class[k];
        per_class[std::string(to_string(static_cast<WorkloadClass>(k)))] = {
            {"jobs", c.jobs},
            {"mean_jct", c.mean_jct},
            {"nonrenewable_kwh", c.nonrenewable_kwh},
            {"renewable_kwh", c.renewable_kwh},
            {"migrations", counts_json(c.migrations)},
        };
    }
    nlohmann::ordered_json doc = {
        {"policy", to_string(m.policy)},
        {"nonrenewable_kwh", m.nonrenewable_kwh},
        {"renewable_kwh", m.renewable_kwh},
        {"mean_jct", m.mean_jct},
        {"jct_ratio_vs_static", m.jct_ratio_vs_static},
        {"nonrenewable_ratio_vs_static", m.nonrenewable_ratio_vs_static},
        {"migration_overhead_fraction", m.migration_overhead_fraction},
        {"migrations", counts_json(m.migrations)},
        {"per_class", per_class},
        {"compute_seconds", m.compute_seconds},
        {"transfer_seconds", m.transfer_seconds},
        {"disruption_seconds", m.disruption_seconds},
        {"resume_wait_seconds", m.resume_wait_seconds},
        {"digest", m.digest},
    };
    return doc.dump(2) + "\n";
}

std::string comparison_csv(std::span<const MetricsReport> reports)
{
    std::string out = "policy,nonrenewable_ratio,jct_ratio,overhead\n";
    for (const MetricsReport& m : reports) {
        out += fmt::format("{},{},{},{}\n", to_string(m.policy), format_sig(m.nonrenewable_ratio_vs_static),
                           format_sig(m.jct_ratio_vs_static), format_sig(m.migration_overhead_fraction));
    }
    return out;
}

std::string validation_csv(const ValidationReport& report)
{
    std::string out = "size_gib,bandwidth_gbps,transfer_s,class,disruption_s,jct_overhead,feasible,within_budget\n";
    for (const ClassValidation& r : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_sig(r.checkpoint.gib()), format_sig(report.wan_gbps),
                           format_sig(r.transfer.value()), to_string(r.cls), format_sig(r.disruption.value()),
                           format_sig(r.jct_overhead_fraction), r.feasible, r.within_budget);
    }
    return out;
}

} // namespace greenmig

#pragma once

#include <greenmig/simulator.hpp>

#include <span>
#include <string>
#include <string_view>

namespace greenmig {

/// Applies one `key=value` setting named after a SimConfig field. Throws
/// std::invalid_argument for unknown keys or unparsable values.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);

/// Flat `key=value` file; blank lines and lines starting with '#' are ignored.
/// Throws ParseError naming the line.
SimConfig parse_config(std::string_view text, SimConfig base = {});

/// `job_id,arrival_s,checkpoint_gib,compute_s,site0`, ids dense from 0.
std::vector<JobSpec> ingest_jobs(std::string_view text, std::size_t site_count);
std::string serialize_jobs(std::span<const JobSpec> jobs);

/// Rounds to `digits` significant digits and prints the shortest decimal form.
std::string format_sig(double value, int digits = 4);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& m);
/// Structured document with the MetricsReport field names.
std::string metrics_json(const MetricsReport& m);

/// policy,nonrenewable_ratio,jct_ratio,overhead
std::string comparison_csv(std::span<const MetricsReport> reports);

std::string validation_csv(const ValidationReport& report);

} // namespace greenmig

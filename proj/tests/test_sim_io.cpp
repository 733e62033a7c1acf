#include <doctest.h>

#include <greenmig/sim_io.hpp>

#include <json.hpp>

using namespace greenmig;

TEST_CASE("config parsing")
{
    const SimConfig c = parse_config("# comment\n\nseed = 9\nbeta=1.5\nvalidation_sizes_gib=2,3\ncontention=true\n");
    CHECK(c.seed == 9);
    CHECK(c.utility.beta == 1.5);
    CHECK(c.validation_sizes_gib == std::vector<double>{2.0, 3.0});
    CHECK(c.contention);
    CHECK(c.sites == 5);

    auto line_of = [](std::string_view text) -> std::size_t {
        try {
            (void)parse_config(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("seed=1\nunknown_key=3\n") == 2);
    CHECK(line_of("seed=1\n\nalpha\n") == 3);
    CHECK(line_of("tick_s=-5\n") == 1);
    CHECK_THROWS_AS(parse_config("mix_a=0.9\n").validate(), std::invalid_argument);

    SimConfig base;
    apply_setting(base, "wan_gbps", "2.5");
    CHECK(base.wan_gbps == 2.5);
    CHECK_THROWS_AS(apply_setting(base, "sites", "many"), std::invalid_argument);
}

TEST_CASE("jobs CSV round trip and errors")
{
    SimConfig c;
    c.job_count = 25;
    const auto jobs = generate_jobs(c);
    const auto back = ingest_jobs(serialize_jobs(jobs), c.sites);
    REQUIRE(back.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CHECK(back[i].arrival.value() == jobs[i].arrival.value());
        CHECK(back[i].checkpoint.bytes() == jobs[i].checkpoint.bytes());
        CHECK(back[i].compute.value() == jobs[i].compute.value());
        CHECK(back[i].site0 == jobs[i].site0);
        CHECK(back[i].workload == jobs[i].workload);
    }

    const std::string header = "job_id,arrival_s,checkpoint_gib,compute_s,site0\n";
    CHECK(ingest_jobs(header, 5).empty());
    CHECK_THROWS_AS(ingest_jobs(header + "0,0,1,3600,9\n", 5), ParseError);
    CHECK_THROWS_AS(ingest_jobs(header + "1,0,1,3600,0\n", 5), ParseError);
    CHECK_THROWS_AS(ingest_jobs(header + "0,0,1,0,0\n", 5), ParseError);
    CHECK_THROWS_AS(ingest_jobs("id,arrival\n", 5), ParseError);
}

TEST_CASE("metrics serialization uses the field names")
{
    MetricsReport m;
    m.policy = PolicyKind::FeasibilityAware;
    m.nonrenewable_kwh = 12.34567;
    m.digest = "abc";
    const auto doc = nlohmann::json::parse(metrics_json(m));
    CHECK(doc["policy"] == "feasibility");
    CHECK(doc.contains("nonrenewable_ratio_vs_static"));
    CHECK(doc.contains("migration_overhead_fraction"));
    CHECK(doc["migrations"].contains("window_missed"));
    CHECK(doc["per_class"].size() == 3);

    const std::string row = metrics_csv_row(m);
    CHECK(row.rfind("feasibility,12.35,", 0) == 0);
    CHECK(metrics_csv_header().rfind("policy,nonrenewable_kwh,", 0) == 0);
}

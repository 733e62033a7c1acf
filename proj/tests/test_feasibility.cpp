#include <doctest.h>

#include <greenmig/feasibility.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

using namespace greenmig;

namespace {

const FeasibilityParams kDefaults{};

ByteSize gib(double g) { return ByteSize::from_gib(g); }
Bandwidth gbps(double g) { return Bandwidth::from_gbps(g); }

} // namespace

TEST_CASE("transfer time follows size over bandwidth")
{
    CHECK(transfer_time(gib(40), gbps(10)).value() == doctest::Approx(34.359738).epsilon(1e-7));
    CHECK(transfer_time(ByteSize{0}, gbps(1)).value() == 0.0);
    CHECK(transfer_time(gib(16), gbps(0.1)).value() == doctest::Approx(1374.389535).epsilon(1e-7));
    CHECK(transfer_time(gib(100), gbps(100)).value() == doctest::Approx(8.589935).epsilon(1e-6));
    CHECK_THROWS_AS(gbps(0), std::invalid_argument);
    CHECK_THROWS_AS(gbps(-1), std::invalid_argument);
}

TEST_CASE("migration timing adds load and downtime")
{
    CHECK(migration_timing(gib(40), gbps(10), kDefaults).total.value() == doctest::Approx(45.059738));
    CHECK(migration_timing(ByteSize{0}, gbps(10), kDefaults).total.value() == doctest::Approx(10.7));
    CHECK(migration_timing(gib(1), gbps(1), kDefaults).total.value() == doctest::Approx(19.289935));
}

TEST_CASE("time gate is strict")
{
    MigrationTiming t = migration_timing(gib(40), gbps(10), kDefaults);
    CHECK(time_feasible(t, Seconds{9000}, 0.1));
    CHECK_FALSE(time_feasible(t, Seconds{0}, 0.1));
    t.total = Seconds{900};
    CHECK_FALSE(time_feasible(t, Seconds{9000}, 0.1));
}

TEST_CASE("energy cost and breakeven")
{
    MigrationTiming t{};
    t.transfer = Seconds::from_hours(0.0089);
    CHECK(energy_cost(t, kDefaults).value() == doctest::Approx(0.016).epsilon(0.002));
    t.transfer = Seconds{0};
    CHECK(energy_cost(t, kDefaults).value() == 0.0);

    const auto big = migration_timing(gib(100), gbps(1), kDefaults);
    CHECK(energy_cost(big, kDefaults).value() == doctest::Approx(0.429497).epsilon(1e-5));

    CHECK(breakeven_time(EnergyKwh{0.016}, kDefaults).value() == doctest::Approx(76.8));
    CHECK(breakeven_time(EnergyKwh{0.0}, kDefaults).value() == 0.0);
    CHECK(breakeven_time(EnergyKwh{0.4295}, kDefaults).value() == doctest::Approx(2061.6));

    CHECK(energy_feasible(Seconds{76.8}, Seconds{9000}));
    CHECK_FALSE(energy_feasible(Seconds{1}, Seconds{0}));
    CHECK(energy_feasible(Seconds{2061.6}, Seconds{9000}));
}

TEST_CASE("classify uses half-open bands")
{
    CHECK(classify(Seconds{34.36}, kDefaults) == FeasibilityClass::A);
    CHECK(classify(Seconds{60.0}, kDefaults) == FeasibilityClass::B);
    CHECK(classify(Seconds{std::nextafter(60.0, 0.0)}, kDefaults) == FeasibilityClass::A);
    CHECK(classify(Seconds{300.0}, kDefaults) == FeasibilityClass::C);
    CHECK(classify(Seconds{std::nextafter(300.0, 0.0)}, kDefaults) == FeasibilityClass::B);
    CHECK(classify(Seconds{343.6}, kDefaults) == FeasibilityClass::C);
}

TEST_CASE("assess combines the gates")
{
    const auto a = assess(gib(1), gbps(10), Seconds{9000}, kDefaults);
    CHECK(a.cls == FeasibilityClass::A);
    CHECK(a.feasible);

    const auto closed = assess(gib(40), gbps(10), Seconds{0}, kDefaults);
    CHECK_FALSE(closed.time_ok);
    CHECK_FALSE(closed.feasible);

    const auto large = assess(gib(280), gbps(10), Seconds{9000}, kDefaults);
    CHECK(large.timing.transfer.value() == doctest::Approx(240.518169));
    CHECK(large.cls == FeasibilityClass::B);
    CHECK(large.time_ok);

    const auto slow = assess(gib(40), gbps(1), Seconds{9000}, kDefaults);
    CHECK(slow.cls == FeasibilityClass::C);
    CHECK_FALSE(slow.feasible);
}

TEST_CASE("stochastic gate")
{
    MigrationTiming t{};
    t.total = Seconds{45};
    CHECK(stochastic_time_feasible(t, {Seconds{9000}, Seconds{0}}, 0.1, 0.05));
    t.total = Seconds{450};
    CHECK_FALSE(stochastic_time_feasible(t, {Seconds{4500}, Seconds{0}}, 0.1, 0.05));

    const WindowForecast noisy{Seconds{9000}, Seconds{3000}};
    const double p = time_feasible_probability(t, noisy, 0.1);
    CHECK(p == doctest::Approx(0.934454).epsilon(1e-5));
    CHECK_FALSE(stochastic_time_feasible(t, noisy, 0.1, 0.05));
    CHECK_THROWS_AS(stochastic_time_feasible(t, noisy, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stochastic_time_feasible(t, noisy, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("stochastic gate agrees with Monte Carlo")
{
    MigrationTiming t{};
    t.total = Seconds{450};
    const WindowForecast f{Seconds{9000}, Seconds{3000}};
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> dist(9000.0, 3000.0);
    const int n = 1'000'000;
    int kept = 0;
    int ok = 0;
    while (kept < n) {
        const double d = dist(rng);
        if (d < 0.0) {
            continue;
        }
        ++kept;
        ok += 450.0 < 0.1 * d ? 1 : 0;
    }
    const double mc = static_cast<double>(ok) / n;
    const double p = time_feasible_probability(t, f, 0.1);
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(mc - p) < 4.0 * se);
}

TEST_CASE("property: sigma zero degenerates to the deterministic gate")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> total(0.0, 2000.0);
    std::uniform_real_distribution<double> window(0.0, 20000.0);
    std::uniform_real_distribution<double> eps(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 10000; ++i) {
        MigrationTiming t{};
        t.total = Seconds{total(rng)};
        const Seconds w{window(rng)};
        REQUIRE(stochastic_time_feasible(t, {w, Seconds{0}}, 0.1, eps(rng)) == time_feasible(t, w, 0.1));
    }
}

TEST_CASE("property: transfer is monotone and linear in size")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> size(0.0, 500.0);
    std::uniform_real_distribution<double> bw(0.05, 200.0);
    for (int i = 0; i < 10000; ++i) {
        const double s1 = size(rng);
        const double s2 = size(rng);
        const double b1 = bw(rng);
        const double b2 = bw(rng);
        const double lo_s = std::min(s1, s2);
        const double hi_s = std::max(s1, s2);
        REQUIRE(transfer_time(gib(lo_s), gbps(b1)).value() <= transfer_time(gib(hi_s), gbps(b1)).value());
        REQUIRE(transfer_time(gib(s1), gbps(std::max(b1, b2))).value() <=
                transfer_time(gib(s1), gbps(std::min(b1, b2))).value());
        const ByteSize b{gib(s1).bytes() * 2};
        REQUIRE(transfer_time(b, gbps(b1)).value() ==
                doctest::Approx(2.0 * transfer_time(gib(s1), gbps(b1)).value()).epsilon(1e-12));
    }
}

TEST_CASE("property: classes are ordered with transfer time")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.0, 1000.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = t(rng);
        const double y = t(rng);
        const auto cx = classify(Seconds{x}, kDefaults);
        const auto cy = classify(Seconds{y}, kDefaults);
        if (x <= y) {
            REQUIRE(static_cast<int>(cx) <= static_cast<int>(cy));
        }
        const auto expect = x < 60.0 ? FeasibilityClass::A : x < 300.0 ? FeasibilityClass::B : FeasibilityClass::C;
        REQUIRE(cx == expect);
    }
}

TEST_CASE("phase grid and breakeven curve")
{
    const std::array<ByteSize, 1> one{gib(1)};
    const std::array<Bandwidth, 1> ten{gbps(10)};
    const auto rows = phase_grid(one, ten, kDefaults);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].transfer.value() == doctest::Approx(0.858993).epsilon(1e-5));
    CHECK(rows[0].cls == FeasibilityClass::A);
    CHECK_THROWS_AS(phase_grid(one, std::span<const Bandwidth>{}, kDefaults), std::invalid_argument);

    const std::array<ByteSize, 3> sizes{ByteSize{0}, gib(40), gib(100)};
    const auto curve = breakeven_curve(sizes, gbps(10), kDefaults);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].cost.value() == 0.0);
    CHECK(curve[0].breakeven.value() == 0.0);
    CHECK(curve[1].breakeven.value() == doctest::Approx(82.4634).epsilon(1e-5));
    CHECK(curve[2].breakeven.value() == doctest::Approx(206.1584).epsilon(1e-5));

    std::vector<ByteSize> grid;
    for (int i = 1; i <= 100; ++i) {
        grid.push_back(gib(i));
    }
    for (const auto& r : breakeven_curve(grid, gbps(10), kDefaults)) {
        REQUIRE(r.breakeven.value() <= 300.0);
    }
}

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace greenmig {

inline constexpr double kBytesPerGiB = 1073741824.0; // 2^30
inline constexpr double kBitsPerGbit = 1e9;
inline constexpr double kSecondsPerHour = 3600.0;

namespace detail {
inline double require_non_negative(double v, const char* what)
{
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
    }
    return v;
}
} // namespace detail

/// Checkpoint size. Binary units only: 1 GiB = 2^30 bytes.
class ByteSize {
public:
    constexpr ByteSize() = default;
    constexpr explicit ByteSize(std::uint64_t bytes) : bytes_(bytes) {}

    static ByteSize from_gib(double gib)
    {
        detail::require_non_negative(gib, "checkpoint size");
        return ByteSize{static_cast<std::uint64_t>(std::llround(gib * kBytesPerGiB))};
    }

    [[nodiscard]] constexpr std::uint64_t bytes() const { return bytes_; }
    [[nodiscard]] constexpr double gib() const { return static_cast<double>(bytes_) / kBytesPerGiB; }
    [[nodiscard]] constexpr double bits() const { return 8.0 * static_cast<double>(bytes_); }

    constexpr auto operator<=>(const ByteSize&) const = default;

private:
    std::uint64_t bytes_{0};
};

/// Link capacity in bit/s, decimal units (1 Gbps = 1e9 bit/s). Always > 0.
class Bandwidth {
public:
    explicit Bandwidth(double bits_per_second) : bps_(bits_per_second)
    {
        if (!std::isfinite(bps_) || bps_ <= 0.0) {
            throw std::invalid_argument("bandwidth must be finite and > 0");
        }
    }

    static Bandwidth from_gbps(double gbps) { return Bandwidth{gbps * kBitsPerGbit}; }

    [[nodiscard]] double bits_per_second() const { return bps_; }
    [[nodiscard]] double gbps() const { return bps_ / kBitsPerGbit; }

    auto operator<=>(const Bandwidth&) const = default;

private:
    double bps_;
};

/// Non-negative duration.
class Seconds {
public:
    constexpr Seconds() = default;
    explicit Seconds(double v) : v_(detail::require_non_negative(v, "duration")) {}

    static Seconds from_hours(double h) { return Seconds{h * kSecondsPerHour}; }

    [[nodiscard]] constexpr double value() const { return v_; }
    [[nodiscard]] constexpr double hours() const { return v_ / kSecondsPerHour; }

    friend Seconds operator+(Seconds a, Seconds b) { return Seconds{a.v_ + b.v_}; }
    constexpr auto operator<=>(const Seconds&) const = default;

private:
    double v_{0.0};
};

class PowerKw {
public:
    constexpr PowerKw() = default;
    explicit PowerKw(double kw) : v_(detail::require_non_negative(kw, "power")) {}
    [[nodiscard]] constexpr double value() const { return v_; }
    constexpr auto operator<=>(const PowerKw&) const = default;

private:
    double v_{0.0};
};

class EnergyKwh {
public:
    constexpr EnergyKwh() = default;
    explicit EnergyKwh(double kwh) : v_(detail::require_non_negative(kwh, "energy")) {}
    [[nodiscard]] constexpr double value() const { return v_; }
    constexpr auto operator<=>(const EnergyKwh&) const = default;

private:
    double v_{0.0};
};

/// Energy drawn by `power` over `duration`.
inline EnergyKwh energy_over(PowerKw power, Seconds duration)
{
    return EnergyKwh{power.value() * duration.hours()};
}

} // namespace greenmig

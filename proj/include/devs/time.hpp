#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace devs {

// Raised when integer time arithmetic would overflow the 64-bit
// microsecond counter (usually a model returning an absurd sigma).
class TimeOverflow : public std::overflow_error {
public:
    TimeOverflow() : std::overflow_error("virtual time arithmetic overflow") {}
};

namespace detail {

inline constexpr std::uint64_t kInfiniteTime =
    std::numeric_limits<std::uint64_t>::max();

inline std::string micros_to_seconds_str(std::uint64_t micros) {
    std::string out = std::to_string(micros / 1'000'000u);
    std::uint64_t frac = micros % 1'000'000u;
    if (frac != 0) {
        char digits[7];
        for (int i = 5; i >= 0; --i) {
            digits[i] = static_cast<char>('0' + frac % 10);
            frac /= 10;
        }
        digits[6] = '\0';
        int len = 6;
        while (len > 0 && digits[len - 1] == '0') --len;
        out += '.';
        out.append(digits, static_cast<std::size_t>(len));
    }
    return out;
}

// Exact decimal-seconds parser: "<int>[.<frac>]" with at most six
// fractional digits. Avoids floating point so every representable
// instant round-trips.
inline std::optional<std::uint64_t> parse_seconds_to_micros(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string_view whole = text;
    std::string_view frac;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        whole = text.substr(0, dot);
        frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 6) return std::nullopt;
    }
    if (whole.empty()) return std::nullopt;
    std::uint64_t seconds = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') return std::nullopt;
        if (seconds > (kInfiniteTime - 9) / 10) return std::nullopt;
        seconds = seconds * 10 + static_cast<std::uint64_t>(c - '0');
    }
    std::uint64_t micros_frac = 0;
    for (char c : frac) {
        if (c < '0' || c > '9') return std::nullopt;
        micros_frac = micros_frac * 10 + static_cast<std::uint64_t>(c - '0');
    }
    for (std::size_t i = frac.size(); i < 6; ++i) micros_frac *= 10;
    if (seconds > (kInfiniteTime - 1 - micros_frac) / 1'000'000u) return std::nullopt;
    return seconds * 1'000'000u + micros_frac;
}

}  // namespace detail

// A duration in exact integer microseconds, or Infinity (passive).
struct TimeSpan {
    std::uint64_t raw = 0;

    static constexpr TimeSpan micros(std::uint64_t us) {
        if (us == detail::kInfiniteTime) throw TimeOverflow();
        return TimeSpan{us};
    }
    static constexpr TimeSpan seconds(std::uint64_t s) { return micros(s * 1'000'000u); }
    static constexpr TimeSpan zero() { return TimeSpan{0}; }
    static constexpr TimeSpan infinity() { return TimeSpan{detail::kInfiniteTime}; }
    static std::optional<TimeSpan> parse_seconds(std::string_view text) {
        auto us = detail::parse_seconds_to_micros(text);
        if (!us || *us == detail::kInfiniteTime) return std::nullopt;
        return TimeSpan{*us};
    }

    constexpr bool infinite() const { return raw == detail::kInfiniteTime; }
    constexpr std::uint64_t value() const { return raw; }

    std::string seconds_str() const {
        return infinite() ? "inf" : detail::micros_to_seconds_str(raw);
    }

    auto operator<=>(const TimeSpan&) const = default;
};

// An instant in virtual time: microseconds since execution start, or
// Infinity (no event scheduled). Total order with Infinity greatest.
struct VirtualTime {
    std::uint64_t raw = 0;

    static constexpr VirtualTime micros(std::uint64_t us) {
        if (us == detail::kInfiniteTime) throw TimeOverflow();
        return VirtualTime{us};
    }
    static constexpr VirtualTime seconds(std::uint64_t s) { return micros(s * 1'000'000u); }
    static constexpr VirtualTime zero() { return VirtualTime{0}; }
    static constexpr VirtualTime infinity() { return VirtualTime{detail::kInfiniteTime}; }
    static std::optional<VirtualTime> parse_seconds(std::string_view text) {
        auto us = detail::parse_seconds_to_micros(text);
        if (!us || *us == detail::kInfiniteTime) return std::nullopt;
        return VirtualTime{*us};
    }

    constexpr bool infinite() const { return raw == detail::kInfiniteTime; }
    constexpr std::uint64_t value() const { return raw; }

    std::string seconds_str() const {
        return infinite() ? "inf" : detail::micros_to_seconds_str(raw);
    }

    auto operator<=>(const VirtualTime&) const = default;
};

// t + d with exact integer arithmetic; any infinite operand yields
// Infinity, overflow of the 64-bit count throws.
inline VirtualTime time_add(VirtualTime t, TimeSpan d) {
    if (t.infinite() || d.infinite()) return VirtualTime::infinity();
    std::uint64_t sum = t.raw + d.raw;
    if (sum < t.raw || sum == detail::kInfiniteTime) throw TimeOverflow();
    return VirtualTime{sum};
}

// a - b as a duration; both must be finite with a >= b.
inline TimeSpan time_diff(VirtualTime a, VirtualTime b) {
    if (a.infinite() || b.infinite()) throw std::invalid_argument("time_diff: infinite operand");
    if (a.raw < b.raw) throw std::invalid_argument("time_diff: negative duration");
    return TimeSpan{a.raw - b.raw};
}

}  // namespace devs

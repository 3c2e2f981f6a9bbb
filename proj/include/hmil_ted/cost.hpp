#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace hmil_ted {

/// Non-negative edit cost.
///
/// Costs are exact rationals with 64-bit numerator and denominator whenever
/// the inputs allow it (unit costs, decimal node costs, absolute differences
/// of short decimals). Arithmetic that would overflow, or inputs that are not
/// representable, degrade to a binary64 approximation; `is_exact()` reports
/// which representation a value carries. Comparisons between approximate
/// values are plain floating-point comparisons; use `approx_equal` where a
/// tolerance is wanted.
class Cost {
public:
    constexpr Cost() noexcept = default;
    constexpr explicit Cost(std::int64_t integer) noexcept : num_(integer) {}

    static Cost rational(std::int64_t numerator, std::int64_t denominator);
    static Cost approximate(double value) noexcept;

    bool is_exact() const noexcept { return exact_; }
    std::int64_t numerator() const noexcept { return num_; }
    std::int64_t denominator() const noexcept { return den_; }
    double to_double() const noexcept;

    bool is_zero() const noexcept { return exact_ ? num_ == 0 : approx_ == 0.0; }
    bool is_negative() const noexcept { return exact_ ? num_ < 0 : approx_ < 0.0; }

    Cost& operator+=(const Cost& other) noexcept;
    Cost& operator-=(const Cost& other) noexcept;
    friend Cost operator+(Cost lhs, const Cost& rhs) noexcept { return lhs += rhs; }
    friend Cost operator-(Cost lhs, const Cost& rhs) noexcept { return lhs -= rhs; }
    Cost operator-() const noexcept;

    /// Product with a non-negative integer multiplier.
    Cost scaled(std::int64_t factor) const noexcept;

    friend std::weak_ordering operator<=>(const Cost& lhs, const Cost& rhs) noexcept;
    friend bool operator==(const Cost& lhs, const Cost& rhs) noexcept {
        return (lhs <=> rhs) == 0;
    }

    /// Decimal rendering with at most nine fractional digits, trailing zeros
    /// trimmed; integral values print without a fraction.
    std::string to_string() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double approx_ = 0.0;
    bool exact_ = true;
};

Cost abs(const Cost& c) noexcept;
Cost min(const Cost& a, const Cost& b) noexcept;

/// Tolerance used whenever an approximate cost takes part in an equality test.
inline constexpr double kCostTolerance = 1e-9;

/// Exact equality for exact operands, |a-b| <= tol * max(1, |a|, |b|) otherwise.
bool approx_equal(const Cost& a, const Cost& b, double tol = kCostTolerance) noexcept;

/// a <= b, with the same tolerance rule as approx_equal.
bool approx_less_equal(const Cost& a, const Cost& b, double tol = kCostTolerance) noexcept;

} // namespace hmil_ted

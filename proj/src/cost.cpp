#include "hmil_ted/cost.hpp"

#include "hmil_ted/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace hmil_ted {

namespace {

using i128 = __int128;

constexpr i128 kMax64 = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin64 = std::numeric_limits<std::int64_t>::min();

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Reduce num/den (den > 0) and store it if it fits, otherwise fall back to
// the floating point value.
void assign_reduced(i128 num, i128 den, std::int64_t& out_num, std::int64_t& out_den,
                    double& approx, bool& exact) {
    if (num == 0) {
        out_num = 0;
        out_den = 1;
        exact = true;
        return;
    }
    if (den != 1) {
        i128 g = gcd128(num, den);
        num /= g;
        den /= g;
    }
    if (num > kMax64 || num < kMin64 || den > kMax64) {
        approx = static_cast<double>(num) / static_cast<double>(den);
        exact = false;
        return;
    }
    out_num = static_cast<std::int64_t>(num);
    out_den = static_cast<std::int64_t>(den);
    exact = true;
}

std::string trim_fraction(std::string s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return s;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace

Cost Cost::rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw ContractError("cost denominator must be non-zero");
    i128 n = numerator;
    i128 d = denominator;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    Cost c;
    assign_reduced(n, d, c.num_, c.den_, c.approx_, c.exact_);
    return c;
}

Cost Cost::approximate(double value) noexcept {
    Cost c;
    c.exact_ = false;
    c.approx_ = value;
    return c;
}

double Cost::to_double() const noexcept {
    if (!exact_) return approx_;
    if (den_ == 1) return static_cast<double>(num_);
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Cost& Cost::operator+=(const Cost& other) noexcept {
    if (exact_ && other.exact_) {
        if (den_ == 1 && other.den_ == 1) {
            std::int64_t sum;
            if (!__builtin_add_overflow(num_, other.num_, &sum)) {
                num_ = sum;
                return *this;
            }
        }
        i128 n = static_cast<i128>(num_) * other.den_ + static_cast<i128>(other.num_) * den_;
        i128 d = static_cast<i128>(den_) * other.den_;
        assign_reduced(n, d, num_, den_, approx_, exact_);
        return *this;
    }
    approx_ = to_double() + other.to_double();
    exact_ = false;
    return *this;
}

Cost& Cost::operator-=(const Cost& other) noexcept {
    return *this += -other;
}

Cost Cost::operator-() const noexcept {
    if (!exact_) return approximate(-approx_);
    if (num_ == std::numeric_limits<std::int64_t>::min()) return approximate(-to_double());
    Cost c = *this;
    c.num_ = -num_;
    return c;
}

Cost Cost::scaled(std::int64_t factor) const noexcept {
    if (!exact_) return approximate(approx_ * static_cast<double>(factor));
    Cost c;
    assign_reduced(static_cast<i128>(num_) * factor, den_, c.num_, c.den_, c.approx_, c.exact_);
    return c;
}

std::weak_ordering operator<=>(const Cost& lhs, const Cost& rhs) noexcept {
    if (lhs.exact_ && rhs.exact_) {
        i128 l = static_cast<i128>(lhs.num_) * rhs.den_;
        i128 r = static_cast<i128>(rhs.num_) * lhs.den_;
        if (l < r) return std::weak_ordering::less;
        if (l > r) return std::weak_ordering::greater;
        return std::weak_ordering::equivalent;
    }
    double l = lhs.to_double();
    double r = rhs.to_double();
    if (l < r) return std::weak_ordering::less;
    if (l > r) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
}

std::string Cost::to_string() const {
    if (!exact_) {
        if (!std::isfinite(approx_)) return approx_ > 0 ? "inf" : (approx_ < 0 ? "-inf" : "nan");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9f", approx_);
        return trim_fraction(buf);
    }
    if (den_ == 1) return std::to_string(num_);
    // Round |num/den| to nine fractional digits, half away from zero.
    bool negative = num_ < 0;
    unsigned __int128 n = negative ? static_cast<unsigned __int128>(-static_cast<i128>(num_))
                                   : static_cast<unsigned __int128>(num_);
    unsigned __int128 d = static_cast<unsigned __int128>(den_);
    constexpr unsigned __int128 kScale = 1000000000u;
    unsigned __int128 scaled = (n * kScale * 2 + d) / (d * 2);
    unsigned __int128 whole = scaled / kScale;
    unsigned __int128 frac = scaled % kScale;
    std::string out = negative && scaled != 0 ? "-" : "";
    out += u128_to_string(whole);
    if (frac != 0) {
        std::string f = u128_to_string(frac);
        out += '.';
        out.append(9 - f.size(), '0');
        out += f;
        out = trim_fraction(out);
    }
    return out;
}

Cost abs(const Cost& c) noexcept {
    return c.is_negative() ? -c : c;
}

Cost min(const Cost& a, const Cost& b) noexcept {
    return b < a ? b : a;
}

bool approx_equal(const Cost& a, const Cost& b, double tol) noexcept {
    if (a.is_exact() && b.is_exact()) return a == b;
    double x = a.to_double();
    double y = b.to_double();
    double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    return std::fabs(x - y) <= tol * scale;
}

bool approx_less_equal(const Cost& a, const Cost& b, double tol) noexcept {
    if (a.is_exact() && b.is_exact()) return a <= b;
    return a <= b || approx_equal(a, b, tol);
}

} // namespace hmil_ted

#pragma once

#include "hmil_ted/cost.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hmil_ted {

inline constexpr std::size_t kDefaultMaxDepth = 1000;

/// Arbitrary-precision decimal number kept in canonical form
/// (sign, significant digits without leading or trailing zeros, base-10
/// exponent), so that structural equality is numeric equality: 1.0 == 1,
/// -0 == 0, 25e-1 == 2.5.
class Decimal {
public:
    Decimal() = default;

    /// Parses the JSON number grammar. Throws ParseError on anything else.
    static Decimal parse(std::string_view text);
    static Decimal from_integer(std::int64_t value);
    static Decimal from_unsigned(std::uint64_t value);

    bool is_zero() const noexcept { return digits_.empty(); }
    bool is_negative() const noexcept { return negative_; }
    const std::string& digits() const noexcept { return digits_; }
    std::int64_t exponent() const noexcept { return exponent_; }

    /// Canonical JSON number text.
    std::string to_string() const;
    double to_double() const;
    /// Exact rational when the value fits 18 significant digits and a
    /// denominator of at most 10^18, otherwise a binary64 approximation.
    Cost to_cost() const;

    friend bool operator==(const Decimal&, const Decimal&) = default;
    friend std::strong_ordering operator<=>(const Decimal& lhs, const Decimal& rhs);

private:
    Decimal(bool negative, std::string digits, std::int64_t exponent);

    bool negative_ = false;
    std::string digits_;
    std::int64_t exponent_ = 0;
};

class JsonValue {
public:
    enum class Kind : std::uint8_t { Null, Boolean, Number, String, Array, Object };

    using Array = std::vector<JsonValue>;
    using Member = std::pair<std::string, JsonValue>;
    /// Members in document order; keys are unique.
    using Object = std::vector<Member>;

    JsonValue() = default;

    static JsonValue null() { return JsonValue{}; }
    static JsonValue boolean(bool value);
    static JsonValue number(Decimal value);
    static JsonValue string(std::string value);
    static JsonValue array(Array items);
    /// Throws ContractError when two members share a key.
    static JsonValue object(Object members);

    Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
    bool is_null() const noexcept { return kind() == Kind::Null; }
    bool is_array() const noexcept { return kind() == Kind::Array; }
    bool is_object() const noexcept { return kind() == Kind::Object; }
    bool is_scalar() const noexcept { return kind() < Kind::Array; }

    bool as_bool() const { return std::get<bool>(value_); }
    const Decimal& as_number() const { return std::get<Decimal>(value_); }
    const std::string& as_string() const { return std::get<std::string>(value_); }
    const Array& as_array() const { return std::get<Array>(value_); }
    Array& as_array() { return std::get<Array>(value_); }
    const Object& as_object() const { return std::get<Object>(value_); }
    Object& as_object() { return std::get<Object>(value_); }

    const JsonValue* find(std::string_view key) const;

    friend bool operator==(const JsonValue&, const JsonValue&) = default;

private:
    std::variant<std::monostate, bool, Decimal, std::string, Array, Object> value_;
};

struct ParseOptions {
    /// Deepest permitted nesting level; a scalar document has depth 0.
    std::size_t max_depth = kDefaultMaxDepth;
};

/// Parses one RFC 8259 document. Malformed text raises ParseError with the
/// byte offset; duplicate object keys raise ParseError; nesting beyond
/// `max_depth` raises ResourceError.
JsonValue parse_json(std::string_view text, const ParseOptions& options = {});
JsonValue parse_json_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Compact serialization; numbers use their canonical decimal text.
std::string to_json_text(const JsonValue& value);

/// JSON string literal for `text`, including the quotes.
std::string quote_json_string(std::string_view text);

/// Nesting depth of the document (0 for a scalar).
std::size_t json_depth(const JsonValue& value);

} // namespace hmil_ted

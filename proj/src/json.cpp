#include "hmil_ted/json.hpp"

#include "hmil_ted/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace hmil_ted {

// ---------------------------------------------------------------------------
// Decimal

Decimal::Decimal(bool negative, std::string digits, std::int64_t exponent)
    : negative_(negative), digits_(std::move(digits)), exponent_(exponent) {
    auto first = digits_.find_first_not_of('0');
    if (first == std::string::npos) {
        digits_.clear();
        negative_ = false;
        exponent_ = 0;
        return;
    }
    digits_.erase(0, first);
    auto last = digits_.find_last_not_of('0');
    exponent_ += static_cast<std::int64_t>(digits_.size() - 1 - last);
    digits_.erase(last + 1);
}

Decimal Decimal::parse(std::string_view text) {
    constexpr std::int64_t kExponentLimit = 1'000'000'000'000'000LL;
    std::size_t i = 0;
    auto fail = [&](const char* what) -> ParseError {
        return ParseError(std::string("invalid number '") + std::string(text) + "': " + what, i);
    };
    bool negative = false;
    if (i < text.size() && text[i] == '-') {
        negative = true;
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
        throw fail("expected digit");
    std::string digits;
    if (text[i] == '0') {
        ++i;
    } else {
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            digits.push_back(text[i++]);
    }
    std::int64_t exponent = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw fail("expected fraction digit");
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            digits.push_back(text[i++]);
            --exponent;
        }
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw fail("expected exponent digit");
        std::int64_t e = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            e = e * 10 + (text[i++] - '0');
            if (e > kExponentLimit) throw fail("exponent out of range");
        }
        exponent += exp_negative ? -e : e;
    }
    if (i != text.size()) throw fail("trailing characters");
    return Decimal(negative, std::move(digits), exponent);
}

Decimal Decimal::from_integer(std::int64_t value) {
    if (value < 0) {
        auto magnitude = static_cast<std::uint64_t>(-(value + 1)) + 1;
        return Decimal(true, std::to_string(magnitude), 0);
    }
    return Decimal(false, std::to_string(value), 0);
}

Decimal Decimal::from_unsigned(std::uint64_t value) {
    return Decimal(false, std::to_string(value), 0);
}

std::string Decimal::to_string() const {
    if (digits_.empty()) return "0";
    std::string out = negative_ ? "-" : "";
    const auto n = static_cast<std::int64_t>(digits_.size());
    const std::int64_t e = exponent_;
    if (e >= 0 && n + e <= 21) {
        out += digits_;
        out.append(static_cast<std::size_t>(e), '0');
    } else if (e < 0 && -e < n) {
        out.append(digits_, 0, static_cast<std::size_t>(n + e));
        out += '.';
        out.append(digits_, static_cast<std::size_t>(n + e));
    } else if (e < 0 && -e - n < 6) {
        out += "0.";
        out.append(static_cast<std::size_t>(-e - n), '0');
        out += digits_;
    } else {
        out += digits_[0];
        if (n > 1) {
            out += '.';
            out.append(digits_, 1);
        }
        std::int64_t adjusted = e + n - 1;
        out += adjusted < 0 ? "e-" : "e+";
        out += std::to_string(adjusted < 0 ? -adjusted : adjusted);
    }
    return out;
}

double Decimal::to_double() const {
    return std::strtod(to_string().c_str(), nullptr);
}

Cost Decimal::to_cost() const {
    if (digits_.empty()) return Cost{};
    const auto n = static_cast<std::int64_t>(digits_.size());
    if (n <= 18 && exponent_ >= -18 && n + std::max<std::int64_t>(exponent_, 0) <= 18) {
        std::int64_t magnitude = std::stoll(digits_);
        std::int64_t scale = 1;
        for (std::int64_t k = 0; k < (exponent_ < 0 ? -exponent_ : exponent_); ++k) scale *= 10;
        std::int64_t num = exponent_ >= 0 ? magnitude * scale : magnitude;
        std::int64_t den = exponent_ >= 0 ? 1 : scale;
        return Cost::rational(negative_ ? -num : num, den);
    }
    return Cost::approximate(to_double());
}

std::strong_ordering operator<=>(const Decimal& lhs, const Decimal& rhs) {
    auto sign = [](const Decimal& d) { return d.is_zero() ? 0 : (d.negative_ ? -1 : 1); };
    int ls = sign(lhs);
    int rs = sign(rhs);
    if (ls != rs) return ls <=> rs;
    if (ls == 0) return std::strong_ordering::equal;
    // Same sign: compare magnitudes by leading-digit position, then digits.
    auto mag = [](const Decimal& a, const Decimal& b) {
        std::int64_t ap = a.exponent_ + static_cast<std::int64_t>(a.digits_.size());
        std::int64_t bp = b.exponent_ + static_cast<std::int64_t>(b.digits_.size());
        if (ap != bp) return ap <=> bp;
        int c = a.digits_.compare(b.digits_);
        return c <=> 0;
    };
    auto m = mag(lhs, rhs);
    return ls > 0 ? m : (0 <=> m);
}

// ---------------------------------------------------------------------------
// JsonValue

JsonValue JsonValue::boolean(bool value) {
    JsonValue v;
    v.value_ = value;
    return v;
}

JsonValue JsonValue::number(Decimal value) {
    JsonValue v;
    v.value_ = std::move(value);
    return v;
}

JsonValue JsonValue::string(std::string value) {
    JsonValue v;
    v.value_ = std::move(value);
    return v;
}

JsonValue JsonValue::array(Array items) {
    JsonValue v;
    v.value_ = std::move(items);
    return v;
}

JsonValue JsonValue::object(Object members) {
    std::unordered_set<std::string_view> seen;
    for (const auto& [key, _] : members) {
        if (!seen.insert(key).second) throw ContractError("duplicate object key \"" + key + "\"");
    }
    JsonValue v;
    v.value_ = std::move(members);
    return v;
}

const JsonValue* JsonValue::find(std::string_view key) const {
    if (!is_object()) return nullptr;
    for (const auto& [k, v] : as_object()) {
        if (k == key) return &v;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class DocumentBuilder {
public:
    using json = nlohmann::json;

    explicit DocumentBuilder(std::size_t max_depth) : max_depth_(max_depth) {}

    bool null() { return emit(JsonValue{}); }
    bool boolean(bool v) { return emit(JsonValue::boolean(v)); }
    bool number_integer(json::number_integer_t v) {
        return emit(JsonValue::number(Decimal::from_integer(v)));
    }
    bool number_unsigned(json::number_unsigned_t v) {
        return emit(JsonValue::number(Decimal::from_unsigned(v)));
    }
    bool number_float(json::number_float_t, const json::string_t& raw) {
        return emit(JsonValue::number(Decimal::parse(raw)));
    }
    bool string(json::string_t& v) { return emit(JsonValue::string(std::move(v))); }
    bool binary(json::binary_t&) { return false; }

    bool start_object(std::size_t) {
        check_depth();
        frames_.push_back(Frame{JsonValue::object({}), {}, {}});
        return true;
    }
    bool key(json::string_t& k) {
        Frame& f = frames_.back();
        if (!f.keys.insert(k).second) {
            throw ParseError("duplicate object key \"" + k + "\" at " + path());
        }
        f.pending_key = std::move(k);
        return true;
    }
    bool end_object() { return close(); }

    bool start_array(std::size_t) {
        check_depth();
        frames_.push_back(Frame{JsonValue::array({}), {}, {}});
        return true;
    }
    bool end_array() { return close(); }

    bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
        throw ParseError("invalid JSON at byte " + std::to_string(position) + ": " + ex.what(),
                         position);
    }

    JsonValue take() { return std::move(root_); }

private:
    struct Frame {
        JsonValue value;
        std::string pending_key;
        std::unordered_set<std::string> keys;
    };

    // Called before opening a container, which would become level size()+1.
    void check_depth() const {
        if (frames_.size() >= max_depth_) {
            throw ResourceError("document nesting exceeds max depth " + std::to_string(max_depth_));
        }
    }

    bool emit(JsonValue v) {
        if (frames_.empty()) {
            root_ = std::move(v);
            return true;
        }
        Frame& top = frames_.back();
        if (top.value.is_array()) {
            top.value.as_array().push_back(std::move(v));
        } else {
            top.value.as_object().emplace_back(std::move(top.pending_key), std::move(v));
        }
        return true;
    }

    bool close() {
        JsonValue done = std::move(frames_.back().value);
        frames_.pop_back();
        if (frames_.empty()) {
            root_ = std::move(done);
            return true;
        }
        Frame& top = frames_.back();
        if (top.value.is_array()) {
            top.value.as_array().push_back(std::move(done));
        } else {
            top.value.as_object().emplace_back(std::move(top.pending_key), std::move(done));
        }
        return true;
    }

    std::string path() const {
        std::string p;
        for (const auto& f : frames_) {
            if (f.value.is_array()) {
                p += "/" + std::to_string(f.value.as_array().size());
            } else if (&f != &frames_.back()) {
                p += "/" + f.pending_key;
            }
        }
        return p.empty() ? "document root" : p;
    }

    std::size_t max_depth_;
    std::vector<Frame> frames_;
    JsonValue root_;
};

void write_json(const JsonValue& v, std::string& out) {
    switch (v.kind()) {
    case JsonValue::Kind::Null:
        out += "null";
        break;
    case JsonValue::Kind::Boolean:
        out += v.as_bool() ? "true" : "false";
        break;
    case JsonValue::Kind::Number:
        out += v.as_number().to_string();
        break;
    case JsonValue::Kind::String:
        out += quote_json_string(v.as_string());
        break;
    case JsonValue::Kind::Array: {
        out += '[';
        bool first = true;
        for (const auto& item : v.as_array()) {
            if (!first) out += ',';
            first = false;
            write_json(item, out);
        }
        out += ']';
        break;
    }
    case JsonValue::Kind::Object: {
        out += '{';
        bool first = true;
        for (const auto& [key, item] : v.as_object()) {
            if (!first) out += ',';
            first = false;
            out += quote_json_string(key);
            out += ':';
            write_json(item, out);
        }
        out += '}';
        break;
    }
    }
}

} // namespace

JsonValue parse_json(std::string_view text, const ParseOptions& options) {
    DocumentBuilder builder(options.max_depth);
    bool ok = nlohmann::json::sax_parse(text, &builder, nlohmann::json::input_format_t::json, true);
    if (!ok) throw ParseError("invalid JSON document");
    return builder.take();
}

JsonValue parse_json_file(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_json(buffer.str(), options);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
}

std::string to_json_text(const JsonValue& value) {
    std::string out;
    write_json(value, out);
    return out;
}

std::string quote_json_string(std::string_view text) {
    return nlohmann::json(std::string(text)).dump(-1, ' ', false,
                                                  nlohmann::json::error_handler_t::replace);
}

std::size_t json_depth(const JsonValue& value) {
    std::size_t deepest = 0;
    std::vector<std::pair<const JsonValue*, std::size_t>> stack{{&value, 0}};
    while (!stack.empty()) {
        auto [v, depth] = stack.back();
        stack.pop_back();
        if (v->is_array() || v->is_object()) deepest = std::max(deepest, depth + 1);
        if (v->is_array()) {
            for (const auto& item : v->as_array()) stack.emplace_back(&item, depth + 1);
        } else if (v->is_object()) {
            for (const auto& [_, item] : v->as_object()) stack.emplace_back(&item, depth + 1);
        }
    }
    return deepest;
}

} // namespace hmil_ted

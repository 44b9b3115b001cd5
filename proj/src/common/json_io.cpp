#include "ccs/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "ccs/error.hpp"

namespace ccs {

double quantize3(double v) {
    double q = std::round(v * 1000.0) / 1000.0;
    return q == 0.0 ? 0.0 : q;  // no negative zero
}

namespace {

void write_scalar(const Json& v, std::string& out) {
    switch (v.type()) {
        case Json::value_t::number_float: {
            double d = quantize3(v.get<double>());
            if (!std::isfinite(d)) throw Error(errc::kSchemaViolation, "non-finite number in canonical output");
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", d);
            out += buf;
            break;
        }
        case Json::value_t::string:
            out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
            break;
        default:
            out += v.dump();
    }
}

bool is_scalar_array(const Json& v) {
    for (const auto& e : v) {
        if (e.is_structured()) return false;
    }
    return true;
}

void write(const Json& v, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_object()) {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
            out += ": ";
            write(it.value(), indent + 2, out);
        }
        out += "\n" + close_pad + "}";
    } else if (v.is_array()) {
        if (v.empty()) {
            out += "[]";
            return;
        }
        if (is_scalar_array(v)) {
            out += "[";
            bool first = true;
            for (const auto& e : v) {
                if (!first) out += ", ";
                first = false;
                write_scalar(e, out);
            }
            out += "]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            write(e, indent + 2, out);
        }
        out += "\n" + close_pad + "]";
    } else {
        write_scalar(v, out);
    }
}

}  // namespace

std::string canonical_dump(const Json& value) {
    std::string out;
    write(value, 0, out);
    out += "\n";
    return out;
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw Error(errc::kSchemaViolation, std::string("malformed JSON at byte ") + std::to_string(e.byte));
    }
}

bool JsonCursor::has(std::string_view key) const {
    return value_->is_object() && value_->contains(key);
}

JsonCursor JsonCursor::at(std::string_view key) const {
    expect_object();
    auto it = value_->find(key);
    if (it == value_->end()) {
        JsonCursor(*value_, path_ + "/" + std::string(key)).fail("missing required field");
    }
    return JsonCursor(*it, path_ + "/" + std::string(key));
}

std::optional<JsonCursor> JsonCursor::find(std::string_view key) const {
    expect_object();
    auto it = value_->find(key);
    if (it == value_->end() || it->is_null()) return std::nullopt;
    return JsonCursor(*it, path_ + "/" + std::string(key));
}

JsonCursor JsonCursor::at(std::size_t index) const {
    if (!value_->is_array()) fail("expected array");
    if (index >= value_->size()) fail("index out of range");
    return JsonCursor((*value_)[index], path_ + "/" + std::to_string(index));
}

std::size_t JsonCursor::array_size() const {
    if (!value_->is_array()) fail("expected array");
    return value_->size();
}

void JsonCursor::expect_object() const {
    if (!value_->is_object()) fail("expected object");
}

double JsonCursor::number() const {
    if (!value_->is_number()) fail("expected number");
    double d = value_->get<double>();
    if (!std::isfinite(d)) fail("expected finite number");
    return d;
}

double JsonCursor::positive_number() const {
    double d = number();
    if (d <= 0.0) fail("expected positive number");
    return d;
}

std::int64_t JsonCursor::integer() const {
    if (value_->is_number_integer()) return value_->get<std::int64_t>();
    if (value_->is_number_float()) {
        double d = value_->get<double>();
        if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
    }
    fail("expected integer");
}

std::string JsonCursor::string() const {
    if (!value_->is_string()) fail("expected string");
    return value_->get<std::string>();
}

bool JsonCursor::boolean() const {
    if (!value_->is_boolean()) fail("expected boolean");
    return value_->get<bool>();
}

void JsonCursor::fail(const std::string& what) const {
    throw Error(errc::kSchemaViolation, (path_.empty() ? std::string("/") : path_) + ": " + what);
}

}  // namespace ccs

#include "ccs/parser/pdf_object.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "ccs/error.hpp"

namespace ccs::parser::pdf {

namespace {
const Object kNull;
const Array kEmptyArray;
const Dict kEmptyDict;

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool is_numeric_token(std::string_view t) {
    if (t.empty()) return false;
    bool digit = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if ((c == '+' || c == '-') && i == 0) continue;
        else if (c == '.') continue;
        else return false;
    }
    return digit;
}

bool is_integer_token(std::string_view t) {
    if (t.empty()) return false;
    for (char c : t) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

bool is_pdf_whitespace(char c) {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

bool is_pdf_delimiter(char c) {
    switch (c) {
        case '(': case ')': case '<': case '>': case '[': case ']': case '{': case '}': case '/': case '%':
            return true;
        default:
            return false;
    }
}

Object Object::boolean(bool b) {
    Object o;
    o.kind_ = Kind::Bool;
    o.flag_ = b;
    return o;
}
Object Object::number(double v) {
    Object o;
    o.kind_ = Kind::Number;
    o.number_ = v;
    return o;
}
Object Object::string(std::string s) {
    Object o;
    o.kind_ = Kind::String;
    o.text_ = std::move(s);
    return o;
}
Object Object::name(std::string s) {
    Object o;
    o.kind_ = Kind::Name;
    o.text_ = std::move(s);
    return o;
}
Object Object::keyword(std::string s) {
    Object o;
    o.kind_ = Kind::Keyword;
    o.text_ = std::move(s);
    return o;
}
Object Object::array(Array a) {
    Object o;
    o.kind_ = Kind::Array;
    o.array_ = std::make_shared<const Array>(std::move(a));
    return o;
}
Object Object::dict(Dict d) {
    Object o;
    o.kind_ = Kind::Dict;
    o.dict_ = std::make_shared<const Dict>(std::move(d));
    return o;
}
Object Object::ref(Ref r) {
    Object o;
    o.kind_ = Kind::Ref;
    o.ref_ = r;
    return o;
}
Object Object::stream(Stream s) {
    Object o;
    o.kind_ = Kind::Stream;
    o.stream_ = std::make_shared<const Stream>(std::move(s));
    return o;
}

const Array& Object::as_array() const { return array_ ? *array_ : kEmptyArray; }

const Dict& Object::as_dict() const {
    if (kind_ == Kind::Dict && dict_) return *dict_;
    if (kind_ == Kind::Stream && stream_) return stream_->dict;
    return kEmptyDict;
}

const Stream& Object::as_stream() const {
    static const Stream kEmpty;
    return stream_ ? *stream_ : kEmpty;
}

const Object& Object::get(std::string_view key) const {
    const Dict& d = as_dict();
    auto it = d.find(key);
    return it == d.end() ? kNull : it->second;
}

bool Lexer::at_end() {
    skip_whitespace();
    return pos_ >= data_.size();
}

void Lexer::skip_whitespace() {
    while (pos_ < data_.size()) {
        char c = data_[pos_];
        if (is_pdf_whitespace(c)) {
            ++pos_;
        } else if (c == '%') {
            while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
        } else {
            break;
        }
    }
}

void Lexer::fail(const std::string& what) const {
    throw Error(errc::kParseFailure, what + " at byte offset " + std::to_string(pos_));
}

std::string_view Lexer::take(std::size_t n) {
    if (pos_ + n > data_.size()) fail("unexpected end of data");
    auto v = data_.substr(pos_, n);
    pos_ += n;
    return v;
}

std::string Lexer::read_regular() {
    std::size_t start = pos_;
    while (pos_ < data_.size() && !is_pdf_whitespace(data_[pos_]) && !is_pdf_delimiter(data_[pos_])) ++pos_;
    return std::string(data_.substr(start, pos_ - start));
}

std::string Lexer::read_name() {
    ++pos_;  // '/'
    std::string out;
    while (pos_ < data_.size() && !is_pdf_whitespace(data_[pos_]) && !is_pdf_delimiter(data_[pos_])) {
        char c = data_[pos_];
        if (c == '#' && pos_ + 2 < data_.size() && hex_value(data_[pos_ + 1]) >= 0 && hex_value(data_[pos_ + 2]) >= 0) {
            out.push_back(static_cast<char>(hex_value(data_[pos_ + 1]) * 16 + hex_value(data_[pos_ + 2])));
            pos_ += 3;
        } else {
            out.push_back(c);
            ++pos_;
        }
    }
    return out;
}

std::string Lexer::read_literal_string() {
    ++pos_;  // '('
    std::string out;
    int depth = 1;
    while (pos_ < data_.size()) {
        char c = data_[pos_++];
        if (c == '\\') {
            if (pos_ >= data_.size()) break;
            char e = data_[pos_++];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 't': out.push_back('\t'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case '\r':
                    if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
                    break;
                case '\n': break;
                default:
                    if (e >= '0' && e <= '7') {
                        int v = e - '0';
                        for (int k = 0; k < 2 && pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '7'; ++k) {
                            v = v * 8 + (data_[pos_++] - '0');
                        }
                        out.push_back(static_cast<char>(v & 0xff));
                    } else {
                        out.push_back(e);
                    }
            }
        } else if (c == '(') {
            ++depth;
            out.push_back(c);
        } else if (c == ')') {
            if (--depth == 0) return out;
            out.push_back(c);
        } else {
            out.push_back(c);
        }
    }
    fail("unterminated string");
}

std::string Lexer::read_hex_string() {
    ++pos_;  // '<'
    std::string out;
    int hi = -1;
    while (pos_ < data_.size()) {
        char c = data_[pos_++];
        if (c == '>') {
            if (hi >= 0) out.push_back(static_cast<char>(hi * 16));
            return out;
        }
        if (is_pdf_whitespace(c)) continue;
        int v = hex_value(c);
        if (v < 0) fail("bad hex string");
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<char>(hi * 16 + v));
            hi = -1;
        }
    }
    fail("unterminated hex string");
}

Object Lexer::parse_token(bool allow_refs) {
    skip_whitespace();
    if (pos_ >= data_.size()) fail("unexpected end of data");
    char c = data_[pos_];
    switch (c) {
        case '/':
            return Object::name(read_name());
        case '(':
            return Object::string(read_literal_string());
        case '<':
            if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
                pos_ += 2;
                Dict d;
                while (true) {
                    skip_whitespace();
                    if (pos_ + 1 < data_.size() && data_[pos_] == '>' && data_[pos_ + 1] == '>') {
                        pos_ += 2;
                        break;
                    }
                    if (pos_ >= data_.size()) fail("unterminated dictionary");
                    Object key = parse_token(allow_refs);
                    if (!key.is_name()) fail("dictionary key must be a name");
                    Object value = parse_object(allow_refs);
                    d.insert_or_assign(key.text(), std::move(value));
                }
                return Object::dict(std::move(d));
            }
            return Object::string(read_hex_string());
        case '[': {
            ++pos_;
            Array a;
            while (true) {
                skip_whitespace();
                if (pos_ >= data_.size()) fail("unterminated array");
                if (data_[pos_] == ']') {
                    ++pos_;
                    break;
                }
                a.push_back(parse_object(allow_refs));
            }
            return Object::array(std::move(a));
        }
        case '{':
        case '}':
            ++pos_;
            return Object::keyword(std::string(1, c));
        case ']':
        case ')':
        case '>':
            fail(std::string("unexpected '") + c + "'");
        default:
            break;
    }
    std::string tok = read_regular();
    if (tok.empty()) fail("empty token");
    if (is_numeric_token(tok)) {
        double v = std::strtod(tok.c_str(), nullptr);
        if (allow_refs && is_integer_token(tok)) {
            std::size_t save = pos_;
            skip_whitespace();
            std::string gen = (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) ? read_regular() : "";
            if (is_integer_token(gen)) {
                skip_whitespace();
                if (pos_ < data_.size() && data_[pos_] == 'R' &&
                    (pos_ + 1 >= data_.size() || is_pdf_whitespace(data_[pos_ + 1]) || is_pdf_delimiter(data_[pos_ + 1]))) {
                    ++pos_;
                    return Object::ref({static_cast<int>(v), std::atoi(gen.c_str())});
                }
            }
            pos_ = save;
        }
        return Object::number(v);
    }
    if (tok == "true") return Object::boolean(true);
    if (tok == "false") return Object::boolean(false);
    if (tok == "null") return Object{};
    return Object::keyword(std::move(tok));
}

Object Lexer::parse_object(bool allow_refs) { return parse_token(allow_refs); }

}  // namespace ccs::parser::pdf

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccs::parser::pdf {

struct Ref {
    int num = 0;
    int gen = 0;
    auto operator<=>(const Ref&) const = default;
};

class Object;
using Array = std::vector<Object>;
using Dict = std::map<std::string, Object, std::less<>>;

/// Decoded-on-demand stream: the dictionary plus the raw (still filtered) bytes.
struct Stream {
    Dict dict;
    std::string raw;
};

/// One PDF value. Content-stream operators are represented as keywords.
class Object {
public:
    enum class Kind { Null, Bool, Number, String, Name, Array, Dict, Ref, Stream, Keyword };

    Object() = default;
    static Object boolean(bool b);
    static Object number(double v);
    static Object string(std::string s);
    static Object name(std::string s);
    static Object keyword(std::string s);
    static Object array(Array a);
    static Object dict(Dict d);
    static Object ref(Ref r);
    static Object stream(Stream s);

    Kind kind() const { return kind_; }
    bool is_null() const { return kind_ == Kind::Null; }
    bool is_number() const { return kind_ == Kind::Number; }
    bool is_string() const { return kind_ == Kind::String; }
    bool is_name() const { return kind_ == Kind::Name; }
    bool is_name(std::string_view n) const { return kind_ == Kind::Name && text_ == n; }
    bool is_array() const { return kind_ == Kind::Array; }
    bool is_dict() const { return kind_ == Kind::Dict; }
    bool is_ref() const { return kind_ == Kind::Ref; }
    bool is_stream() const { return kind_ == Kind::Stream; }
    bool is_keyword() const { return kind_ == Kind::Keyword; }
    bool is_keyword(std::string_view k) const { return kind_ == Kind::Keyword && text_ == k; }

    bool as_bool() const { return flag_; }
    double as_number() const { return number_; }
    int as_int() const { return static_cast<int>(number_); }
    /// String bytes, name (without slash) or keyword text.
    const std::string& text() const { return text_; }
    const Array& as_array() const;
    const Dict& as_dict() const;  // for streams, the stream dictionary
    const Stream& as_stream() const;
    Ref as_ref() const { return ref_; }

    /// Dictionary lookup on dicts and stream dicts; null Object when absent.
    const Object& get(std::string_view key) const;

private:
    Kind kind_ = Kind::Null;
    bool flag_ = false;
    double number_ = 0;
    std::string text_;
    Ref ref_{};
    std::shared_ptr<const Array> array_;
    std::shared_ptr<const Dict> dict_;
    std::shared_ptr<const Stream> stream_;
};

/// Tokenizer + object parser over a byte buffer. Positions are byte offsets
/// into the buffer, reported in parse-failure errors.
class Lexer {
public:
    explicit Lexer(std::string_view data, std::size_t pos = 0) : data_(data), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    bool at_end();
    void skip_whitespace();

    /// Parses one object. References "n g R" are recognised when
    /// `allow_refs`; content streams pass false.
    Object parse_object(bool allow_refs = true);

    /// Reads raw bytes (used for stream bodies and inline image data).
    std::string_view take(std::size_t n);
    std::string_view data() const { return data_; }

    [[noreturn]] void fail(const std::string& what) const;

private:
    Object parse_token(bool allow_refs);
    std::string read_literal_string();
    std::string read_hex_string();
    std::string read_name();
    std::string read_regular();

    std::string_view data_;
    std::size_t pos_;
};

bool is_pdf_whitespace(char c);
bool is_pdf_delimiter(char c);

}  // namespace ccs::parser::pdf

#include "ccs/parser/content.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "ccs/error.hpp"
#include "ccs/parser/font_metrics.hpp"

namespace ccs::parser {

using pdf::Object;

namespace {

struct Matrix {
    double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

    // Row-vector convention: p' = p * M, so (this * o) applies `this` first.
    Matrix operator*(const Matrix& o) const {
        return {a * o.a + b * o.c,     a * o.b + b * o.d,     c * o.a + d * o.c,
                c * o.b + d * o.d,     e * o.a + f * o.c + o.e, e * o.b + f * o.d + o.f};
    }
    doc::Point apply(double x, double y) const { return {a * x + c * y + e, b * x + d * y + f}; }
    static Matrix translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
};

Matrix matrix_from(const std::vector<Object>& ops, std::size_t first) {
    return {ops[first].as_number(),     ops[first + 1].as_number(), ops[first + 2].as_number(),
            ops[first + 3].as_number(), ops[first + 4].as_number(), ops[first + 5].as_number()};
}

// cp1252 upper half; zero entries fall back to Latin-1.
constexpr char16_t kCp1252High[32] = {
    0x20AC, 0, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0, 0x017D, 0,
    0, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0, 0x017E, 0x0178,
};

char32_t win_ansi(unsigned code) {
    if (code >= 0x80 && code < 0xA0 && kCp1252High[code - 0x80] != 0) return kCp1252High[code - 0x80];
    return static_cast<char32_t>(code);
}

std::string glyph_name_to_utf8(const std::string& name) {
    static const std::map<std::string, char32_t, std::less<>> kNames = {
        {"space", ' '},        {"exclam", '!'},       {"quotedbl", '"'},     {"numbersign", '#'},
        {"dollar", '$'},       {"percent", '%'},      {"ampersand", '&'},    {"quotesingle", '\''},
        {"parenleft", '('},    {"parenright", ')'},   {"asterisk", '*'},     {"plus", '+'},
        {"comma", ','},        {"hyphen", '-'},       {"period", '.'},       {"slash", '/'},
        {"zero", '0'},         {"one", '1'},          {"two", '2'},          {"three", '3'},
        {"four", '4'},         {"five", '5'},         {"six", '6'},          {"seven", '7'},
        {"eight", '8'},        {"nine", '9'},         {"colon", ':'},        {"semicolon", ';'},
        {"less", '<'},         {"equal", '='},        {"greater", '>'},      {"question", '?'},
        {"at", '@'},           {"bracketleft", '['},  {"backslash", '\\'},   {"bracketright", ']'},
        {"asciicircum", '^'},  {"underscore", '_'},   {"grave", '`'},        {"braceleft", '{'},
        {"bar", '|'},          {"braceright", '}'},   {"asciitilde", '~'},   {"bullet", 0x2022},
        {"endash", 0x2013},    {"emdash", 0x2014},    {"quoteleft", 0x2018}, {"quoteright", 0x2019},
        {"quotedblleft", 0x201C}, {"quotedblright", 0x201D}, {"minus", 0x2212}, {"fi", 0xFB01},
        {"fl", 0xFB02},        {"ellipsis", 0x2026},  {"degree", 0x00B0},    {"periodcentered", 0x00B7},
    };
    if (auto it = kNames.find(name); it != kNames.end()) return utf8_encode(it->second);
    if (name.size() == 1) return name;
    if (name.size() == 7 && name.rfind("uni", 0) == 0) {
        return utf8_encode(static_cast<char32_t>(std::stoul(name.substr(3), nullptr, 16)));
    }
    return {};
}

std::string utf16be_to_utf8(const std::string& bytes) {
    std::vector<char32_t> cps;
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
        char32_t u = (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
        if (u >= 0xD800 && u < 0xDC00 && i + 3 < bytes.size()) {
            char32_t lo = (static_cast<unsigned char>(bytes[i + 2]) << 8) | static_cast<unsigned char>(bytes[i + 3]);
            u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
            i += 2;
        }
        cps.push_back(u);
    }
    return utf8_encode(cps);
}

unsigned bytes_to_code(const std::string& s) {
    unsigned v = 0;
    for (unsigned char c : s) v = (v << 8) | c;
    return v;
}

struct Font {
    std::string name;
    bool composite = false;
    int code_bytes = 1;
    bool bold = false;
    bool italic = false;
    double ascent = 0.75;
    double descent = -0.25;
    std::map<unsigned, double> widths;  // in 1/1000 em
    double default_width = kFallbackWidth;
    bool standard_metrics = false;
    std::map<unsigned, std::string> to_unicode;
    std::map<unsigned, std::string> differences;

    double width(unsigned code) const {
        if (auto it = widths.find(code); it != widths.end()) return it->second / 1000.0;
        if (standard_metrics) {
            if (name.find("Courier") != std::string::npos) return 0.6;
            return helvetica_width(code) / 1000.0;
        }
        return default_width / 1000.0;
    }

    std::string decode(unsigned code) const {
        if (auto it = to_unicode.find(code); it != to_unicode.end()) return it->second;
        if (auto it = differences.find(code); it != differences.end()) return it->second;
        if (composite) return "\xEF\xBF\xBD";
        return utf8_encode(win_ansi(code));
    }
};

void parse_to_unicode(const std::string& cmap, Font& font) {
    pdf::Lexer lx(cmap);
    std::vector<Object> ops;
    bool one_byte_space = false, two_byte_space = false;
    try {
        while (!lx.at_end()) {
            Object o = lx.parse_object(false);
            if (!o.is_keyword()) {
                ops.push_back(std::move(o));
                continue;
            }
            const std::string& kw = o.text();
            if (kw == "endcodespacerange") {
                for (std::size_t i = 0; i + 1 < ops.size(); i += 2) {
                    (ops[i].text().size() == 1 ? one_byte_space : two_byte_space) = true;
                }
            } else if (kw == "endbfchar") {
                for (std::size_t i = 0; i + 1 < ops.size(); i += 2) {
                    font.to_unicode[bytes_to_code(ops[i].text())] = utf16be_to_utf8(ops[i + 1].text());
                }
            } else if (kw == "endbfrange") {
                for (std::size_t i = 0; i + 2 < ops.size(); i += 3) {
                    unsigned lo = bytes_to_code(ops[i].text()), hi = bytes_to_code(ops[i + 1].text());
                    if (hi < lo || hi - lo > 0xFFFF) continue;
                    if (ops[i + 2].is_array()) {
                        const auto& arr = ops[i + 2].as_array();
                        for (unsigned c = lo; c <= hi && c - lo < arr.size(); ++c) {
                            font.to_unicode[c] = utf16be_to_utf8(arr[c - lo].text());
                        }
                    } else {
                        std::string dst = ops[i + 2].text();
                        for (unsigned c = lo; c <= hi; ++c) {
                            font.to_unicode[c] = utf16be_to_utf8(dst);
                            if (!dst.empty()) {
                                // increment the last byte of the destination
                                for (std::size_t k = dst.size(); k-- > 0;) {
                                    if (++reinterpret_cast<unsigned char&>(dst[k]) != 0) break;
                                }
                            }
                        }
                    }
                }
            }
            ops.clear();
        }
    } catch (const Error&) {
        // keep whatever mappings were read before the damage
    }
    if (font.composite && one_byte_space && !two_byte_space) font.code_bytes = 1;
}

Font load_font(const pdf::File& file, const Object& font_ref) {
    Font font;
    Object fd = file.resolve(font_ref);
    std::string base = file.resolve(fd.get("BaseFont")).text();
    if (auto plus = base.find('+'); plus == 6) base = base.substr(7);
    font.name = base;
    const bool type0 = fd.get("Subtype").is_name("Type0");
    Object descriptor_owner = fd;
    if (type0) {
        font.composite = true;
        font.code_bytes = 2;
        Object desc = file.resolve(fd.get("DescendantFonts"));
        if (desc.is_array() && !desc.as_array().empty()) {
            Object cid = file.resolve(desc.as_array()[0]);
            descriptor_owner = cid;
            if (cid.get("DW").is_number()) font.default_width = cid.get("DW").as_number();
            else font.default_width = 1000;
            Object w = file.resolve(cid.get("W"));
            const auto& arr = w.as_array();
            for (std::size_t i = 0; i < arr.size();) {
                if (i + 1 >= arr.size()) break;
                unsigned first = static_cast<unsigned>(file.resolve(arr[i]).as_number());
                Object next = file.resolve(arr[i + 1]);
                if (next.is_array()) {
                    unsigned c = first;
                    for (const auto& v : next.as_array()) font.widths[c++] = file.resolve(v).as_number();
                    i += 2;
                } else if (i + 2 < arr.size()) {
                    unsigned last = static_cast<unsigned>(next.as_number());
                    double wv = file.resolve(arr[i + 2]).as_number();
                    for (unsigned c = first; c <= last && c - first < 0x10000; ++c) font.widths[c] = wv;
                    i += 3;
                } else {
                    break;
                }
            }
        }
    } else {
        Object widths = file.resolve(fd.get("Widths"));
        if (widths.is_array()) {
            unsigned first = static_cast<unsigned>(file.resolve(fd.get("FirstChar")).as_number());
            unsigned c = first;
            for (const auto& v : widths.as_array()) font.widths[c++] = file.resolve(v).as_number();
        } else {
            font.standard_metrics = true;
        }
        Object enc = file.resolve(fd.get("Encoding"));
        if (enc.is_dict()) {
            unsigned code = 0;
            for (const auto& v : file.resolve(enc.get("Differences")).as_array()) {
                if (v.is_number()) code = static_cast<unsigned>(v.as_number());
                else if (v.is_name()) {
                    std::string u = glyph_name_to_utf8(v.text());
                    if (!u.empty()) font.differences[code] = u;
                    ++code;
                }
            }
        }
    }
    Object desc = file.resolve(descriptor_owner.get("FontDescriptor"));
    if (desc.is_dict()) {
        int flags = desc.get("Flags").is_number() ? desc.get("Flags").as_int() : 0;
        if (flags & (1 << 6)) font.italic = true;
        if (flags & (1 << 18)) font.bold = true;
        if (desc.get("ItalicAngle").is_number() && desc.get("ItalicAngle").as_number() != 0) font.italic = true;
        if (desc.get("FontWeight").is_number() && desc.get("FontWeight").as_number() >= 600) font.bold = true;
        double asc = desc.get("Ascent").is_number() ? desc.get("Ascent").as_number() : 0;
        double dsc = desc.get("Descent").is_number() ? desc.get("Descent").as_number() : 0;
        if (asc > 0 && dsc < 0 && asc - dsc < 2000) {
            font.ascent = asc / 1000.0;
            font.descent = dsc / 1000.0;
        }
    }
    for (std::string_view key : {"Bold", "Black", "Heavy", "Semibold", "Demi"}) {
        if (base.find(key) != std::string::npos) font.bold = true;
    }
    for (std::string_view key : {"Italic", "Oblique"}) {
        if (base.find(key) != std::string::npos) font.italic = true;
    }
    Object tu = file.resolve(fd.get("ToUnicode"));
    if (tu.is_stream()) {
        try {
            parse_to_unicode(file.decode(tu), font);
        } catch (const Error&) {
        }
    }
    return font;
}

struct GraphicsState {
    Matrix ctm;
    // text state lives in the graphics state per the PDF imaging model
    std::string font_key;
    const Font* font = nullptr;
    double font_size = 0;
    double char_spacing = 0;
    double word_spacing = 0;
    double h_scale = 1;
    double leading = 0;
    double rise = 0;
    int render_mode = 0;
};

class Interpreter {
public:
    Interpreter(const pdf::File& file, PageSnippets& out, double origin_x, double origin_y)
        : file_(file), out_(out), ox_(origin_x), oy_(origin_y) {}

    void run(const std::string& content, const Object& resources, const Matrix& base, int depth) {
        if (depth > 8) return;
        pdf::Lexer lx(content);
        std::vector<Object> ops;
        GraphicsState saved_top = gs_;
        gs_.ctm = base;
        std::vector<GraphicsState> stack;
        try {
            while (!lx.at_end()) {
                Object o = lx.parse_object(false);
                if (!o.is_keyword()) {
                    ops.push_back(std::move(o));
                    continue;
                }
                const std::string& op = o.text();
                if (op == "BI") {
                    skip_inline_image(lx);
                } else {
                    execute(op, ops, resources, stack, depth);
                }
                ops.clear();
            }
        } catch (const Error&) {
            ++content_errors_;
        }
        gs_ = saved_top;
    }

    int content_errors() const { return content_errors_; }

private:
    const Font* font_for(const Object& resources, const std::string& key) {
        Object fonts = file_.resolve(resources.get("Font"));
        const Object& ref = fonts.get(key);
        std::string cache_key = ref.is_ref() ? "obj" + std::to_string(ref.as_ref().num) : "inline:" + key;
        auto it = fonts_.find(cache_key);
        if (it == fonts_.end()) {
            Font f = ref.is_null() ? Font{} : load_font(file_, ref);
            if (ref.is_null()) f.standard_metrics = true;
            it = fonts_.emplace(cache_key, std::move(f)).first;
        }
        return &it->second;
    }

    doc::Point to_page(const doc::Point& p) const { return {p.x - ox_, p.y - oy_}; }

    void add_image(const std::string& id) {
        doc::Point c[4] = {gs_.ctm.apply(0, 0), gs_.ctm.apply(1, 0), gs_.ctm.apply(0, 1), gs_.ctm.apply(1, 1)};
        doc::BBox b{1e300, 1e300, -1e300, -1e300};
        for (auto& p : c) {
            auto q = to_page(p);
            b.x0 = std::min(b.x0, q.x);
            b.y0 = std::min(b.y0, q.y);
            b.x1 = std::max(b.x1, q.x);
            b.y1 = std::max(b.y1, q.y);
        }
        doc::ImageRef ref{id, std::nullopt};
        if (b.well_formed()) ref.bbox = doc::BBox{quantize3(b.x0), quantize3(b.y0), quantize3(b.x1), quantize3(b.y1)};
        out_.image_refs.push_back(std::move(ref));
    }

    void skip_inline_image(pdf::Lexer& lx) {
        // dictionary entries until ID, then binary data until EI
        while (!lx.at_end()) {
            Object o = lx.parse_object(false);
            if (o.is_keyword("ID")) break;
        }
        std::string_view data = lx.data();
        std::size_t p = lx.pos() + 1;
        while (p + 2 <= data.size()) {
            if (data[p] == 'E' && data[p + 1] == 'I' && pdf::is_pdf_whitespace(data[p - 1]) &&
                (p + 2 == data.size() || pdf::is_pdf_whitespace(data[p + 2]) || pdf::is_pdf_delimiter(data[p + 2]))) {
                lx.seek(p + 2);
                add_image("inline-" + std::to_string(inline_images_++));
                return;
            }
            ++p;
        }
        lx.seek(data.size());
    }

    void show_text(const std::string& bytes, RawSnippet& snip, bool& any) {
        const Font* font = gs_.font;
        if (!font) {
            static const Font kDefault = [] {
                Font f;
                f.standard_metrics = true;
                return f;
            }();
            font = &kDefault;
        }
        const double fs = gs_.font_size;
        const double th = gs_.h_scale;
        const std::size_t step = static_cast<std::size_t>(font->code_bytes);
        for (std::size_t i = 0; i + step <= bytes.size(); i += step) {
            unsigned code = bytes_to_code(bytes.substr(i, step));
            const double w0 = font->width(code);
            const Matrix m = tm_ * gs_.ctm;
            const double y0t = font->descent * fs + gs_.rise;
            const double y1t = font->ascent * fs + gs_.rise;
            const double x1t = w0 * fs * th;
            doc::Point corners[4] = {m.apply(0, y0t), m.apply(x1t, y0t), m.apply(0, y1t), m.apply(x1t, y1t)};
            double gx0 = 1e300, gx1 = -1e300, gy0 = 1e300, gy1 = -1e300;
            for (auto& p : corners) {
                auto q = to_page(p);
                gx0 = std::min(gx0, q.x);
                gx1 = std::max(gx1, q.x);
                gy0 = std::min(gy0, q.y);
                gy1 = std::max(gy1, q.y);
            }
            if (gs_.render_mode != 3 && gs_.render_mode != 7) {
                std::string u = font->decode(code);
                auto cps = utf8_decode(u);
                if (!cps.empty()) {
                    if (!any) {
                        snip.bbox = {gx0, gy0, gx1, gy1};
                        doc::Point base = to_page(m.apply(0, gs_.rise));
                        snip.baseline_y = base.y;
                        const double vscale = std::hypot(m.c, m.d);
                        snip.font = FontSpec{font->name, fs * vscale, font->italic, font->bold};
                        any = true;
                    } else {
                        snip.bbox = snip.bbox.united({gx0, gy0, gx1, gy1});
                    }
                    const double share = (gx1 - gx0) / static_cast<double>(cps.size());
                    for (std::size_t k = 0; k < cps.size(); ++k) {
                        snip.glyph_x.emplace_back(gx0 + share * static_cast<double>(k), gx0 + share * static_cast<double>(k + 1));
                    }
                    snip.text += utf8_encode(cps);
                }
            }
            double tx = (w0 * fs + gs_.char_spacing + ((step == 1 && code == 32) ? gs_.word_spacing : 0)) * th;
            tm_ = Matrix::translate(tx, 0) * tm_;
        }
    }

    void emit(RawSnippet& snip, bool any) {
        if (!any) return;
        out_.snippets.push_back(std::move(snip));
    }

    void next_line(double tx, double ty) {
        tlm_ = Matrix::translate(tx, ty) * tlm_;
        tm_ = tlm_;
    }

    void add_segment(const doc::Point& a, const doc::Point& b) {
        auto pa = to_page(a), pb = to_page(b);
        out_.paths.push_back({{quantize3(pa.x), quantize3(pa.y)}, {quantize3(pb.x), quantize3(pb.y)}});
    }

    void paint(bool stroke, bool fill) {
        if (stroke) {
            for (const auto& seg : pending_segments_) add_segment(seg.first, seg.second);
        } else if (fill) {
            // thin filled rectangles are ruling lines in most generators
            for (const auto& r : pending_rects_) {
                double w = std::abs(r[1].x - r[0].x), h = std::abs(r[1].y - r[0].y);
                if (w < 2.0 && h >= 2.0) {
                    double x = 0.5 * (r[0].x + r[1].x);
                    add_segment({x, std::min(r[0].y, r[1].y)}, {x, std::max(r[0].y, r[1].y)});
                } else if (h < 2.0 && w >= 2.0) {
                    double y = 0.5 * (r[0].y + r[1].y);
                    add_segment({std::min(r[0].x, r[1].x), y}, {std::max(r[0].x, r[1].x), y});
                }
            }
        }
        pending_segments_.clear();
        pending_rects_.clear();
        has_point_ = false;
    }

    void execute(const std::string& op, const std::vector<Object>& a, const Object& resources,
                 std::vector<GraphicsState>& stack, int depth) {
        auto need = [&](std::size_t n) {
            if (a.size() < n) throw Error(errc::kParseFailure, "operator " + op + " is missing operands");
            for (std::size_t i = a.size() - n; i < a.size(); ++i) {
                if (!a[i].is_number() && !a[i].is_name() && !a[i].is_string() && !a[i].is_array()) {
                    throw Error(errc::kParseFailure, "operator " + op + " has bad operands");
                }
            }
        };
        auto num = [&](std::size_t i) { return a[a.size() - i].as_number(); };  // i-th from the end, 1-based

        if (op == "q") {
            stack.push_back(gs_);
        } else if (op == "Q") {
            if (!stack.empty()) {
                gs_ = stack.back();
                stack.pop_back();
            }
        } else if (op == "cm") {
            need(6);
            gs_.ctm = matrix_from(a, a.size() - 6) * gs_.ctm;
        } else if (op == "BT") {
            tm_ = tlm_ = Matrix{};
        } else if (op == "ET") {
        } else if (op == "Tf") {
            need(2);
            gs_.font_key = a[a.size() - 2].text();
            gs_.font = font_for(resources, gs_.font_key);
            gs_.font_size = num(1);
        } else if (op == "Tc") {
            need(1);
            gs_.char_spacing = num(1);
        } else if (op == "Tw") {
            need(1);
            gs_.word_spacing = num(1);
        } else if (op == "Tz") {
            need(1);
            gs_.h_scale = num(1) / 100.0;
        } else if (op == "TL") {
            need(1);
            gs_.leading = num(1);
        } else if (op == "Ts") {
            need(1);
            gs_.rise = num(1);
        } else if (op == "Tr") {
            need(1);
            gs_.render_mode = static_cast<int>(num(1));
        } else if (op == "Td") {
            need(2);
            next_line(num(2), num(1));
        } else if (op == "TD") {
            need(2);
            gs_.leading = -num(1);
            next_line(num(2), num(1));
        } else if (op == "Tm") {
            need(6);
            tm_ = tlm_ = matrix_from(a, a.size() - 6);
        } else if (op == "T*") {
            next_line(0, -gs_.leading);
        } else if (op == "Tj" || op == "'" || op == "\"") {
            if (op == "\"") {
                need(3);
                gs_.word_spacing = num(3);
                gs_.char_spacing = num(2);
            }
            if (op != "Tj") next_line(0, -gs_.leading);
            need(1);
            RawSnippet snip;
            bool any = false;
            show_text(a.back().text(), snip, any);
            emit(snip, any);
        } else if (op == "TJ") {
            need(1);
            RawSnippet snip;
            bool any = false;
            for (const auto& e : a.back().as_array()) {
                if (e.is_string()) show_text(e.text(), snip, any);
                else if (e.is_number()) tm_ = Matrix::translate(-e.as_number() / 1000.0 * gs_.font_size * gs_.h_scale, 0) * tm_;
            }
            emit(snip, any);
        } else if (op == "m") {
            need(2);
            current_ = start_ = gs_.ctm.apply(num(2), num(1));
            has_point_ = true;
        } else if (op == "l") {
            need(2);
            doc::Point p = gs_.ctm.apply(num(2), num(1));
            if (has_point_) pending_segments_.emplace_back(current_, p);
            current_ = p;
            has_point_ = true;
        } else if (op == "c" || op == "v" || op == "y") {
            // curves are never ruling lines; only track the current point
            if (a.size() >= 2) {
                current_ = gs_.ctm.apply(num(2), num(1));
                has_point_ = true;
            }
        } else if (op == "h") {
            if (has_point_ && (current_.x != start_.x || current_.y != start_.y)) pending_segments_.emplace_back(current_, start_);
            current_ = start_;
        } else if (op == "re") {
            need(4);
            double x = num(4), y = num(3), w = num(2), h = num(1);
            doc::Point p0 = gs_.ctm.apply(x, y), p1 = gs_.ctm.apply(x + w, y), p2 = gs_.ctm.apply(x + w, y + h),
                       p3 = gs_.ctm.apply(x, y + h);
            pending_segments_.emplace_back(p0, p1);
            pending_segments_.emplace_back(p1, p2);
            pending_segments_.emplace_back(p2, p3);
            pending_segments_.emplace_back(p3, p0);
            pending_rects_.push_back({p0, p2});
            current_ = start_ = p0;
            has_point_ = true;
        } else if (op == "S" || op == "s") {
            if (op == "s" && has_point_) pending_segments_.emplace_back(current_, start_);
            paint(true, false);
        } else if (op == "f" || op == "F" || op == "f*") {
            paint(false, true);
        } else if (op == "B" || op == "B*" || op == "b" || op == "b*") {
            paint(true, true);
        } else if (op == "n") {
            paint(false, false);
        } else if (op == "Do") {
            need(1);
            const std::string& name = a.back().text();
            Object xobjects = file_.resolve(resources.get("XObject"));
            const Object& ref = xobjects.get(name);
            Object xo = file_.resolve(ref);
            if (!xo.is_stream()) return;
            if (xo.get("Subtype").is_name("Image")) {
                add_image(ref.is_ref() ? "obj" + std::to_string(ref.as_ref().num) : name);
            } else if (xo.get("Subtype").is_name("Form")) {
                Matrix fm;
                const auto& arr = file_.resolve(xo.get("Matrix")).as_array();
                if (arr.size() == 6) fm = matrix_from(arr, 0);
                Object form_res = file_.resolve(xo.get("Resources"));
                std::string body = file_.decode(xo);
                GraphicsState outer = gs_;
                Matrix outer_tm = tm_, outer_tlm = tlm_;
                run(body, form_res.is_dict() ? form_res : resources, fm * gs_.ctm, depth + 1);
                gs_ = outer;
                tm_ = outer_tm;
                tlm_ = outer_tlm;
            }
        }
    }

    const pdf::File& file_;
    PageSnippets& out_;
    double ox_, oy_;
    GraphicsState gs_;
    Matrix tm_, tlm_;
    std::map<std::string, Font> fonts_;
    std::vector<std::pair<doc::Point, doc::Point>> pending_segments_;
    std::vector<std::array<doc::Point, 2>> pending_rects_;
    doc::Point current_, start_;
    bool has_point_ = false;
    int inline_images_ = 0;
    int content_errors_ = 0;
};

}  // namespace

PageSnippets extract_page(const pdf::File& file, const pdf::PageInfo& page, int page_number) {
    PageSnippets out;
    const auto& mb = page.media_box;
    const double x0 = std::min(mb[0], mb[2]), y0 = std::min(mb[1], mb[3]);
    out.geometry = {std::abs(mb[2] - mb[0]), std::abs(mb[3] - mb[1]), page_number};
    if (!(out.geometry.width > 0) || !(out.geometry.height > 0)) {
        throw Error(errc::kParseFailure, "page " + std::to_string(page_number) + " has an empty media box");
    }

    std::string content;
    Object contents = file.resolve(page.dict.get("Contents"));
    if (contents.is_stream()) {
        content = file.decode(contents);
    } else if (contents.is_array()) {
        for (const auto& part : contents.as_array()) {
            content += file.decode(file.resolve(part));
            content += "\n";
        }
    }
    Interpreter interp(file, out, x0, y0);
    interp.run(content, page.resources, Matrix{}, 0);
    return out;
}

}  // namespace ccs::parser

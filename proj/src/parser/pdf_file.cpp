#include "ccs/parser/pdf_file.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <set>

#include "ccs/error.hpp"

namespace ccs::parser::pdf {

namespace {

[[noreturn]] void parse_failure(const std::string& what, std::size_t offset) {
    throw Error(errc::kParseFailure, what + " at byte offset " + std::to_string(offset));
}

std::string apply_png_predictor(std::string_view data, int columns, int colors, int bpc) {
    const int bpp = std::max(1, colors * bpc / 8);
    const std::size_t row_len = static_cast<std::size_t>((columns * colors * bpc + 7) / 8);
    std::string out;
    std::string prev(row_len, '\0');
    std::size_t pos = 0;
    while (pos + 1 + row_len <= data.size()) {
        const unsigned char filter = static_cast<unsigned char>(data[pos]);
        std::string row(data.substr(pos + 1, row_len));
        for (std::size_t i = 0; i < row_len; ++i) {
            const int left = i >= static_cast<std::size_t>(bpp) ? static_cast<unsigned char>(row[i - bpp]) : 0;
            const int up = static_cast<unsigned char>(prev[i]);
            const int up_left = i >= static_cast<std::size_t>(bpp) ? static_cast<unsigned char>(prev[i - bpp]) : 0;
            int v = static_cast<unsigned char>(row[i]);
            switch (filter) {
                case 0: break;
                case 1: v += left; break;
                case 2: v += up; break;
                case 3: v += (left + up) / 2; break;
                case 4: {
                    int p = left + up - up_left;
                    int pa = std::abs(p - left), pb = std::abs(p - up), pc = std::abs(p - up_left);
                    v += (pa <= pb && pa <= pc) ? left : (pb <= pc ? up : up_left);
                    break;
                }
                default:
                    throw Error(errc::kParseFailure, "unknown PNG predictor " + std::to_string(filter));
            }
            row[i] = static_cast<char>(v & 0xff);
        }
        out += row;
        prev = row;
        pos += 1 + row_len;
    }
    return out;
}

std::string ascii_hex_decode(std::string_view in) {
    std::string out;
    int hi = -1;
    for (char c : in) {
        if (c == '>') break;
        int v = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : (c >= 'A' && c <= 'F') ? c - 'A' + 10 : -1;
        if (v < 0) continue;
        if (hi < 0) hi = v;
        else {
            out.push_back(static_cast<char>(hi * 16 + v));
            hi = -1;
        }
    }
    if (hi >= 0) out.push_back(static_cast<char>(hi * 16));
    return out;
}

std::string ascii85_decode(std::string_view in) {
    std::string out;
    std::uint32_t tuple = 0;
    int count = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (c == '~') break;
        if (is_pdf_whitespace(c)) continue;
        if (c == 'z' && count == 0) {
            out.append(4, '\0');
            continue;
        }
        if (c < '!' || c > 'u') throw Error(errc::kParseFailure, "bad ASCII85 data");
        tuple = tuple * 85 + static_cast<std::uint32_t>(c - '!');
        if (++count == 5) {
            for (int k = 3; k >= 0; --k) out.push_back(static_cast<char>((tuple >> (8 * k)) & 0xff));
            tuple = 0;
            count = 0;
        }
    }
    if (count > 1) {
        for (int k = count; k < 5; ++k) tuple = tuple * 85 + 84;
        for (int k = 0; k < count - 1; ++k) out.push_back(static_cast<char>((tuple >> (8 * (3 - k))) & 0xff));
    }
    return out;
}

}  // namespace

std::string inflate(std::string_view compressed) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw Error(errc::kParseFailure, "zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    zs.avail_in = static_cast<uInt>(compressed.size());
    std::string out;
    char buf[1 << 15];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = ::inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            // Truncated streams are common; keep what was recovered.
            if (rc == Z_BUF_ERROR || rc == Z_DATA_ERROR) {
                out.append(buf, sizeof buf - zs.avail_out);
                break;
            }
            inflateEnd(&zs);
            throw Error(errc::kParseFailure, "corrupt Flate stream");
        }
        out.append(buf, sizeof buf - zs.avail_out);
        if (zs.avail_in == 0 && rc != Z_STREAM_END && zs.avail_out != 0) break;
    }
    inflateEnd(&zs);
    return out;
}

File::File(std::string data) : data_(std::move(data)) {
    if (data_.size() < 8 || data_.compare(0, 5, "%PDF-") != 0) {
        auto header = data_.find("%PDF-");
        if (header == std::string::npos || header > 1024) parse_failure("missing %PDF header", 0);
    }
    auto sx = data_.rfind("startxref");
    if (sx == std::string::npos) parse_failure("missing startxref", data_.size());
    Lexer lx(data_, sx + 9);
    Object off;
    try {
        off = lx.parse_object(false);
    } catch (const Error&) {
        parse_failure("bad startxref value", sx);
    }
    if (!off.is_number() || off.as_number() < 0 || off.as_number() >= static_cast<double>(data_.size())) {
        parse_failure("startxref points outside the file", sx);
    }
    read_xref_chain(static_cast<std::size_t>(off.as_number()));
    if (trailer_.contains("Encrypt")) throw Error(errc::kUnsupportedEncryption, "encrypted PDF documents are not supported");
    if (!trailer_.contains("Root")) parse_failure("trailer has no /Root", static_cast<std::size_t>(off.as_number()));
}

void File::read_xref_chain(std::size_t offset) {
    std::set<std::size_t> seen;
    bool first = true;
    while (true) {
        if (!seen.insert(offset).second) parse_failure("cyclic xref /Prev chain", offset);
        if (offset >= data_.size()) parse_failure("xref offset outside the file", offset);
        Dict trailer;
        Lexer lx(data_, offset);
        lx.skip_whitespace();
        if (data_.compare(lx.pos(), 4, "xref") == 0) {
            read_classic_xref(lx.pos(), trailer);
            if (auto it = trailer.find("XRefStm"); it != trailer.end() && it->second.is_number()) {
                Dict ignored;
                read_xref_stream(static_cast<std::size_t>(it->second.as_number()), ignored);
            }
        } else {
            read_xref_stream(offset, trailer);
        }
        if (first) {
            trailer_ = trailer;
            first = false;
        }
        auto prev = trailer.find("Prev");
        if (prev == trailer.end() || !prev->second.is_number()) break;
        offset = static_cast<std::size_t>(prev->second.as_number());
    }
}

std::size_t File::read_classic_xref(std::size_t offset, Dict& trailer) {
    Lexer lx(data_, offset + 4);
    while (true) {
        lx.skip_whitespace();
        std::size_t at = lx.pos();
        Object tok;
        try {
            tok = lx.parse_object(false);
        } catch (const Error&) {
            parse_failure("corrupt xref table", at);
        }
        if (tok.is_keyword("trailer")) {
            Object t;
            try {
                t = lx.parse_object(true);
            } catch (const Error&) {
                parse_failure("corrupt trailer", lx.pos());
            }
            if (!t.is_dict()) parse_failure("trailer is not a dictionary", at);
            trailer = t.as_dict();
            return lx.pos();
        }
        if (!tok.is_number()) parse_failure("corrupt xref subsection header", at);
        Object count = lx.parse_object(false);
        if (!count.is_number() || count.as_number() < 0) parse_failure("corrupt xref subsection header", at);
        int start = tok.as_int();
        for (int i = 0; i < count.as_int(); ++i) {
            std::size_t eat = lx.pos();
            Object o = lx.parse_object(false);
            Object g = lx.parse_object(false);
            Object t = lx.parse_object(false);
            if (!o.is_number() || !g.is_number() || !(t.is_keyword("n") || t.is_keyword("f"))) {
                parse_failure("corrupt xref entry", eat);
            }
            int num = start + i;
            if (t.is_keyword("n") && !xref_.contains(num)) {
                if (o.as_number() < 0 || o.as_number() >= static_cast<double>(data_.size())) {
                    parse_failure("xref entry points outside the file", eat);
                }
                xref_[num] = Entry{1, static_cast<std::size_t>(o.as_number()), 0, 0};
            } else if (t.is_keyword("f") && !xref_.contains(num)) {
                xref_[num] = Entry{0, 0, 0, 0};
            }
        }
    }
}

void File::read_xref_stream(std::size_t offset, Dict& trailer) {
    Lexer lx(data_, offset);
    Object num, gen, kw;
    try {
        num = lx.parse_object(false);
        gen = lx.parse_object(false);
        kw = lx.parse_object(false);
    } catch (const Error&) {
        parse_failure("corrupt xref", offset);
    }
    if (!num.is_number() || !gen.is_number() || !kw.is_keyword("obj")) parse_failure("corrupt xref", offset);
    Object xs = parse_indirect_at(offset, {num.as_int(), gen.as_int()});
    if (!xs.is_stream() || !xs.get("Type").is_name("XRef")) parse_failure("xref offset does not point to an xref stream", offset);
    trailer = xs.as_dict();
    std::string body = decode(xs);
    const auto& w = xs.get("W").as_array();
    if (w.size() != 3) parse_failure("xref stream /W must have 3 entries", offset);
    int w0 = w[0].as_int(), w1 = w[1].as_int(), w2 = w[2].as_int();
    const int row = w0 + w1 + w2;
    if (row <= 0) parse_failure("xref stream has empty rows", offset);
    std::vector<int> index;
    for (const auto& v : xs.get("Index").as_array()) index.push_back(v.as_int());
    if (index.empty()) index = {0, xs.get("Size").as_int()};
    auto field = [&](std::size_t pos, int width) {
        std::uint64_t v = 0;
        for (int k = 0; k < width; ++k) v = (v << 8) | static_cast<unsigned char>(body[pos + static_cast<std::size_t>(k)]);
        return v;
    };
    std::size_t pos = 0;
    for (std::size_t s = 0; s + 1 < index.size(); s += 2) {
        for (int i = 0; i < index[s + 1]; ++i) {
            if (pos + static_cast<std::size_t>(row) > body.size()) parse_failure("truncated xref stream", offset);
            int type = w0 == 0 ? 1 : static_cast<int>(field(pos, w0));
            std::uint64_t f1 = field(pos + static_cast<std::size_t>(w0), w1);
            std::uint64_t f2 = field(pos + static_cast<std::size_t>(w0 + w1), w2);
            pos += static_cast<std::size_t>(row);
            int objnum = index[s] + i;
            if (xref_.contains(objnum)) continue;
            if (type == 1) {
                if (f1 >= data_.size()) parse_failure("xref entry points outside the file", offset);
                xref_[objnum] = Entry{1, static_cast<std::size_t>(f1), 0, 0};
            } else if (type == 2) {
                xref_[objnum] = Entry{2, 0, static_cast<int>(f1), static_cast<int>(f2)};
            } else {
                xref_[objnum] = Entry{0, 0, 0, 0};
            }
        }
    }
}

Object File::parse_indirect_at(std::size_t offset, Ref expected) const {
    Lexer lx(data_, offset);
    Object num = lx.parse_object(false);
    Object gen = lx.parse_object(false);
    Object kw = lx.parse_object(false);
    if (!num.is_number() || !gen.is_number() || !kw.is_keyword("obj") || num.as_int() != expected.num) {
        parse_failure("xref entry for object " + std::to_string(expected.num) + " does not point to it", offset);
    }
    Object value = lx.parse_object(true);
    std::size_t after_value = lx.pos();
    lx.skip_whitespace();
    if (value.is_dict() && data_.compare(lx.pos(), 6, "stream") == 0) {
        std::size_t p = lx.pos() + 6;
        if (p < data_.size() && data_[p] == '\r') ++p;
        if (p < data_.size() && data_[p] == '\n') ++p;
        const Object& len_obj = value.get("Length");
        long long len = -1;
        if (len_obj.is_number()) len = static_cast<long long>(len_obj.as_number());
        else if (len_obj.is_ref()) {
            Object l = object(len_obj.as_ref());
            if (l.is_number()) len = static_cast<long long>(l.as_number());
        }
        bool length_ok = len >= 0 && p + static_cast<std::size_t>(len) <= data_.size();
        if (length_ok) {
            std::size_t q = p + static_cast<std::size_t>(len);
            while (q < data_.size() && is_pdf_whitespace(data_[q])) ++q;
            length_ok = data_.compare(q, 9, "endstream") == 0;
        }
        if (!length_ok) {
            auto end = data_.find("endstream", p);
            if (end == std::string::npos) parse_failure("unterminated stream", p);
            std::size_t e = end;
            if (e > p && data_[e - 1] == '\n') --e;
            if (e > p && data_[e - 1] == '\r') --e;
            len = static_cast<long long>(e - p);
        }
        Stream s{value.as_dict(), data_.substr(p, static_cast<std::size_t>(len))};
        return Object::stream(std::move(s));
    }
    (void)after_value;
    return value;
}

Object File::load_from_object_stream(const Entry& e, Ref r) const {
    Object os = object({e.stream_num, 0});
    if (!os.is_stream()) parse_failure("object stream " + std::to_string(e.stream_num) + " missing", 0);
    std::string body = decode(os);
    int n = os.get("N").as_int();
    int first = os.get("First").as_int();
    Lexer hdr(body);
    for (int i = 0; i < n; ++i) {
        Object num = hdr.parse_object(false);
        Object off = hdr.parse_object(false);
        if (!num.is_number() || !off.is_number()) parse_failure("corrupt object stream header", 0);
        if (num.as_int() == r.num) {
            Lexer lx(body, static_cast<std::size_t>(first + off.as_int()));
            return lx.parse_object(true);
        }
    }
    parse_failure("object " + std::to_string(r.num) + " not found in object stream", 0);
}

Object File::object(Ref r) const {
    if (auto it = cache_.find(r.num); it != cache_.end()) return it->second;
    auto xe = xref_.find(r.num);
    if (xe == xref_.end() || xe->second.type == 0) return Object{};
    if (resolving_[r.num]++ > 0) {
        resolving_[r.num]--;
        parse_failure("reference cycle at object " + std::to_string(r.num), xe->second.offset);
    }
    Object o;
    try {
        o = xe->second.type == 1 ? parse_indirect_at(xe->second.offset, r) : load_from_object_stream(xe->second, r);
    } catch (...) {
        resolving_[r.num]--;
        throw;
    }
    resolving_[r.num]--;
    cache_[r.num] = o;
    return o;
}

Object File::resolve(const Object& o) const {
    Object cur = o;
    for (int depth = 0; cur.is_ref() && depth < 32; ++depth) cur = object(cur.as_ref());
    return cur;
}

std::string File::decode(const Object& stream) const {
    if (!stream.is_stream()) return {};
    std::string data = stream.as_stream().raw;
    Object filters = resolve(stream.get("Filter"));
    Object parms = resolve(stream.get("DecodeParms"));
    std::vector<Object> fl, pl;
    if (filters.is_name()) {
        fl.push_back(filters);
        pl.push_back(parms);
    } else if (filters.is_array()) {
        fl = filters.as_array();
        if (parms.is_array()) pl = parms.as_array();
    }
    for (std::size_t i = 0; i < fl.size(); ++i) {
        const std::string& f = fl[i].text();
        Object p = i < pl.size() ? resolve(pl[i]) : Object{};
        if (f == "FlateDecode" || f == "Fl") {
            data = inflate(data);
            int predictor = p.get("Predictor").is_number() ? p.get("Predictor").as_int() : 1;
            if (predictor >= 10) {
                int columns = p.get("Columns").is_number() ? p.get("Columns").as_int() : 1;
                int colors = p.get("Colors").is_number() ? p.get("Colors").as_int() : 1;
                int bpc = p.get("BitsPerComponent").is_number() ? p.get("BitsPerComponent").as_int() : 8;
                data = apply_png_predictor(data, columns, colors, bpc);
            } else if (predictor != 1) {
                throw Error(errc::kParseFailure, "unsupported predictor " + std::to_string(predictor));
            }
        } else if (f == "ASCIIHexDecode" || f == "AHx") {
            data = ascii_hex_decode(data);
        } else if (f == "ASCII85Decode" || f == "A85") {
            data = ascii85_decode(data);
        } else {
            throw Error(errc::kParseFailure, "unsupported stream filter " + f);
        }
    }
    return data;
}

std::vector<PageInfo> File::pages() const {
    std::vector<PageInfo> out;
    Object root = resolve(trailer_.at("Root"));
    Object tree = resolve(root.get("Pages"));
    if (!tree.is_dict()) throw Error(errc::kParseFailure, "document has no page tree");

    struct Inherited {
        Object resources;
        std::array<double, 4> box{0, 0, 612, 792};
    };
    std::set<int> visited;
    auto read_box = [&](const Object& node, std::array<double, 4>& box) {
        Object mb = resolve(node.get("MediaBox"));
        if (mb.is_array() && mb.as_array().size() == 4) {
            for (int k = 0; k < 4; ++k) box[static_cast<std::size_t>(k)] = resolve(mb.as_array()[static_cast<std::size_t>(k)]).as_number();
        }
    };
    auto walk = [&](auto&& self, const Object& node_ref, Inherited inh, int depth) -> void {
        if (depth > 64) throw Error(errc::kParseFailure, "page tree too deep");
        if (node_ref.is_ref() && !visited.insert(node_ref.as_ref().num).second) {
            throw Error(errc::kParseFailure, "cycle in page tree");
        }
        Object node = resolve(node_ref);
        if (!node.is_dict()) return;
        if (!node.get("Resources").is_null()) inh.resources = resolve(node.get("Resources"));
        read_box(node, inh.box);
        const Object& type = node.get("Type");
        Object kids = resolve(node.get("Kids"));
        if (type.is_name("Pages") || (kids.is_array() && !type.is_name("Page"))) {
            for (const auto& kid : kids.as_array()) self(self, kid, inh, depth + 1);
            return;
        }
        PageInfo info;
        info.dict = node;
        info.resources = inh.resources;
        info.media_box = inh.box;
        out.push_back(std::move(info));
    };
    walk(walk, root.get("Pages"), Inherited{}, 0);
    return out;
}

}  // namespace ccs::parser::pdf

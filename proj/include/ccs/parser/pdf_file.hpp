#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ccs/parser/pdf_object.hpp"

namespace ccs::parser::pdf {

struct PageInfo {
    Object dict;
    Object resources;            // resolved, possibly inherited
    std::array<double, 4> media_box{0, 0, 612, 792};
};

/// Random-access view over a PDF file: cross-reference tables (classic and
/// stream form), object streams, stream filters and the page tree.
/// Not thread-safe: resolved objects are cached.
class File {
public:
    /// Throws parse-failure (with byte offset) for structural damage and
    /// unsupported-encryption for encrypted files.
    explicit File(std::string data);

    const Dict& trailer() const { return trailer_; }
    Object resolve(const Object& o) const;
    Object object(Ref r) const;

    /// Applies the stream's filter chain.
    std::string decode(const Object& stream) const;

    std::vector<PageInfo> pages() const;

private:
    struct Entry {
        int type = 0;         // 1: offset in file, 2: inside object stream
        std::size_t offset = 0;
        int stream_num = 0;
        int index = 0;
    };

    void read_xref_chain(std::size_t offset);
    std::size_t read_classic_xref(std::size_t offset, Dict& trailer);
    void read_xref_stream(std::size_t offset, Dict& trailer);
    Object parse_indirect_at(std::size_t offset, Ref expected) const;
    Object load_from_object_stream(const Entry& e, Ref r) const;

    std::string data_;
    Dict trailer_;
    std::map<int, Entry> xref_;
    mutable std::map<int, Object> cache_;
    mutable std::map<int, int> resolving_;
};

std::string inflate(std::string_view compressed);

}  // namespace ccs::parser::pdf

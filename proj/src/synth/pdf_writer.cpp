#include "ccs/synth/pdf_writer.hpp"

#include <zlib.h>

#include <cstdio>
#include <stdexcept>

#include "ccs/error.hpp"
#include "ccs/parser/font_metrics.hpp"
#include "ccs/parser/snippet.hpp"

namespace ccs::synth {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// UTF-8 to WinAnsi bytes; unmappable code points become '?'.
std::string to_win_ansi(std::string_view text) {
    std::string out;
    for (char32_t cp : parser::utf8_decode(text)) {
        unsigned char b = '?';
        if (cp < 0x80 || (cp >= 0xA0 && cp <= 0xFF)) b = static_cast<unsigned char>(cp);
        else if (cp == 0x2022) b = 0x95;
        else if (cp == 0x2013) b = 0x96;
        else if (cp == 0x2014) b = 0x97;
        else if (cp == 0x2018) b = 0x91;
        else if (cp == 0x2019) b = 0x92;
        else if (cp == 0x201C) b = 0x93;
        else if (cp == 0x201D) b = 0x94;
        out += static_cast<char>(b);
    }
    return out;
}

std::string literal(std::string_view bytes) {
    std::string out = "(";
    for (char c : bytes) {
        if (c == '(' || c == ')' || c == '\\') out += '\\';
        out += c;
    }
    return out + ")";
}

const char* font_key(FontStyle s) {
    if (s.bold && s.italic) return "F4";
    if (s.bold) return "F2";
    if (s.italic) return "F3";
    return "F1";
}

std::string deflate(std::string_view in) {
    uLongf len = compressBound(static_cast<uLong>(in.size()));
    std::string out(len, '\0');
    if (compress2(reinterpret_cast<Bytef*>(out.data()), &len, reinterpret_cast<const Bytef*>(in.data()),
                  static_cast<uLong>(in.size()), Z_BEST_SPEED) != Z_OK) {
        throw Error(errc::kIo, "deflate failed");
    }
    out.resize(len);
    return out;
}

}  // namespace

double text_width(std::string_view text, double size) {
    double w = 0;
    for (unsigned char b : to_win_ansi(text)) w += parser::helvetica_width(b);
    return w * size / 1000.0;
}

std::size_t PdfWriter::add_page(double width, double height) {
    pages_.push_back({width, height, {}, 0});
    return pages_.size() - 1;
}

void PdfWriter::text(std::size_t page, double x, double y, double size, std::string_view text, FontStyle style) {
    auto& c = pages_.at(page).content;
    c += "BT /" + std::string(font_key(style)) + " " + fmt(size) + " Tf " + fmt(x) + " " + fmt(y) + " Td " +
         literal(to_win_ansi(text)) + " Tj ET\n";
}

void PdfWriter::text_per_glyph(std::size_t page, double x, double y, double size, std::string_view text,
                               FontStyle style) {
    std::string bytes = to_win_ansi(text);
    auto& c = pages_.at(page).content;
    c += "BT /" + std::string(font_key(style)) + " " + fmt(size) + " Tf 1 0 0 1 " + fmt(x) + " " + fmt(y) + " Tm\n";
    for (char b : bytes) c += literal(std::string_view(&b, 1)) + " Tj\n";
    c += "ET\n";
}

void PdfWriter::line(std::size_t page, double x0, double y0, double x1, double y1, double width) {
    pages_.at(page).content +=
        fmt(width) + " w " + fmt(x0) + " " + fmt(y0) + " m " + fmt(x1) + " " + fmt(y1) + " l S\n";
}

void PdfWriter::fill_rect(std::size_t page, double x, double y, double w, double h) {
    pages_.at(page).content += fmt(x) + " " + fmt(y) + " " + fmt(w) + " " + fmt(h) + " re f\n";
}

void PdfWriter::image(std::size_t page, double x, double y, double w, double h) {
    auto& p = pages_.at(page);
    p.content += "q " + fmt(w) + " 0 0 " + fmt(h) + " " + fmt(x) + " " + fmt(y) + " cm /Im" +
                 std::to_string(p.images++) + " Do Q\n";
}

std::string PdfWriter::bytes() const {
    // objects: 1 catalog, 2 pages, 3-6 fonts, 7 image, then per page: page, content
    std::vector<std::string> objs;
    std::string kids;
    const int first_page_obj = 8;
    for (std::size_t i = 0; i < pages_.size(); ++i) {
        kids += std::to_string(first_page_obj + 2 * static_cast<int>(i)) + " 0 R ";
    }
    objs.push_back("<< /Type /Catalog /Pages 2 0 R >>");
    objs.push_back("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(pages_.size()) + " >>");
    std::string widths;
    for (int w : parser::kHelveticaWidths) widths += std::to_string(w) + " ";
    const char* faces[] = {"Helvetica", "Helvetica-Bold", "Helvetica-Oblique", "Helvetica-BoldOblique"};
    for (const char* face : faces) {
        objs.push_back(std::string("<< /Type /Font /Subtype /Type1 /BaseFont /") + face +
                       " /Encoding /WinAnsiEncoding /FirstChar 32 /LastChar 126 /Widths [" + widths + "] >>");
    }
    objs.push_back("<< /Type /XObject /Subtype /Image /Width 1 /Height 1 /ColorSpace /DeviceGray "
                   "/BitsPerComponent 8 /Length 1 >>\nstream\n\x80\nendstream");
    for (std::size_t i = 0; i < pages_.size(); ++i) {
        const Page& p = pages_[i];
        std::string xobjects;
        for (int k = 0; k < p.images; ++k) xobjects += "/Im" + std::to_string(k) + " 7 0 R ";
        const int content_obj = first_page_obj + 2 * static_cast<int>(i) + 1;
        objs.push_back("<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + fmt(p.width) + " " + fmt(p.height) +
                       "] /Resources << /Font << /F1 3 0 R /F2 4 0 R /F3 5 0 R /F4 6 0 R >> /XObject << " +
                       xobjects + ">> >> /Contents " + std::to_string(content_obj) + " 0 R >>");
        std::string body = opts_.compress ? deflate(p.content) : p.content;
        std::string dict = "<< /Length " + std::to_string(body.size()) + (opts_.compress ? " /Filter /FlateDecode" : "") + " >>";
        objs.push_back(dict + "\nstream\n" + body + "\nendstream");
    }

    std::string out = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        offsets.push_back(out.size());
        out += std::to_string(i + 1) + " 0 obj\n" + objs[i] + "\nendobj\n";
    }
    const std::size_t xref = out.size();
    out += "xref\n0 " + std::to_string(objs.size() + 1) + "\n0000000000 65535 f \n";
    for (std::size_t off : offsets) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%010zu 00000 n \n", off);
        out += buf;
    }
    out += "trailer\n<< /Size " + std::to_string(objs.size() + 1) + " /Root 1 0 R";
    if (opts_.encrypt) out += " /Encrypt << /Filter /Standard /V 1 /R 2 /O <00> /U <00> /P -4 >>";
    out += " >>\nstartxref\n" + std::to_string(xref) + "\n%%EOF\n";
    return out;
}

}  // namespace ccs::synth

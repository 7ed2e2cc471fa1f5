#include "twinbeam/pgm.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "twinbeam/errors.hpp"

namespace twinbeam {

namespace {

class Tokenizer {
public:
    Tokenizer(std::string_view text, const std::string& source) : text_(text), source_(source) {}

    struct Token {
        std::string_view text;
        std::size_t line;
        std::size_t column;
    };

    bool next(Token& tok) {
        skip_space_and_comments();
        if (pos_ >= text_.size()) return false;
        const std::size_t start = pos_;
        tok.line = line_;
        tok.column = column_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '#')
            advance();
        tok.text = text_.substr(start, pos_ - start);
        return true;
    }

    Token expect(const char* what) {
        Token tok;
        if (!next(tok)) throw ParseError(source_, line_, column_, std::string("unexpected end of file, expected ") + what);
        return tok;
    }

    std::uint64_t expect_integer(const char* what) {
        const Token tok = expect(what);
        std::uint64_t value = 0;
        for (char ch : tok.text) {
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw ParseError(source_, tok.line, tok.column,
                                 std::string("expected ") + what + ", found '" + std::string(tok.text) + "'");
            value = value * 10 + static_cast<std::uint64_t>(ch - '0');
            if (value > std::numeric_limits<std::uint32_t>::max())
                throw ParseError(source_, tok.line, tok.column, std::string(what) + " is too large");
        }
        return value;
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& source() const { return source_; }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            if (text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace

GrayImage parse_pgm(std::string_view text, const std::string& source) {
    Tokenizer tz(text, source);
    const auto magic = tz.expect("magic number P2");
    if (magic.text != "P2")
        throw ParseError(source, magic.line, magic.column, "expected magic number P2, found '" + std::string(magic.text) + "'");

    GrayImage img;
    img.width = tz.expect_integer("width");
    img.height = tz.expect_integer("height");
    if (img.width == 0 || img.height == 0) throw ParseError(source, tz.line(), tz.column(), "image has zero dimensions");
    const std::uint64_t maxval = tz.expect_integer("maximum gray value");
    if (maxval == 0 || maxval > 65535) throw ParseError(source, tz.line(), tz.column(), "maximum gray value must be in 1..65535");
    img.maxval = static_cast<std::uint32_t>(maxval);

    const std::size_t count = img.width * img.height;
    img.pixels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Tokenizer::Token tok;
        if (!tz.next(tok))
            throw ParseError(source, tz.line(), tz.column(),
                             "expected " + std::to_string(count) + " pixels, found " + std::to_string(i));
        std::uint64_t v = 0;
        for (char ch : tok.text) {
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw ParseError(source, tok.line, tok.column, "malformed pixel value '" + std::string(tok.text) + "'");
            v = v * 10 + static_cast<std::uint64_t>(ch - '0');
            if (v > img.maxval) break;
        }
        if (v > img.maxval)
            throw ParseError(source, tok.line, tok.column, "pixel value exceeds maximum gray value");
        img.pixels.push_back(static_cast<std::uint32_t>(v));
    }
    Tokenizer::Token extra;
    if (tz.next(extra)) throw ParseError(source, extra.line, extra.column, "unexpected data after pixel values");
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) { return parse_pgm(read_text_file(path), path.string()); }

std::string format_pgm(const GrayImage& image) {
    if (image.pixels.size() != image.width * image.height) throw ValidationError("pixel count does not match dimensions");
    std::ostringstream out;
    out << "P2\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
    for (std::size_t y = 0; y < image.height; ++y) {
        for (std::size_t x = 0; x < image.width; ++x) {
            if (x) out << ' ';
            out << image.pixels[y * image.width + x];
        }
        out << '\n';
    }
    return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace twinbeam

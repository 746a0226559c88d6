#include "fuzzybin/image.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace fuzzybin {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

BinaryImage::BinaryImage(int w, int h)
    : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

std::size_t BinaryImage::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
}

namespace {

class Netpbm {
public:
    Netpbm(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_ + ": " + what); }

    std::string magic() {
        char m[2] = {0, 0};
        in_.read(m, 2);
        if (!in_ || m[0] != 'P') fail("bad magic number");
        return std::string(m, 2);
    }

    // Header integers, skipping whitespace and '#' comments.
    long header_int() {
        skip_space();
        long v = 0;
        bool any = false;
        while (in_ && std::isdigit(in_.peek())) {
            v = v * 10 + (in_.get() - '0');
            any = true;
            if (v > 1'000'000'000L) fail("header value too large");
        }
        if (!any) fail("malformed header");
        return v;
    }

    // Exactly one whitespace byte separates the header from raster data.
    void end_header() {
        if (!std::isspace(in_.get())) fail("malformed header");
    }

    void skip_space() {
        while (in_) {
            const int ch = in_.peek();
            if (ch == '#') {
                while (in_ && in_.get() != '\n') {}
            } else if (std::isspace(ch)) {
                in_.get();
            } else {
                break;
            }
        }
    }

    int byte() {
        const int ch = in_.get();
        if (ch == std::char_traits<char>::eof()) fail("truncated raster");
        return ch;
    }

    std::istream& stream() { return in_; }

private:
    std::istream& in_;
    std::string source_;
};

void check_dims(Netpbm& p, long w, long h) {
    if (w < 1 || h < 1) p.fail("image dimensions must be positive");
    if (w * h > 100'000'000L) p.fail("image too large");
}

GrayImage read_gray_body(Netpbm& p, bool ascii) {
    const long w = p.header_int();
    const long h = p.header_int();
    check_dims(p, w, h);
    const long maxval = p.header_int();
    if (maxval < 1 || maxval > 65535) p.fail("maxval out of range");
    if (!ascii) p.end_header();
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (auto& px : img.pixels) {
        long v = 0;
        if (ascii) {
            v = p.header_int();
        } else if (maxval < 256) {
            v = p.byte();
        } else {
            v = p.byte() << 8;
            v |= p.byte();
        }
        if (v > maxval) p.fail("sample exceeds maxval");
        px = static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
    }
    return img;
}

BinaryImage read_bit_body(Netpbm& p, bool ascii) {
    const long w = p.header_int();
    const long h = p.header_int();
    check_dims(p, w, h);
    BinaryImage img(static_cast<int>(w), static_cast<int>(h));
    if (ascii) {
        for (auto& b : img.bits) {
            p.skip_space();
            const int ch = p.byte();
            if (ch != '0' && ch != '1') p.fail("bitmap sample must be 0 or 1");
            b = ch == '1';
        }
        return img;
    }
    p.end_header();
    for (int y = 0; y < img.height; ++y) {
        int current = 0;
        for (int x = 0; x < img.width; ++x) {
            if (x % 8 == 0) current = p.byte();
            img.set(x, y, (current >> (7 - x % 8)) & 1);
        }
    }
    return img;
}

}  // namespace

GrayImage read_pgm(std::istream& in, const std::string& source) {
    Netpbm p(in, source);
    const auto magic = p.magic();
    if (magic == "P2") return read_gray_body(p, true);
    if (magic == "P5") return read_gray_body(p, false);
    p.fail("not a PGM file (magic " + magic + ")");
}

BinaryImage read_pbm(std::istream& in, const std::string& source) {
    Netpbm p(in, source);
    const auto magic = p.magic();
    if (magic == "P1") return read_bit_body(p, true);
    if (magic == "P4") return read_bit_body(p, false);
    p.fail("not a PBM file (magic " + magic + ")");
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage g(img.width, img.height);
    for (std::size_t k = 0; k < img.bits.size(); ++k) g.pixels[k] = img.bits[k] ? 0 : 255;
    return g;
}

GrayImage load_gray(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    const int first = in.get();
    const int second = in.get();
    in.seekg(0);
    if (first == 'P' && (second == '1' || second == '4')) return to_gray(read_pbm(in, path.string()));
    return read_pgm(in, path.string());
}

void write_pgm(std::ostream& out, const GrayImage& img) {
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

void write_pbm(std::ostream& out, const BinaryImage& img) {
    out << "P1\n" << img.width << ' ' << img.height << '\n';
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) out << (img.at(x, y) ? '1' : '0') << (x + 1 < img.width ? " " : "");
        out << '\n';
    }
}

}  // namespace fuzzybin

#ifndef FUZZYBIN_IMAGE_HPP
#define FUZZYBIN_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

/// Row-major 8-bit intensities, 0 = black.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255);

    std::uint8_t at(int x, int y) const { return pixels[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels[index(x, y)]; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
};

/// Row-major bits, 1 = ink.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryImage() = default;
    BinaryImage(int w, int h);

    bool at(int x, int y) const { return bits[index(x, y)] != 0; }
    void set(int x, int y, bool v) { bits[index(x, y)] = v ? 1 : 0; }
    /// Out-of-range coordinates read as background.
    bool ink(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height && at(x, y); }
    std::size_t count() const;
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

/// Reads P2/P5 graymaps; maxval other than 255 is rescaled to 0..255.
GrayImage read_pgm(std::istream& in, const std::string& source = "<stream>");
/// Reads P1/P4 bitmaps.
BinaryImage read_pbm(std::istream& in, const std::string& source = "<stream>");
/// Dispatches on the magic number; bitmaps become black-on-white gray images.
GrayImage load_gray(const std::filesystem::path& path);

void write_pgm(std::ostream& out, const GrayImage& img);  // P5
void write_pbm(std::ostream& out, const BinaryImage& img);  // P1

GrayImage to_gray(const BinaryImage& img);

}  // namespace fuzzybin

#endif  // FUZZYBIN_IMAGE_HPP

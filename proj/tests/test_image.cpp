#include "doctest.h"

#include <sstream>

#include "fuzzybin/image.hpp"

using namespace fuzzybin;

TEST_CASE("ASCII graymap with comments") {
    std::istringstream in("P2\n# comment\n3 2\n# another\n255\n0 128 255\n10 20 30\n");
    const auto img = read_pgm(in);
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    CHECK(img.at(1, 0) == 128);
    CHECK(img.at(2, 1) == 30);
}

TEST_CASE("graymap maxval is rescaled") {
    std::istringstream in("P2 2 1 15 0 15");
    const auto img = read_pgm(in);
    CHECK(img.at(0, 0) == 0);
    CHECK(img.at(1, 0) == 255);
}

TEST_CASE("binary graymap round trip") {
    GrayImage g(4, 3);
    for (std::size_t k = 0; k < g.pixels.size(); ++k) g.pixels[k] = static_cast<std::uint8_t>(k * 20);
    std::stringstream buf;
    write_pgm(buf, g);
    const auto back = read_pgm(buf);
    CHECK(back.pixels == g.pixels);
}

TEST_CASE("16-bit binary graymap") {
    std::string data = "P5 2 1 65535\n";
    data += std::string("\xff\xff\x00\x00", 4);
    std::istringstream in(data);
    const auto img = read_pgm(in);
    CHECK(img.at(0, 0) == 255);
    CHECK(img.at(1, 0) == 0);
}

TEST_CASE("bitmaps, ASCII and packed") {
    std::istringstream ascii("P1\n3 2\n1 0 1\n010\n");
    const auto a = read_pbm(ascii);
    CHECK(a.at(0, 0));
    CHECK_FALSE(a.at(1, 0));
    CHECK(a.at(1, 1));
    CHECK(a.count() == 3);

    std::string packed = "P4\n10 1\n";
    packed += std::string("\xA0\x40", 2);  // 1010000001
    std::istringstream raw(packed);
    const auto b = read_pbm(raw);
    CHECK(b.at(0, 0));
    CHECK(b.at(2, 0));
    CHECK(b.at(9, 0));
    CHECK(b.count() == 3);

    const auto g = to_gray(a);
    CHECK(g.at(0, 0) == 0);
    CHECK(g.at(1, 0) == 255);
}

TEST_CASE("malformed inputs") {
    std::istringstream magic("P9\n1 1\n255\n0\n");
    CHECK_THROWS_AS(read_pgm(magic, "x.pgm"), ParseError);
    std::istringstream truncated("P5\n4 4\n255\nab");
    CHECK_THROWS_AS(read_pgm(truncated), ParseError);
    std::istringstream zero("P2\n0 3\n255\n");
    CHECK_THROWS_AS(read_pgm(zero), ParseError);
    std::istringstream over("P2\n1 1\n10\n11\n");
    CHECK_THROWS_AS(read_pgm(over), ParseError);
    std::istringstream pgm_as_pbm("P2\n1 1\n255\n0\n");
    CHECK_THROWS_AS(read_pbm(pgm_as_pbm), ParseError);
}

#include "doctest.h"

#include <random>

#include "fuzzybin/sigfeat.hpp"

using namespace fuzzybin;

namespace {

GrayImage canvas(int w, int h) { return GrayImage(w, h, 255); }

void fill(GrayImage& img, int x0, int y0, int w, int h, std::uint8_t v = 0) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) img.at(x, y) = v;
}

GrayImage plus_sign(int arm, int ox, int oy, int w, int h) {
    auto img = canvas(w, h);
    fill(img, ox, oy + arm, 2 * arm + 1, 1);
    fill(img, ox + arm, oy, 1, 2 * arm + 1);
    return img;
}

// Test-side topology oracle: walks the 8-ring of every skeleton pixel.
void skeleton_oracle(const BinaryImage& s, int& crosses, int& ends, int& pixels) {
    const int dx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    const int dy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    crosses = ends = pixels = 0;
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
            if (!s.at(x, y)) continue;
            ++pixels;
            int ring[8], n = 0, changes = 0;
            for (int k = 0; k < 8; ++k) n += ring[k] = s.ink(x + dx[k], y + dy[k]);
            for (int k = 0; k < 8; ++k) changes += ring[k] != ring[(k + 1) % 8];
            if (changes / 2 >= 3) ++crosses;
            if (n == 1) ++ends;
        }
}

// Random scribble: thick strokes of varying darkness on white.
GrayImage scribble(std::mt19937_64& rng, int w, int h) {
    auto img = canvas(w, h);
    std::uniform_int_distribution<int> px(2, w - 3), py(2, h - 3), dark(0, 90), thick(1, 3);
    for (int s = 0; s < 4; ++s) {
        int x0 = px(rng), y0 = py(rng), x1 = px(rng), y1 = py(rng);
        const int t = thick(rng);
        const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0)) + 1;
        for (int k = 0; k <= steps; ++k) {
            const int x = x0 + (x1 - x0) * k / steps;
            const int y = y0 + (y1 - y0) * k / steps;
            for (int a = 0; a < t; ++a)
                for (int b = 0; b < t; ++b)
                    if (x + a < w && y + b < h) img.at(x + a, y + b) = static_cast<std::uint8_t>(dark(rng));
        }
    }
    return img;
}

GrayImage shifted(const GrayImage& src, int dx, int dy, int w, int h) {
    auto out = canvas(w, h);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) out.at(x + dx, y + dy) = src.at(x, y);
    return out;
}

GrayImage upscale(const GrayImage& src, int k) {
    GrayImage out(src.width * k, src.height * k);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = src.at(x / k, y / k);
    return out;
}

}  // namespace

TEST_CASE("all-white image has no signature") {
    CHECK_THROWS_AS(preprocess(canvas(30, 20)), EmptySignatureError);
}

TEST_CASE("specks smaller than four pixels are removed") {
    auto img = canvas(30, 30);
    img.at(2, 2) = 0;
    fill(img, 10, 10, 1, 3);
    CHECK_THROWS_AS(preprocess(img), EmptySignatureError);
    fill(img, 20, 20, 2, 2);
    const auto sig = preprocess(img);
    CHECK(sig.binary.count() == 4);
    CHECK(sig.bbox == BoundingBox{20, 20, 2, 2});
}

TEST_CASE("solid rectangle") {
    auto img = canvas(40, 30);
    fill(img, 7, 5, 12, 9);
    const auto sig = preprocess(img);
    CHECK(sig.bbox == BoundingBox{7, 5, 12, 9});
    CHECK(sig.binary.count() == 12u * 9u);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) CHECK(sig.binary.at(x, y) == (x >= 7 && x < 19 && y >= 5 && y < 14));
}

TEST_CASE("one-pixel line is already a skeleton") {
    auto img = canvas(40, 10);
    fill(img, 5, 4, 20, 1);
    const auto sig = preprocess(img);
    CHECK(sig.thinned == sig.binary);

    auto diag = canvas(20, 20);
    for (int k = 2; k < 16; ++k) diag.at(k, k) = 0;
    const auto d = preprocess(diag);
    CHECK(d.thinned == d.binary);
}

TEST_CASE("thinning leaves a one-pixel skeleton of a thick bar") {
    auto img = canvas(40, 15);
    fill(img, 5, 4, 25, 5);
    const auto sig = preprocess(img);
    CHECK(sig.thinned.count() < sig.binary.count());
    CHECK(count_components(sig.thinned) == 1);
    for (int x = 0; x < 40; ++x) {
        int column = 0;
        for (int y = 0; y < 15; ++y) column += sig.thinned.at(x, y);
        CHECK(column <= 1);
    }
}

TEST_CASE("solid square features") {
    auto img = canvas(30, 30);
    fill(img, 9, 11, 10, 10);
    const auto f = extract_features(preprocess(img)).values;
    CHECK(f.size() == kSignatureFeatureCount);
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 0.5);
    CHECK(f(2) == 0.5);
    CHECK(f(3) == 1.0);
    CHECK(f(4) == 1.0);
}

TEST_CASE("horizontal line features") {
    auto img = canvas(40, 9);
    fill(img, 10, 4, 20, 1);
    const auto sig = preprocess(img);
    const auto f = extract_features(sig).values;
    CHECK(f(0) == 20.0);
    CHECK(f(4) == 1.0);
    CHECK(f(11) == 0.0);
    CHECK(f(12) == doctest::Approx(2.0 / 20.0).epsilon(1e-15));
    CHECK(f(13) == 0.0);
    int crosses = 0, ends = 0, pixels = 0;
    skeleton_oracle(sig.thinned, crosses, ends, pixels);
    CHECK(crosses == 0);
    CHECK(ends == 2);
    CHECK(pixels == 20);
}

TEST_CASE("plus sign has one cross point and four end points") {
    const auto sig = preprocess(plus_sign(6, 10, 8, 40, 40));
    const auto f = extract_features(sig).values;
    int crosses = 0, ends = 0, pixels = 0;
    skeleton_oracle(sig.thinned, crosses, ends, pixels);
    CHECK(crosses == 1);
    CHECK(ends == 4);
    CHECK(pixels == 25);
    CHECK(f(11) == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
    CHECK(f(12) == doctest::Approx(4.0 / 25.0).epsilon(1e-15));
    CHECK(f(4) == 1.0);
}

TEST_CASE("slope of a rising diagonal is +45 degrees") {
    auto img = canvas(30, 30);
    for (int k = 0; k < 20; ++k) img.at(5 + k, 24 - k) = 0;
    const auto f = extract_features(preprocess(img)).values;
    CHECK(f(13) == doctest::Approx(std::atan(1.0)));
    CHECK(f(14) == 0.0);  // an anti-diagonal stroke misses every main-diagonal cell
}

TEST_CASE("vertical stroke has slope pi/2") {
    auto img = canvas(20, 30);
    fill(img, 8, 3, 1, 20);
    const auto f = extract_features(preprocess(img)).values;
    CHECK(f(13) == doctest::Approx(std::acos(0.0)));
    CHECK(f(0) == doctest::Approx(1.0 / 20.0));
}

TEST_CASE("high-pressure region keeps the darkest ink") {
    auto img = canvas(30, 10);
    fill(img, 2, 2, 10, 3, 0);
    fill(img, 12, 2, 10, 3, 100);
    const auto sig = preprocess(img, 0.5);
    CHECK(sig.hpr.count() == 30);
    const auto f = extract_features(sig).values;
    CHECK(f(10) == 0.5);
    CHECK(f(8) == doctest::Approx(5.0 / 3.0));  // cog x = 5 over height 3
}

TEST_CASE("empty bands produce zeros and a warning") {
    auto img = canvas(30, 10);
    fill(img, 3, 3, 20, 2);  // height 2 < 3 bands
    const auto out = extract_features(preprocess(img));
    CHECK_FALSE(out.warnings.empty());
    CHECK(out.values(kBandFeatureOffset + 2) == 0.0);
    double share = 0;
    for (int b = 0; b < kBandCount; ++b) share += out.values(kBandFeatureOffset + 4 * b + 2);
    CHECK(share == doctest::Approx(1.0));
}

TEST_CASE("features are translation invariant") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 25; ++trial) {
        const auto glyph = scribble(rng, 40, 30);
        const auto a = extract_features(preprocess(shifted(glyph, 3, 5, 80, 60))).values;
        const auto b = extract_features(preprocess(shifted(glyph, 31, 22, 80, 60))).values;
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("integer upscaling keeps aspect ratio and component count") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto glyph = scribble(rng, 30, 24);
        const auto base = extract_features(preprocess(glyph)).values;
        for (int k : {2, 3}) {
            const auto big = extract_features(preprocess(upscale(glyph, k))).values;
            CHECK(big(0) == doctest::Approx(base(0)).epsilon(1e-15));
            CHECK(big(4) == base(4));
        }
    }
}

TEST_CASE("ratio features stay in range") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const auto out = extract_features(preprocess(scribble(rng, 50, 35)));
        const auto& f = out.values;
        CHECK(f.allFinite());
        for (int k : {2, 3, 5, 6, 7, 9, 10, 11, 12, 14}) {
            CHECK(f(k) >= 0.0);
            CHECK(f(k) <= 1.0);
        }
        // x center-of-gravity over height is bounded by width over height instead.
        for (int k : {1, 8}) CHECK(f(k) <= f(0));
        CHECK(std::abs(f(13)) <= std::acos(0.0));
        double share = 0.0;
        for (int b = 0; b < kBandCount; ++b) {
            const int o = kBandFeatureOffset + 4 * b;
            for (int k : {o + 1, o + 2, o + 3}) {
                CHECK(f(k) >= 0.0);
                CHECK(f(k) <= 1.0);
            }
            share += f(o + 2);
        }
        CHECK(std::abs(share - 1.0) <= 1e-12);
    }
}

TEST_CASE("otsu threshold separates two levels") {
    auto img = canvas(10, 10);
    fill(img, 0, 0, 5, 10, 40);
    const int t = otsu_threshold(img);
    CHECK(t >= 40);
    CHECK(t < 255);
    CHECK(otsu_threshold(canvas(4, 4)) == 127);
}

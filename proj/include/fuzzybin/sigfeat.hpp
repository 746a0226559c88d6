#ifndef FUZZYBIN_SIGFEAT_HPP
#define FUZZYBIN_SIGFEAT_HPP

#include <string>
#include <vector>

#include "fuzzybin/core.hpp"
#include "fuzzybin/image.hpp"

namespace fuzzybin {

/// Offline-signature feature extraction: 27 global and local shape
/// descriptors, all expressed relative to the ink bounding box.
///
/// Layout of the feature vector (0-based):
///   0      width / height
///   1, 2   ink center of gravity x, y over height
///   3      ink pixels / box area
///   4      8-connected component count
///   5      baseline over height
///   6, 7   upper and lower extension over height
///   8, 9   high-pressure-region center of gravity x, y over height
///   10     high-pressure pixels / ink pixels
///   11     skeleton cross points / skeleton pixels
///   12     skeleton end points / skeleton pixels
///   13     skeleton slope angle in radians
///   14     skeleton pixels on the box diagonal / skeleton pixels
///   15..26 per horizontal band, top to bottom:
///          cog x / band height, cog y / band height, band ink share,
///          band baseline / band height
inline constexpr int kSignatureFeatureCount = 27;
inline constexpr int kBandCount = 3;
inline constexpr int kBandFeatureOffset = 15;

class EmptySignatureError : public Error {
public:
    using Error::Error;
};

struct BoundingBox {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct PreprocessedSignature {
    BinaryImage binary;   // thresholded, small specks removed
    BinaryImage thinned;  // skeleton of binary
    BinaryImage hpr;      // darkest fraction of the ink
    BoundingBox bbox;
};

struct SignatureFeatures {
    FeatureVector values;
    std::vector<std::string> warnings;  // one entry per guarded zero denominator
};

/// Global threshold maximizing between-class variance; ink is gray <= threshold.
/// A single-valued histogram falls back to 127.
int otsu_threshold(const GrayImage& img);

BinaryImage binarize(const GrayImage& img, int threshold);

/// Per-pixel 8-connected component labels (-1 for background); returns the count.
int label_components(const BinaryImage& img, std::vector<int>& labels);
int count_components(const BinaryImage& img);

/// Drops 8-connected components with fewer than `min_area` pixels.
BinaryImage remove_small_components(const BinaryImage& img, int min_area = 4);

/// Zhang-Suen two-subiteration thinning.
BinaryImage thin(const BinaryImage& img);

/// Throws EmptySignatureError on an image with no ink.
BoundingBox bounding_box(const BinaryImage& img);

/// Number of black 8-neighbors.
int ink_neighbors(const BinaryImage& img, int x, int y);
/// Half the number of ink/background transitions around the 8-ring.
int crossing_number(const BinaryImage& img, int x, int y);

PreprocessedSignature preprocess(const GrayImage& img, double hpr_fraction = 0.75);

SignatureFeatures extract_features(const BinaryImage& binary, const BinaryImage& thinned,
                                   const BinaryImage& hpr, const BoundingBox& bbox);
SignatureFeatures extract_features(const PreprocessedSignature& sig);

}  // namespace fuzzybin

#endif  // FUZZYBIN_SIGFEAT_HPP

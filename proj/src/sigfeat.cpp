#include "fuzzybin/sigfeat.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace fuzzybin {

namespace {

// 8-ring in clockwise order starting north: P2..P9 of the usual thinning notation.
constexpr std::array<int, 8> kRingDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kRingDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> ring(const BinaryImage& img, int x, int y) {
    std::array<int, 8> p{};
    for (int k = 0; k < 8; ++k) p[k] = img.ink(x + kRingDx[k], y + kRingDy[k]) ? 1 : 0;
    return p;
}

int transitions01(const std::array<int, 8>& p) {
    int a = 0;
    for (int k = 0; k < 8; ++k) a += p[k] == 0 && p[(k + 1) % 8] == 1;
    return a;
}

struct Moments {
    double count = 0.0;
    double sum_x = 0.0;
    double sum_y = 0.0;
};

double ratio(double num, double den, const char* what, std::vector<std::string>& warnings) {
    if (den == 0.0) {
        warnings.emplace_back(what);
        return 0.0;
    }
    return num / den;
}

}  // namespace

int otsu_threshold(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (auto px : img.pixels) hist[px] += 1.0;
    const double total = static_cast<double>(img.pixels.size());
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += v * hist[v];

    double weight_bg = 0.0;
    double sum_bg = 0.0;
    double best_var = 0.0;
    int best = -1;
    for (int t = 0; t < 255; ++t) {
        weight_bg += hist[t];
        sum_bg += t * hist[t];
        const double weight_fg = total - weight_bg;
        if (weight_bg == 0.0 || weight_fg == 0.0) continue;
        const double mean_bg = sum_bg / weight_bg;
        const double mean_fg = (sum_all - sum_bg) / weight_fg;
        const double between = weight_bg * weight_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
        if (between > best_var) {
            best_var = between;
            best = t;
        }
    }
    return best < 0 ? 127 : best;
}

BinaryImage binarize(const GrayImage& img, int threshold) {
    BinaryImage out(img.width, img.height);
    for (std::size_t k = 0; k < img.pixels.size(); ++k) out.bits[k] = img.pixels[k] <= threshold;
    return out;
}

int label_components(const BinaryImage& img, std::vector<int>& labels) {
    labels.assign(img.bits.size(), -1);
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y) || labels[img.index(x, y)] >= 0) continue;
            labels[img.index(x, y)] = next;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + kRingDx[k];
                    const int ny = cy + kRingDy[k];
                    if (!img.ink(nx, ny) || labels[img.index(nx, ny)] >= 0) continue;
                    labels[img.index(nx, ny)] = next;
                    stack.emplace_back(nx, ny);
                }
            }
            ++next;
        }
    }
    return next;
}

int count_components(const BinaryImage& img) {
    std::vector<int> labels;
    return label_components(img, labels);
}

BinaryImage remove_small_components(const BinaryImage& img, int min_area) {
    std::vector<int> labels;
    const int n = label_components(img, labels);
    std::vector<int> area(static_cast<std::size_t>(n), 0);
    for (int l : labels) {
        if (l >= 0) ++area[static_cast<std::size_t>(l)];
    }
    BinaryImage out(img.width, img.height);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        out.bits[k] = labels[k] >= 0 && area[static_cast<std::size_t>(labels[k])] >= min_area;
    }
    return out;
}

BinaryImage thin(const BinaryImage& img) {
    BinaryImage out = img;
    std::vector<std::size_t> doomed;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            doomed.clear();
            for (int y = 0; y < out.height; ++y) {
                for (int x = 0; x < out.width; ++x) {
                    if (!out.at(x, y)) continue;
                    const auto p = ring(out, x, y);
                    const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
                    if (b < 2 || b > 6 || transitions01(p) != 1) continue;
                    // p[0]=N, p[2]=E, p[4]=S, p[6]=W
                    const bool keep = pass == 0 ? (p[0] * p[2] * p[4] != 0 || p[2] * p[4] * p[6] != 0)
                                                : (p[0] * p[2] * p[6] != 0 || p[0] * p[4] * p[6] != 0);
                    if (!keep) doomed.push_back(out.index(x, y));
                }
            }
            for (auto k : doomed) out.bits[k] = 0;
            changed = changed || !doomed.empty();
        }
    }
    return out;
}

BoundingBox bounding_box(const BinaryImage& img) {
    int left = img.width, top = img.height, right = -1, bottom = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y)) continue;
            left = std::min(left, x);
            right = std::max(right, x);
            top = std::min(top, y);
            bottom = std::max(bottom, y);
        }
    }
    if (right < 0) throw EmptySignatureError("no ink pixels in signature image");
    return {left, top, right - left + 1, bottom - top + 1};
}

int ink_neighbors(const BinaryImage& img, int x, int y) {
    const auto p = ring(img, x, y);
    return p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
}

int crossing_number(const BinaryImage& img, int x, int y) {
    const auto p = ring(img, x, y);
    int changes = 0;
    for (int k = 0; k < 8; ++k) changes += p[k] != p[(k + 1) % 8];
    return changes / 2;
}

PreprocessedSignature preprocess(const GrayImage& img, double hpr_fraction) {
    if (img.width < 1 || img.height < 1) throw UsageError("preprocess: empty image");
    if (!(hpr_fraction > 0.0 && hpr_fraction < 1.0)) throw UsageError("hpr_fraction must lie in (0, 1)");

    PreprocessedSignature sig;
    sig.binary = remove_small_components(binarize(img, otsu_threshold(img)));
    sig.bbox = bounding_box(sig.binary);
    sig.thinned = thin(sig.binary);

    int lo = 255, hi = 0;
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        if (!sig.binary.bits[k]) continue;
        lo = std::min<int>(lo, img.pixels[k]);
        hi = std::max<int>(hi, img.pixels[k]);
    }
    const double cutoff = lo + hpr_fraction * (hi - lo);
    sig.hpr = BinaryImage(img.width, img.height);
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        sig.hpr.bits[k] = sig.binary.bits[k] && img.pixels[k] <= cutoff;
    }
    return sig;
}

SignatureFeatures extract_features(const BinaryImage& binary, const BinaryImage& thinned,
                                   const BinaryImage& hpr, const BoundingBox& bbox) {
    if (bbox.width < 1 || bbox.height < 1) throw EmptySignatureError("empty bounding box");
    SignatureFeatures out;
    auto& w = out.warnings;
    auto& f = out.values;
    f = FeatureVector::Zero(kSignatureFeatureCount);

    const double height = bbox.height;
    const double width = bbox.width;

    // Moments over bbox-relative pixel centers, restricted to rows [row0, row1).
    auto moments = [&](const BinaryImage& img, int row0, int row1) {
        Moments m;
        for (int y = row0; y < row1; ++y) {
            for (int x = 0; x < bbox.width; ++x) {
                if (!img.ink(bbox.left + x, bbox.top + y)) continue;
                m.count += 1.0;
                m.sum_x += x + 0.5;
                m.sum_y += (y - row0) + 0.5;
            }
        }
        return m;
    };
    // Row with the largest ink count in [row0, row1), lowest row on ties; -1 if empty.
    auto baseline_row = [&](int row0, int row1) {
        int best = -1, best_count = 0;
        for (int y = row0; y < row1; ++y) {
            int count = 0;
            for (int x = 0; x < bbox.width; ++x) count += binary.ink(bbox.left + x, bbox.top + y);
            if (count > best_count) {
                best_count = count;
                best = y;
            }
        }
        return best;
    };

    const Moments ink = moments(binary, 0, bbox.height);
    f(0) = width / height;
    f(1) = ratio(ink.sum_x, ink.count, "no ink", w) / height;
    f(2) = ratio(ink.sum_y, ink.count, "no ink", w) / height;
    f(3) = ink.count / (width * height);
    f(4) = count_components(binary);

    const int base = baseline_row(0, bbox.height);
    if (base >= 0) {
        const double base_pos = base + 0.5;
        f(5) = base_pos / height;
        f(6) = base_pos / height;
        f(7) = (height - base_pos) / height;
    }

    const Moments pressure = moments(hpr, 0, bbox.height);
    f(8) = ratio(pressure.sum_x, pressure.count, "empty high-pressure region", w) / height;
    f(9) = ratio(pressure.sum_y, pressure.count, "empty high-pressure region", w) / height;
    f(10) = ratio(pressure.count, ink.count, "no ink", w);

    // Skeleton topology, slope and diagonal trace.
    double skeleton = 0.0, crosses = 0.0, ends = 0.0, on_diagonal = 0.0;
    double sx = 0.0, sy = 0.0;
    for (int y = 0; y < bbox.height; ++y) {
        for (int x = 0; x < bbox.width; ++x) {
            const int gx = bbox.left + x;
            const int gy = bbox.top + y;
            if (!thinned.ink(gx, gy)) continue;
            skeleton += 1.0;
            sx += x + 0.5;
            sy += -(y + 0.5);
            if (crossing_number(thinned, gx, gy) >= 3) crosses += 1.0;
            if (ink_neighbors(thinned, gx, gy) == 1) ends += 1.0;
            const long long lx = x, ly = y, lw = bbox.width, lh = bbox.height;
            if (lx * lh < (ly + 1) * lw && ly * lw < (lx + 1) * lh) on_diagonal += 1.0;
        }
    }
    f(11) = ratio(crosses, skeleton, "empty skeleton", w);
    f(12) = ratio(ends, skeleton, "empty skeleton", w);
    f(14) = ratio(on_diagonal, skeleton, "empty skeleton", w);
    if (skeleton > 0.0) {
        const double mx = sx / skeleton;
        const double my = sy / skeleton;
        double sxx = 0.0, sxy = 0.0;
        for (int y = 0; y < bbox.height; ++y) {
            for (int x = 0; x < bbox.width; ++x) {
                if (!thinned.ink(bbox.left + x, bbox.top + y)) continue;
                const double dx = (x + 0.5) - mx;
                const double dy = -(y + 0.5) - my;
                sxx += dx * dx;
                sxy += dx * dy;
            }
        }
        f(13) = sxx == 0.0 ? std::numbers::pi / 2 : std::atan(sxy / sxx) + 0.0;
    }

    for (int band = 0; band < kBandCount; ++band) {
        const int row0 = band * bbox.height / kBandCount;
        const int row1 = (band + 1) * bbox.height / kBandCount;
        const int offset = kBandFeatureOffset + 4 * band;
        const Moments m = moments(binary, row0, row1);
        if (m.count == 0.0) {
            w.push_back("empty band " + std::to_string(band));
            continue;
        }
        const double band_height = row1 - row0;
        f(offset) = m.sum_x / m.count / band_height;
        f(offset + 1) = m.sum_y / m.count / band_height;
        f(offset + 2) = m.count / ink.count;
        f(offset + 3) = (baseline_row(row0, row1) - row0 + 0.5) / band_height;
    }
    return out;
}

SignatureFeatures extract_features(const PreprocessedSignature& sig) {
    return extract_features(sig.binary, sig.thinned, sig.hpr, sig.bbox);
}

}  // namespace fuzzybin

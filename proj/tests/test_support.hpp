// Helpers shared by the unit and acceptance tests. Nothing here calls into the
// clustering code; the oracles are deliberately written from scratch.
#ifndef FUZZYBIN_TEST_SUPPORT_HPP
#define FUZZYBIN_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing {

using Mat = Eigen::MatrixXd;

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0,
                         double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

/// Rows drawn around `centers` with isotropic Gaussian noise; labels[i] is the blob of row i.
inline Mat gaussian_blobs(std::mt19937_64& rng, const Mat& centers, int per_blob, double stddev,
                          std::vector<int>& labels) {
    std::normal_distribution<double> n(0.0, stddev);
    Mat x(centers.rows() * per_blob, centers.cols());
    labels.clear();
    for (Eigen::Index b = 0; b < centers.rows(); ++b) {
        for (int k = 0; k < per_blob; ++k) {
            const auto row = b * per_blob + k;
            for (Eigen::Index d = 0; d < centers.cols(); ++d) x(row, d) = centers(b, d) + n(rng);
            labels.push_back(static_cast<int>(b));
        }
    }
    return x;
}

/// Within-cluster sum of squares of a labeling, centers at the label means.
inline double labeling_sse(const Mat& x, const std::vector<int>& labels, int c) {
    double sse = 0.0;
    for (int j = 0; j < c; ++j) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
        int n = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == j) {
                mean += x.row(i);
                ++n;
            }
        }
        if (n == 0) continue;
        mean /= n;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == j) sse += (x.row(i) - mean).squaredNorm();
        }
    }
    return sse;
}

/// Exhaustive search over all c^N labelings for the minimum SSE.
inline double brute_force_sse(const Mat& x, int c, std::vector<int>* best_labels = nullptr) {
    const auto n = static_cast<int>(x.rows());
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        const double sse = labeling_sse(x, labels, c);
        if (sse < best) {
            best = sse;
            if (best_labels) *best_labels = labels;
        }
        int k = 0;
        while (k < n && ++labels[static_cast<std::size_t>(k)] == c) labels[static_cast<std::size_t>(k++)] = 0;
        if (k == n) break;
    }
    return best;
}

/// True when two labelings induce the same partition (labels may be permuted).
template <typename A, typename B>
bool same_partition(const std::vector<A>& a, const std::vector<B>& b) {
    if (a.size() != b.size()) return false;
    std::map<A, B> fwd;
    std::map<B, A> back;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [f, f_new] = fwd.emplace(a[i], b[i]);
        auto [r, r_new] = back.emplace(b[i], a[i]);
        if (f->second != b[i] || r->second != a[i]) return false;
    }
    return true;
}

/// Fraction of points on which two labelings agree under the best label permutation.
template <typename A, typename B>
double agreement_up_to_permutation(const std::vector<A>& a, const std::vector<B>& b, int c) {
    std::vector<int> perm(static_cast<std::size_t>(c));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t agree = 0;
        for (std::size_t i = 0; i < a.size(); ++i) agree += perm[static_cast<std::size_t>(a[i])] == static_cast<int>(b[i]);
        best = std::max(best, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(a.size());
}

/// Average ranks (1-based) with ties sharing the mean rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i + j) / 2.0) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
        i = j + 1;
    }
    return r;
}

/// Spearman rank correlation: Pearson correlation of average ranks. NaN if either side is constant.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

/// Random point on the probability simplex (normalized exponentials).
inline Eigen::RowVectorXd random_simplex_point(std::mt19937_64& rng, Eigen::Index c) {
    std::exponential_distribution<double> e(1.0);
    Eigen::RowVectorXd v(c);
    for (Eigen::Index j = 0; j < c; ++j) v(j) = e(rng);
    return v / v.sum();
}

/// Direct evaluation of sum_i sum_j U_ij^m ||x_i - c_j||^2 with plain loops.
inline double reference_objective(const Mat& u, const Mat& x, const Mat& centers, double m) {
    double j = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index k = 0; k < centers.rows(); ++k) {
            double d2 = 0.0;
            for (Eigen::Index d = 0; d < x.cols(); ++d) d2 += (x(i, d) - centers(k, d)) * (x(i, d) - centers(k, d));
            j += std::pow(u(i, k), m) * d2;
        }
    return j;
}

}  // namespace testing

#endif  // FUZZYBIN_TEST_SUPPORT_HPP

#ifndef FUZZYBIN_KMEANS_HPP
#define FUZZYBIN_KMEANS_HPP

#include <numeric>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

template <typename Scalar>
struct KMeansResult {
    ClusterModel<Scalar> model;  // fuzzifier recorded as 1
    std::vector<Index> assignments;
    std::vector<Scalar> sse_per_iteration;
};

/// Nearest center by squared distance, lowest index on ties.
template <typename DerivedQ, typename Scalar>
Index nearest_center(const Eigen::MatrixBase<DerivedQ>& q, const Matrix<Scalar>& centers) {
    Index best = 0;
    Scalar best_d2 = squared_distance(q, centers.row(0));
    for (Index j = 1; j < centers.rows(); ++j) {
        const Scalar d2 = squared_distance(q, centers.row(j));
        if (d2 < best_d2) {
            best_d2 = d2;
            best = j;
        }
    }
    return best;
}

template <typename Scalar>
Index kmeans_assign(const Vector<Scalar>& q, const ClusterModel<Scalar>& model) {
    return nearest_center(q.transpose(), model.centers);
}

/// Within-cluster sum of squared distances for crisp labels.
template <typename Scalar>
Scalar crisp_sse(const Matrix<Scalar>& x, const Matrix<Scalar>& centers,
                 const std::vector<Index>& labels) {
    Scalar sse(0);
    for (Index i = 0; i < x.rows(); ++i) {
        sse += squared_distance(x.row(i), centers.row(labels[static_cast<std::size_t>(i)]));
    }
    return sse;
}

namespace detail {

template <typename Scalar>
std::vector<Index> assign_all(const Matrix<Scalar>& x, const Matrix<Scalar>& centers) {
    std::vector<Index> labels(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) labels[static_cast<std::size_t>(i)] = nearest_center(x.row(i), centers);
    return labels;
}

/// Means of the assigned points. An empty cluster is moved onto the point
/// farthest from its current center (lowest index on ties), which then joins it.
template <typename Scalar>
Matrix<Scalar> recompute_means(const Matrix<Scalar>& x, std::vector<Index>& labels, Index c) {
    Matrix<Scalar> centers = Matrix<Scalar>::Zero(c, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(c), 0);
    for (Index i = 0; i < x.rows(); ++i) {
        const Index j = labels[static_cast<std::size_t>(i)];
        centers.row(j) += x.row(i);
        ++counts[static_cast<std::size_t>(j)];
    }
    for (Index j = 0; j < c; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) centers.row(j) /= static_cast<Scalar>(counts[static_cast<std::size_t>(j)]);
    }
    for (Index j = 0; j < c; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) continue;
        Index far = -1;
        Scalar far_d2(-1);
        for (Index i = 0; i < x.rows(); ++i) {
            const Index owner = labels[static_cast<std::size_t>(i)];
            if (counts[static_cast<std::size_t>(owner)] < 2) continue;
            const Scalar d2 = squared_distance(x.row(i), centers.row(owner));
            if (d2 > far_d2) {
                far_d2 = d2;
                far = i;
            }
        }
        if (far < 0) continue;  // unreachable while c <= N
        const Index donor = labels[static_cast<std::size_t>(far)];
        auto& donor_count = counts[static_cast<std::size_t>(donor)];
        centers.row(donor) = (centers.row(donor) * static_cast<Scalar>(donor_count) - x.row(far)) /
                             static_cast<Scalar>(donor_count - 1);
        --donor_count;
        labels[static_cast<std::size_t>(far)] = j;
        counts[static_cast<std::size_t>(j)] = 1;
        centers.row(j) = x.row(far);
    }
    return centers;
}

}  // namespace detail

/// Lloyd iteration from c distinct data points drawn by `seed`.
template <typename Scalar>
KMeansResult<Scalar> kmeans_train(const Matrix<Scalar>& x, Index c, std::uint64_t seed,
                                  int max_iterations = 300) {
    const Index n = x.rows();
    if (c < 1) throw UsageError("kmeans: need at least one cluster");
    if (c > n) {
        throw UsageError("more clusters (" + std::to_string(c) + ") than data points (" +
                         std::to_string(n) + ")");
    }
    if (max_iterations < 1) throw UsageError("max_iterations must be >= 1");

    // Partial Fisher-Yates over indices; integer draws avoid distribution portability issues.
    std::mt19937_64 rng(seed);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    Matrix<Scalar> centers(c, x.cols());
    for (Index j = 0; j < c; ++j) {
        const auto remaining = static_cast<std::uint64_t>(n - j);
        const auto pick = j + static_cast<Index>(rng() % remaining);
        std::swap(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(pick)]);
        centers.row(j) = x.row(order[static_cast<std::size_t>(j)]);
    }

    KMeansResult<Scalar> result;
    std::vector<Index> labels = detail::assign_all(x, centers);
    result.sse_per_iteration.push_back(crisp_sse(x, centers, labels));
    int iteration = 0;
    while (iteration < max_iterations) {
        ++iteration;
        centers = detail::recompute_means(x, labels, c);
        std::vector<Index> next = detail::assign_all(x, centers);
        const bool stable = next == labels;
        labels = std::move(next);
        result.sse_per_iteration.push_back(crisp_sse(x, centers, labels));
        if (stable) break;
    }

    auto& model = result.model;
    model.centers = std::move(centers);
    model.fuzzifier = Scalar(1);
    model.max_iterations = max_iterations;
    model.final_objective = result.sse_per_iteration.back();
    model.iterations_run = iteration;
    model.seed = seed;
    result.assignments = std::move(labels);
    return result;
}

}  // namespace fuzzybin

#endif  // FUZZYBIN_KMEANS_HPP

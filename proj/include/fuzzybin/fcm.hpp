#ifndef FUZZYBIN_FCM_HPP
#define FUZZYBIN_FCM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

template <typename Scalar>
struct FcmTrace {
    std::vector<Scalar> objective_per_iteration;
    std::vector<Scalar> delta_per_iteration;  // max |U_new - U_old|
};

template <typename Scalar>
struct FcmOptions {
    Index clusters = 2;
    Scalar fuzzifier = Scalar(2);
    Scalar epsilon = Scalar(1e-5);
    int max_iterations = 300;
    std::uint64_t seed = 0;
};

template <typename Scalar>
struct FcmResult {
    ClusterModel<Scalar> model;
    PartitionMatrix<Scalar> memberships;
    FcmTrace<Scalar> trace;
};

/// Called after every membership update with (iteration, U, centers).
template <typename Scalar>
using FcmObserver =
    std::function<void(int, const PartitionMatrix<Scalar>&, const Matrix<Scalar>&)>;

namespace detail {

/// Compensated (Neumaier) accumulator; keeps long objective sums stable.
template <typename Scalar>
struct CompensatedSum {
    Scalar sum = Scalar(0);
    Scalar carry = Scalar(0);
    void add(Scalar v) {
        const Scalar t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    Scalar value() const { return sum + carry; }
};

/// N x c matrix of squared distances between data rows and center rows.
template <typename Scalar>
Matrix<Scalar> squared_distances(const Matrix<Scalar>& x, const Matrix<Scalar>& centers) {
    if (x.cols() != centers.cols()) {
        throw UsageError("dimension mismatch: data has " + std::to_string(x.cols()) +
                         ", centers have " + std::to_string(centers.cols()));
    }
    Matrix<Scalar> d2(x.rows(), centers.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < centers.rows(); ++j) {
            d2(i, j) = squared_distance(x.row(i), centers.row(j));
        }
    }
    return d2;
}

/// Membership grades for one point from its squared distances to every center.
/// Algebraically identical to 1 / sum_k (d_j/d_k)^(2/(m-1)); scaled by the nearest
/// distance so no term overflows. Zero distances split the grade uniformly.
template <typename DerivedIn, typename DerivedOut>
void membership_row(const Eigen::MatrixBase<DerivedIn>& d2, typename DerivedIn::Scalar m,
                    Eigen::MatrixBase<DerivedOut>& out) {
    using Scalar = typename DerivedIn::Scalar;
    const Index c = d2.size();
    Index zeros = 0;
    Scalar nearest = d2.coeff(0);
    for (Index k = 0; k < c; ++k) {
        if (d2.coeff(k) == Scalar(0)) ++zeros;
        nearest = std::min(nearest, d2.coeff(k));
    }
    if (zeros > 0) {
        const Scalar share = Scalar(1) / static_cast<Scalar>(zeros);
        for (Index k = 0; k < c; ++k) out.coeffRef(k) = d2.coeff(k) == Scalar(0) ? share : Scalar(0);
        return;
    }
    const Scalar exponent = Scalar(1) / (m - Scalar(1));
    Scalar total(0);
    for (Index k = 0; k < c; ++k) {
        const Scalar w = std::pow(nearest / d2.coeff(k), exponent);
        out.coeffRef(k) = w;
        total += w;
    }
    for (Index k = 0; k < c; ++k) out.coeffRef(k) /= total;
}

template <typename Scalar>
void check_fuzzifier(Scalar m) {
    if (!(m > Scalar(1)) || !std::isfinite(static_cast<double>(m))) {
        throw UsageError("fuzzifier must be finite and > 1, got " + std::to_string(static_cast<double>(m)));
    }
}

}  // namespace detail

/// Random row-stochastic start: uniform draws in (0,1] normalized per row.
template <typename Scalar = double>
PartitionMatrix<Scalar> init_partition(Index n, Index c, std::uint64_t seed) {
    if (n < 1 || c < 1) throw UsageError("init_partition: need n >= 1 and c >= 1");
    if (c > n) {
        throw UsageError("more clusters (" + std::to_string(c) + ") than data points (" +
                         std::to_string(n) + ")");
    }
    std::mt19937_64 rng(seed);
    PartitionMatrix<Scalar> u(n, c);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < c; ++j) u(i, j) = static_cast<Scalar>(unit_draw(rng));
        u.row(i) /= u.row(i).sum();
    }
    return u;
}

/// Fuzzy centers: c_j = sum_i U_ij^m x_i / sum_i U_ij^m. Returns c x M.
template <typename Scalar>
Matrix<Scalar> compute_centers(const PartitionMatrix<Scalar>& u, const Matrix<Scalar>& x, Scalar m) {
    if (u.rows() != x.rows()) {
        throw UsageError("partition has " + std::to_string(u.rows()) + " rows, data has " +
                         std::to_string(x.rows()));
    }
    if (!(m >= Scalar(1))) throw UsageError("fuzzifier must be >= 1");
    const Matrix<Scalar> weights = u.array().pow(m).matrix();
    Matrix<Scalar> centers(u.cols(), x.cols());
    for (Index j = 0; j < u.cols(); ++j) {
        const Scalar mass = weights.col(j).sum();
        if (!(mass > Scalar(0))) throw DegenerateClusterError(j);
        centers.row(j) = (weights.col(j).transpose() * x) / mass;
    }
    return centers;
}

/// J_m = sum_i sum_j U_ij^m ||x_i - c_j||^2.
template <typename Scalar>
Scalar objective(const PartitionMatrix<Scalar>& u, const Matrix<Scalar>& x,
                 const Matrix<Scalar>& centers, Scalar m) {
    if (u.rows() != x.rows() || u.cols() != centers.rows()) {
        throw UsageError("objective: partition shape does not match data and centers");
    }
    const Matrix<Scalar> d2 = detail::squared_distances(x, centers);
    detail::CompensatedSum<Scalar> acc;
    for (Index i = 0; i < u.rows(); ++i) {
        for (Index j = 0; j < u.cols(); ++j) acc.add(std::pow(u(i, j), m) * d2(i, j));
    }
    return acc.value();
}

/// Membership update for fixed centers. Requires m > 1.
template <typename Scalar>
PartitionMatrix<Scalar> update_memberships(const Matrix<Scalar>& x, const Matrix<Scalar>& centers,
                                           Scalar m) {
    detail::check_fuzzifier(m);
    const Matrix<Scalar> d2 = detail::squared_distances(x, centers);
    PartitionMatrix<Scalar> u(x.rows(), centers.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        auto row = u.row(i);
        detail::membership_row(d2.row(i), m, row);
    }
    return u;
}

/// Index of the largest grade per row, lowest index on ties.
template <typename Scalar>
std::vector<Index> hard_assign(const PartitionMatrix<Scalar>& u) {
    std::vector<Index> labels(static_cast<std::size_t>(u.rows()));
    for (Index i = 0; i < u.rows(); ++i) {
        Index best = 0;
        for (Index j = 1; j < u.cols(); ++j) {
            if (u(i, j) > u(i, best)) best = j;
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

/// Alternates center computation and membership update until the largest
/// membership change is <= epsilon or max_iterations updates have run.
template <typename Scalar>
FcmResult<Scalar> fcm_train(const Matrix<Scalar>& x, const FcmOptions<Scalar>& options,
                            const FcmObserver<Scalar>& observer = {}) {
    detail::check_fuzzifier(options.fuzzifier);
    if (!(options.epsilon > Scalar(0) && options.epsilon < Scalar(1))) {
        throw UsageError("epsilon must lie in (0, 1)");
    }
    if (options.max_iterations < 1) throw UsageError("max_iterations must be >= 1");
    if (x.rows() < 1 || x.cols() < 1) throw UsageError("fcm_train: empty data");
    if (!x.allFinite()) throw UsageError("fcm_train: data contains non-finite values");

    const Scalar m = options.fuzzifier;
    FcmResult<Scalar> result;
    PartitionMatrix<Scalar> u = init_partition<Scalar>(x.rows(), options.clusters, options.seed);
    if (observer) observer(0, u, Matrix<Scalar>());

    Matrix<Scalar> centers;
    int iteration = 0;
    while (iteration < options.max_iterations) {
        ++iteration;
        centers = compute_centers(u, x, m);
        PartitionMatrix<Scalar> next = update_memberships(x, centers, m);
        const Scalar delta = (next - u).cwiseAbs().maxCoeff();
        u = std::move(next);
        result.trace.objective_per_iteration.push_back(objective(u, x, centers, m));
        result.trace.delta_per_iteration.push_back(delta);
        if (observer) observer(iteration, u, centers);
        if (delta <= options.epsilon) break;
    }

    auto& model = result.model;
    model.centers = std::move(centers);
    model.fuzzifier = m;
    model.epsilon = options.epsilon;
    model.max_iterations = options.max_iterations;
    model.final_objective = result.trace.objective_per_iteration.back();
    model.iterations_run = iteration;
    model.seed = options.seed;
    result.memberships = std::move(u);
    return result;
}

template <typename Scalar>
FcmResult<Scalar> fcm_train(const LabeledDataset<Scalar>& data, const FcmOptions<Scalar>& options,
                            const FcmObserver<Scalar>& observer = {}) {
    return fcm_train(data.vectors, options, observer);
}

}  // namespace fuzzybin

#endif  // FUZZYBIN_FCM_HPP

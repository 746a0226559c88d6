#ifndef FUZZYBIN_IDENTIFY_HPP
#define FUZZYBIN_IDENTIFY_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"
#include "fuzzybin/fcm.hpp"

namespace fuzzybin {

template <typename Scalar>
struct IdentificationResult {
    std::vector<Index> ranked_clusters;
    Vector<Scalar> query_memberships;
    Index candidate_count = 0;
    std::optional<std::string> best_identity;
    std::optional<Index> best_template;  // row in the enrolled dataset
    Scalar best_distance = Scalar(0);
};

namespace detail {

template <typename Scalar>
void check_query(const Vector<Scalar>& q, const ClusterModel<Scalar>& model) {
    if (q.size() != model.dim()) {
        throw UsageError("query has dimension " + std::to_string(q.size()) + ", model has " +
                         std::to_string(model.dim()));
    }
}

template <typename Scalar>
Vector<Scalar> query_squared_distances(const Vector<Scalar>& q, const ClusterModel<Scalar>& model) {
    check_query(q, model);
    Vector<Scalar> d2(model.clusters());
    for (Index j = 0; j < model.clusters(); ++j) d2(j) = squared_distance(q.transpose(), model.centers.row(j));
    return d2;
}

/// Indices sorted by `key` under `before`, stable so ties keep the lower index first.
template <typename Scalar, typename Compare>
std::vector<Index> top_indices(const Vector<Scalar>& key, Index t, Compare before) {
    if (t < 1 || t > key.size()) {
        throw UsageError("top-t must be in [1, " + std::to_string(key.size()) + "], got " +
                         std::to_string(t));
    }
    std::vector<Index> order(static_cast<std::size_t>(key.size()));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return before(key(a), key(b)); });
    order.resize(static_cast<std::size_t>(t));
    return order;
}

}  // namespace detail

/// Euclidean distance from the query to every center.
template <typename Scalar>
Vector<Scalar> query_distances(const Vector<Scalar>& q, const ClusterModel<Scalar>& model) {
    return detail::query_squared_distances(q, model).cwiseSqrt();
}

/// Membership grades of a query against frozen centers. With the centers fixed
/// the membership update is its own fixed point, so one update is the converged
/// answer. Crisp models give a one-hot vector on the nearest center.
template <typename Scalar>
Vector<Scalar> query_memberships(const Vector<Scalar>& q, const ClusterModel<Scalar>& model) {
    const Vector<Scalar> d2 = detail::query_squared_distances(q, model);
    Vector<Scalar> grades(model.clusters());
    if (model.crisp()) {
        Index best = 0;
        for (Index j = 1; j < d2.size(); ++j) {
            if (d2(j) < d2(best)) best = j;
        }
        grades.setZero();
        grades(best) = Scalar(1);
        return grades;
    }
    detail::membership_row(d2, model.fuzzifier, grades);
    return grades;
}

/// The t clusters with largest grade, descending; lower index wins ties.
template <typename Scalar>
std::vector<Index> retrieve_clusters(const Vector<Scalar>& grades, Index t = 2) {
    return detail::top_indices(grades, t, [](Scalar a, Scalar b) { return a > b; });
}

/// The t clusters whose centers are nearest the query, lower index on ties.
template <typename Scalar>
std::vector<Index> nearest_clusters(const Vector<Scalar>& q, const ClusterModel<Scalar>& model, Index t) {
    return detail::top_indices(detail::query_squared_distances(q, model), t,
                               [](Scalar a, Scalar b) { return a < b; });
}

/// Bins to search for a query: top-t by membership for fuzzy models,
/// top-t by center distance for crisp ones.
template <typename Scalar>
std::vector<Index> rank_clusters(const Vector<Scalar>& q, const ClusterModel<Scalar>& model, Index t) {
    if (model.crisp()) return nearest_clusters(q, model, t);
    return retrieve_clusters(query_memberships(q, model), t);
}

/// Scans the enrolled templates assigned to the query's top-t clusters and
/// returns the nearest one.
template <typename Scalar>
IdentificationResult<Scalar> identify(const Vector<Scalar>& q, const ClusterModel<Scalar>& model,
                                      const LabeledDataset<Scalar>& enrolled,
                                      const std::vector<Index>& assignments, Index t = 2) {
    detail::check_query(q, model);
    if (enrolled.dim() != model.dim()) {
        throw UsageError("enrolled templates have dimension " + std::to_string(enrolled.dim()) +
                         ", model has " + std::to_string(model.dim()));
    }
    if (static_cast<Index>(assignments.size()) != enrolled.size()) {
        throw UsageError("assignment count does not match enrolled template count");
    }

    IdentificationResult<Scalar> result;
    result.query_memberships = query_memberships(q, model);
    result.ranked_clusters = model.crisp() ? nearest_clusters(q, model, t)
                                           : retrieve_clusters(result.query_memberships, t);

    std::vector<char> searched(static_cast<std::size_t>(model.clusters()), 0);
    for (Index j : result.ranked_clusters) searched[static_cast<std::size_t>(j)] = 1;

    Scalar best_d2(0);
    for (Index i = 0; i < enrolled.size(); ++i) {
        const Index bin = assignments[static_cast<std::size_t>(i)];
        if (bin < 0 || bin >= model.clusters()) throw UsageError("assignment out of range");
        if (!searched[static_cast<std::size_t>(bin)]) continue;
        ++result.candidate_count;
        const Scalar d2 = squared_distance(q.transpose(), enrolled.vectors.row(i));
        if (!result.best_template || d2 < best_d2) {
            best_d2 = d2;
            result.best_template = i;
        }
    }
    if (result.best_template) {
        result.best_identity = enrolled.identities[static_cast<std::size_t>(*result.best_template)];
        result.best_distance = std::sqrt(best_d2);
    }
    return result;
}

/// Nearest enrolled template over the whole database.
template <typename Scalar>
std::optional<Index> exhaustive_nearest(const Vector<Scalar>& q, const LabeledDataset<Scalar>& enrolled) {
    std::optional<Index> best;
    Scalar best_d2(0);
    for (Index i = 0; i < enrolled.size(); ++i) {
        const Scalar d2 = squared_distance(q.transpose(), enrolled.vectors.row(i));
        if (!best || d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

}  // namespace fuzzybin

#endif  // FUZZYBIN_IDENTIFY_HPP

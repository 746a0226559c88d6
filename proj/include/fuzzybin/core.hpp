#ifndef FUZZYBIN_CORE_HPP
#define FUZZYBIN_CORE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fuzzybin {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One feature template. Stored as a column; datasets keep templates as rows.
using FeatureVector = Vector<double>;

/// N x c membership grades, rows sum to one.
template <typename Scalar>
using PartitionMatrix = Matrix<Scalar>;

// Error hierarchy. The CLI maps these onto exit codes 1/2/3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DegenerateClusterError : public Error {
public:
    explicit DegenerateClusterError(Index cluster)
        : Error("degenerate cluster " + std::to_string(cluster) +
                ": membership weights sum to zero"),
          cluster_(cluster) {}
    Index cluster() const { return cluster_; }

private:
    Index cluster_;
};

/// Sum of squared coordinate differences, accumulated in index order.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar squared_distance(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) {
        throw UsageError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    typename DerivedA::Scalar sum(0);
    for (Index d = 0; d < a.size(); ++d) {
        const auto diff = a.coeff(d) - b.coeff(d);
        sum += diff * diff;
    }
    return sum;
}

/// Per-dimension min/max fitted on enrolled templates.
template <typename Scalar>
struct Normalization {
    Vector<Scalar> min;
    Vector<Scalar> max;

    Index dim() const { return min.size(); }

    /// Maps each row of `x` into [0,1] per dimension; zero-span dimensions go to 0.5.
    Matrix<Scalar> apply(const Matrix<Scalar>& x) const {
        check_dim(x.cols());
        Matrix<Scalar> out(x.rows(), x.cols());
        for (Index d = 0; d < x.cols(); ++d) {
            const Scalar span = max(d) - min(d);
            for (Index i = 0; i < x.rows(); ++i) {
                out(i, d) = span > Scalar(0) ? (x(i, d) - min(d)) / span : Scalar(0.5);
            }
        }
        return out;
    }

    Vector<Scalar> apply(const Vector<Scalar>& v) const {
        Matrix<Scalar> row = v.transpose();
        return apply(row).row(0).transpose();
    }

    /// Inverse of apply. Zero-span dimensions recover `min`.
    Matrix<Scalar> invert(const Matrix<Scalar>& y) const {
        check_dim(y.cols());
        Matrix<Scalar> out(y.rows(), y.cols());
        for (Index d = 0; d < y.cols(); ++d) {
            const Scalar span = max(d) - min(d);
            for (Index i = 0; i < y.rows(); ++i) {
                out(i, d) = span > Scalar(0) ? min(d) + y(i, d) * span : min(d);
            }
        }
        return out;
    }

private:
    void check_dim(Index cols) const {
        if (cols != dim()) {
            throw UsageError("normalization has dimension " + std::to_string(dim()) +
                             ", data has " + std::to_string(cols));
        }
    }
};

/// Trained cluster index: centers are c x M, one center per row.
/// A fuzzifier of exactly 1 marks a crisp (k-means) model.
template <typename Scalar>
struct ClusterModel {
    Matrix<Scalar> centers;
    Scalar fuzzifier = Scalar(2);
    Scalar epsilon = Scalar(1e-5);
    int max_iterations = 300;
    Scalar final_objective = Scalar(0);
    int iterations_run = 0;
    std::uint64_t seed = 0;
    std::optional<Normalization<Scalar>> normalization;

    Index clusters() const { return centers.rows(); }
    Index dim() const { return centers.cols(); }
    bool crisp() const { return fuzzifier == Scalar(1); }
};

enum class Role { enrolled, probe };

/// Templates as rows of `vectors`, with parallel identity and role columns.
template <typename Scalar>
struct LabeledDataset {
    Matrix<Scalar> vectors;
    std::vector<std::string> identities;
    std::vector<Role> roles;

    Index size() const { return vectors.rows(); }
    Index dim() const { return vectors.cols(); }

    LabeledDataset subset(Role role) const {
        std::vector<Index> keep;
        for (Index i = 0; i < size(); ++i) {
            if (roles[static_cast<std::size_t>(i)] == role) keep.push_back(i);
        }
        LabeledDataset out;
        out.vectors.resize(static_cast<Index>(keep.size()), dim());
        for (std::size_t k = 0; k < keep.size(); ++k) {
            out.vectors.row(static_cast<Index>(k)) = vectors.row(keep[k]);
            out.identities.push_back(identities[static_cast<std::size_t>(keep[k])]);
            out.roles.push_back(role);
        }
        return out;
    }

    LabeledDataset enrolled() const { return subset(Role::enrolled); }
    LabeledDataset probes() const { return subset(Role::probe); }
};

using Dataset = LabeledDataset<double>;

/// Componentwise min/max over the enrolled rows of `data`.
template <typename Scalar>
Normalization<Scalar> normalize_fit(const LabeledDataset<Scalar>& data) {
    const auto enrolled = data.enrolled();
    if (enrolled.size() == 0) {
        throw UsageError("normalize_fit: dataset has no enrolled templates");
    }
    Normalization<Scalar> norm;
    norm.min = enrolled.vectors.colwise().minCoeff().transpose();
    norm.max = enrolled.vectors.colwise().maxCoeff().transpose();
    return norm;
}

/// Draws in (0, 1] from the top 53 bits of a 64-bit engine; identical on every platform.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace fuzzybin

#endif  // FUZZYBIN_CORE_HPP

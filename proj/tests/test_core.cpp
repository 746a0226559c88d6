#include "doctest.h"

#include <random>

#include "fuzzybin/core.hpp"
#include "test_support.hpp"

using namespace fuzzybin;

TEST_CASE("squared_distance examples") {
    Eigen::Vector2d zero(0, 0), p(3, 4);
    CHECK(squared_distance(zero, zero) == 0.0);
    CHECK(squared_distance(zero, p) == 25.0);
    Eigen::Vector3d a(1, 2, 3), b(4, 6, 3);
    CHECK(squared_distance(a, b) == 25.0);
}

TEST_CASE("squared_distance rejects mismatched dimensions") {
    Eigen::Vector2d a(0, 0);
    Eigen::Vector3d b(0, 0, 0);
    CHECK_THROWS_AS(squared_distance(a, b), UsageError);
}

TEST_CASE("squared_distance is symmetric and zero on the diagonal") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = testing::random_matrix(rng, 2, 1 + trial % 30, -5.0, 5.0);
        CHECK(squared_distance(m.row(0), m.row(1)) == squared_distance(m.row(1), m.row(0)));
        CHECK(squared_distance(m.row(0), m.row(0)) == 0.0);
        CHECK(squared_distance(m.row(0), m.row(1)) > 0.0);
    }
}

namespace {

Dataset make(std::initializer_list<std::initializer_list<double>> rows) {
    Dataset d;
    const auto n = static_cast<Index>(rows.size());
    d.vectors.resize(n, static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& r : rows) {
        Index j = 0;
        for (double v : r) d.vectors(i, j++) = v;
        d.identities.push_back("id" + std::to_string(i));
        d.roles.push_back(Role::enrolled);
        ++i;
    }
    return d;
}

}  // namespace

TEST_CASE("normalize_fit examples") {
    auto n1 = normalize_fit(make({{0}, {2}}));
    CHECK(n1.min(0) == 0.0);
    CHECK(n1.max(0) == 2.0);

    auto n2 = normalize_fit(make({{5}, {5}}));
    CHECK(n2.min(0) == 5.0);
    CHECK(n2.max(0) == 5.0);
    CHECK(n2.apply(Vector<double>(Vector<double>::Constant(1, 5.0)))(0) == 0.5);

    auto n3 = normalize_fit(make({{1, 10}, {3, 30}}));
    CHECK(n3.min(0) == 1.0);
    CHECK(n3.min(1) == 10.0);
    CHECK(n3.max(0) == 3.0);
    CHECK(n3.max(1) == 30.0);
}

TEST_CASE("normalize_fit ignores probes and rejects empty input") {
    auto d = make({{0}, {2}, {100}});
    d.roles[2] = Role::probe;
    const auto n = normalize_fit(d);
    CHECK(n.max(0) == 2.0);

    Dataset empty;
    empty.vectors.resize(0, 3);
    CHECK_THROWS_AS(normalize_fit(empty), UsageError);
}

TEST_CASE("normalization maps enrolled data into [0,1] and inverts") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Dataset d;
        d.vectors = testing::random_matrix(rng, 40, 27, -100.0, 250.0);
        d.vectors.col(3).setConstant(4.25);  // degenerate span
        d.identities.assign(40, "x");
        d.roles.assign(40, Role::enrolled);
        const auto norm = normalize_fit(d);
        const auto y = norm.apply(d.vectors);
        CHECK(y.minCoeff() >= 0.0);
        CHECK(y.maxCoeff() <= 1.0);
        CHECK((y.col(3).array() == 0.5).all());
        const auto back = norm.invert(y);
        CHECK((back - d.vectors).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("unit_draw is in (0,1] and reproducible") {
    std::mt19937_64 a(3), b(3);
    for (int k = 0; k < 1000; ++k) {
        const double x = unit_draw(a);
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
        CHECK(x == unit_draw(b));
    }
}

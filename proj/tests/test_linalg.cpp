#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "scrollforge/vec_mat.hpp"
#include "support.hpp"

using namespace scrollforge;
using sftest::mat_mul;
using sftest::rotation;

namespace {
const Mat3 kA1 = Mat3::from_rows(Vec3(0.5, -10, 0), Vec3(10, 0.5, 0), Vec3(0, 0, 0));
const Mat3 kA2 = Mat3::from_rows(Vec3(0.5, -10, 0), Vec3(10, 0.5, 0), Vec3(0, 0, 0.1));
}  // namespace

TEST_CASE("Vec3 and Mat3 reject non-finite entries") {
    double nan = std::numeric_limits<double>::quiet_NaN();
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Vec3(0, 0, nan), std::invalid_argument);
    CHECK_THROWS_AS(Vec3(inf, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(Mat3({0, 0, 0, 0, nan, 0, 0, 0, 0}), std::invalid_argument);
    CHECK_NOTHROW(Vec3(1e300, -1e300, 0));
}

TEST_CASE("Vec3 arithmetic and norms") {
    Vec3 a(1, 2, 3), b(-1, 0.5, 2);
    CHECK(a + b == Vec3(0, 2.5, 5));
    CHECK(a - b == Vec3(2, 1.5, 1));
    CHECK(a * 2.0 == Vec3(2, 4, 6));
    CHECK(a.dot(b) == doctest::Approx(6.0));
    CHECK(Vec3(3, 4, 0).norm() == doctest::Approx(5.0));
    CHECK(Vec3(-1, 7, -3).norm_inf() == doctest::Approx(7.0));
}

TEST_CASE("Mat3 invariants of the factory matrices") {
    CHECK(kA1.trace() == doctest::Approx(1.0));
    CHECK(kA1.det() == doctest::Approx(0.0));
    CHECK(kA1.second_invariant() == doctest::Approx(100.25));
    CHECK(kA2.det() == doctest::Approx(10.025));
    CHECK(kA1.col(0) == Vec3(0.5, 10, 0));
    CHECK(kA1 * Vec3(0, 0, -1) == Vec3(0, 0, 0));
}

TEST_CASE("singular values recover a rotated diagonal spectrum") {
    sftest::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        double d[3] = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        Mat3 u = rotation(rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28));
        Mat3 v = rotation(rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28));
        Mat3 m = mat_mul(u, mat_mul(Mat3::diagonal(d[0], d[1], d[2]), v));
        double expect[3] = {std::fabs(d[0]), std::fabs(d[1]), std::fabs(d[2])};
        std::sort(expect, expect + 3, std::greater<>());
        auto sv = singular_values(m);
        for (int i = 0; i < 3; ++i) CHECK(sv[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
}

TEST_CASE("singular values of the example matrices") {
    auto sv1 = singular_values(kA1);
    double planar = std::sqrt(100.25);
    CHECK(sv1[0] == doctest::Approx(planar));
    CHECK(sv1[1] == doctest::Approx(planar));
    CHECK(sv1[2] == doctest::Approx(0.0));
    auto sv2 = singular_values(kA2);
    CHECK(sv2[2] == doctest::Approx(0.1));
}

TEST_CASE("numeric rank matches construction") {
    CHECK(numeric_rank(kA1) == 2);
    CHECK(numeric_rank(kA2) == 3);
    CHECK(numeric_rank(Mat3()) == 0);

    sftest::Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        int rank = static_cast<int>(rng.uniform01() * 4.0);  // 0..3
        double d[3] = {0, 0, 0};
        for (int i = 0; i < rank; ++i) d[i] = rng.uniform(0.5, 10) * (rng.uniform01() < 0.5 ? -1 : 1);
        Mat3 u = rotation(rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28));
        Mat3 v = rotation(rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28));
        Mat3 m = mat_mul(u, mat_mul(Mat3::diagonal(d[0], d[1], d[2]), v));
        CHECK(numeric_rank(m) == rank);
    }
}

TEST_CASE("rank of the augmented matrix") {
    // (0,0,5) is outside the column span of the singular example matrix,
    // 0.1*a1 is inside.
    CHECK(numeric_rank_augmented(kA1, Vec3(0, 0, 5)) == 3);
    CHECK(numeric_rank_augmented(kA1, Vec3(0.05, 1, 0)) == 2);
    CHECK(numeric_rank_augmented(Mat3(), Vec3(0, 0, 0)) == 0);
    CHECK(numeric_rank_augmented(Mat3(), Vec3(1, 0, 0)) == 1);
}

TEST_CASE("solve3 against residuals") {
    sftest::Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        Mat3 a = mat_mul(rotation(rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0, 6)),
                         Mat3::diagonal(rng.uniform(0.5, 5), rng.uniform(0.5, 5),
                                        rng.uniform(0.5, 5)));
        Vec3 b = rng.vec(-10, 10);
        auto x = solve3(a, b);
        REQUIRE(x.has_value());
        CHECK((a * *x - b).norm() < 1e-9);
    }
    CHECK_FALSE(solve3(kA1, Vec3(1, 2, 3)).has_value());
}

TEST_CASE("solve_affine_set on the singular example matrix") {
    // A x = -W2 has the solution line (-0.1, 0, t).
    Vec3 w2 = kA1.col(0) * 0.1;
    auto sol = solve_affine_set(kA1, -w2);
    REQUIRE(sol.consistent);
    REQUIRE(sol.null_basis.size() == 1);
    CHECK(sol.particular.x == doctest::Approx(-0.1));
    CHECK(sol.particular.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol.particular.z == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(sol.null_basis[0].z) == doctest::Approx(1.0));
    CHECK((kA1 * sol.particular + w2).norm() < 1e-12);

    // A x = -V is inconsistent: the neutral direction is not in the span.
    auto none = solve_affine_set(kA1, Vec3(0, 0, -5));
    CHECK_FALSE(none.consistent);

    // Invertible matrix: point solution, no null space.
    auto pt = solve_affine_set(kA2, Vec3(1, 2, 3));
    REQUIRE(pt.consistent);
    CHECK(pt.null_basis.empty());
    CHECK((kA2 * pt.particular - Vec3(1, 2, 3)).norm() < 1e-9);
}

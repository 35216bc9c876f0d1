#pragma once

// Fixed-dimension (3) vectors and matrices plus the small dense numerics the
// rest of the library is built on: symmetric eigensolve, singular values,
// numeric rank with a relative tolerance, and linear solves.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace scrollforge {

/// Relative singular-value threshold used for all rank decisions: singular
/// values below rel_tol * sigma_max count as zero.
inline constexpr double kRankRelTol = 1e-10;

/// 3-component state vector / offset. Components must be finite; construction
/// rejects NaN and infinities.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
        if (!(std::isfinite(x_) && std::isfinite(y_) && std::isfinite(z_)))
            throw std::invalid_argument("Vec3: non-finite component");
    }

    double operator[](std::size_t i) const { return i == 0 ? x : i == 1 ? y : z; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { return *this = *this + o; }
    Vec3& operator-=(const Vec3& o) { return *this = *this - o; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm_inf() const { return std::max({std::fabs(x), std::fabs(y), std::fabs(z)}); }

    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Row-major 3x3 matrix with finite entries.
class Mat3 {
public:
    Mat3() = default;
    explicit Mat3(const std::array<double, 9>& row_major) : m_(row_major) {
        for (double e : m_)
            if (!std::isfinite(e)) throw std::invalid_argument("Mat3: non-finite entry");
    }

    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        return Mat3({r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z});
    }
    static Mat3 identity() { return Mat3({1, 0, 0, 0, 1, 0, 0, 0, 1}); }
    static Mat3 diagonal(double d0, double d1, double d2) {
        return Mat3({d0, 0, 0, 0, d1, 0, 0, 0, d2});
    }

    double operator()(std::size_t r, std::size_t c) const { return m_[3 * r + c]; }

    Vec3 row(std::size_t i) const { return {m_[3 * i], m_[3 * i + 1], m_[3 * i + 2]}; }
    Vec3 col(std::size_t j) const { return {m_[j], m_[3 + j], m_[6 + j]}; }

    Vec3 operator*(const Vec3& v) const {
        return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z,
                m_[3] * v.x + m_[4] * v.y + m_[5] * v.z,
                m_[6] * v.x + m_[7] * v.y + m_[8] * v.z};
    }

    double trace() const { return m_[0] + m_[4] + m_[8]; }

    double det() const {
        return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) -
               m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
               m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
    }

    /// Sum of the principal 2x2 minors: the coefficient of lambda in
    /// det(A - lambda I) = -lambda^3 + tr lambda^2 - c2 lambda + det.
    double second_invariant() const {
        double m01 = m_[0] * m_[4] - m_[1] * m_[3];
        double m02 = m_[0] * m_[8] - m_[2] * m_[6];
        double m12 = m_[4] * m_[8] - m_[5] * m_[7];
        return m01 + m02 + m12;
    }

    const std::array<double, 9>& data() const { return m_; }

    bool operator==(const Mat3&) const = default;

private:
    std::array<double, 9> m_{};
};

namespace detail {

/// One-sided Jacobi SVD over three columns of height M (3 for a matrix,
/// 4 for the transposed augmented matrix). Orthogonalizes the columns by
/// plane rotations; afterwards the column norms are the singular values and
/// the accumulated rotations are the right singular vectors. Working on the
/// columns directly keeps tiny singular values at full precision (a Gram
/// matrix would square them below the noise floor of the rank threshold).
template <int M>
struct ColumnSvd {
    std::array<std::array<double, M>, 3> col;
    std::array<Vec3, 3> v = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    std::array<double, 3> sigma{};

    void run() {
        auto dot = [](const std::array<double, M>& a, const std::array<double, M>& b) {
            double acc = 0.0;
            for (int i = 0; i < M; ++i) acc += a[i] * b[i];
            return acc;
        };
        for (int sweep = 0; sweep < 64; ++sweep) {
            bool converged = true;
            for (int p = 0; p < 2; ++p) {
                for (int q = p + 1; q < 3; ++q) {
                    double app = dot(col[p], col[p]);
                    double aqq = dot(col[q], col[q]);
                    double apq = dot(col[p], col[q]);
                    if (apq == 0.0 || apq * apq <= 1e-30 * app * aqq) continue;
                    converged = false;
                    double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                    double c = std::cos(theta), sn = std::sin(theta);
                    for (int i = 0; i < M; ++i) {
                        double cp = col[p][i], cq = col[q][i];
                        col[p][i] = c * cp - sn * cq;
                        col[q][i] = sn * cp + c * cq;
                    }
                    Vec3 vp = v[p], vq = v[q];
                    v[p] = vp * c - vq * sn;
                    v[q] = vp * sn + vq * c;
                }
            }
            if (converged) break;
        }
        for (int j = 0; j < 3; ++j) sigma[j] = std::sqrt(dot(col[j], col[j]));
        // sort descending, carrying columns and rotations along
        for (int i = 0; i < 2; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (sigma[j] > sigma[i]) {
                    std::swap(sigma[i], sigma[j]);
                    std::swap(col[i], col[j]);
                    std::swap(v[i], v[j]);
                }
    }
};

inline ColumnSvd<3> svd_of(const Mat3& a) {
    ColumnSvd<3> svd;
    for (int j = 0; j < 3; ++j) {
        Vec3 c = a.col(j);
        svd.col[j] = {c.x, c.y, c.z};
    }
    svd.run();
    return svd;
}

/// Columns of [A | b]ᵀ are the rows of [A | b]; the nonzero spectrum matches
/// the 3x4 augmented matrix.
inline ColumnSvd<4> svd_of_augmented(const Mat3& a, const Vec3& b) {
    ColumnSvd<4> svd;
    for (int j = 0; j < 3; ++j) svd.col[j] = {a(j, 0), a(j, 1), a(j, 2), b[j]};
    svd.run();
    return svd;
}

inline int count_rank(const std::array<double, 3>& sv, double rel_tol) {
    double smax = sv[0];
    if (smax <= 0.0) return 0;
    int r = 0;
    for (double s : sv)
        if (s > rel_tol * smax) ++r;
    return r;
}

}  // namespace detail

/// Singular values of A, descending.
inline std::array<double, 3> singular_values(const Mat3& a) {
    return detail::svd_of(a).sigma;
}

/// Singular values of the augmented 3x4 matrix [A | b].
inline std::array<double, 3> singular_values_augmented(const Mat3& a, const Vec3& b) {
    return detail::svd_of_augmented(a, b).sigma;
}

inline int numeric_rank(const Mat3& a, double rel_tol = kRankRelTol) {
    return detail::count_rank(singular_values(a), rel_tol);
}

inline int numeric_rank_augmented(const Mat3& a, const Vec3& b, double rel_tol = kRankRelTol) {
    return detail::count_rank(singular_values_augmented(a, b), rel_tol);
}

/// Unique solution of A x = b by Gaussian elimination with partial pivoting.
/// Returns nullopt when A is numerically rank-deficient.
inline std::optional<Vec3> solve3(const Mat3& a, const Vec3& b, double rel_tol = kRankRelTol) {
    if (numeric_rank(a, rel_tol) < 3) return std::nullopt;
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = a(i, j);
        m[i][3] = b[i];
    }
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::fabs(m[i][k]) > std::fabs(m[piv][k])) piv = i;
        if (piv != k)
            for (int j = 0; j < 4; ++j) std::swap(m[k][j], m[piv][j]);
        for (int i = k + 1; i < 3; ++i) {
            double f = m[i][k] / m[k][k];
            for (int j = k; j < 4; ++j) m[i][j] -= f * m[k][j];
        }
    }
    double x2 = m[2][3] / m[2][2];
    double x1 = (m[1][3] - m[1][2] * x2) / m[1][1];
    double x0 = (m[0][3] - m[0][1] * x1 - m[0][2] * x2) / m[0][0];
    return Vec3(x0, x1, x2);
}

/// Full solution set of A x = b. When consistent, the set is
/// particular + span(null_basis); null_basis is empty for invertible A.
struct AffineSolutionSet {
    bool consistent = false;
    Vec3 particular{};
    std::vector<Vec3> null_basis;
};

inline AffineSolutionSet solve_affine_set(const Mat3& a, const Vec3& b,
                                          double rel_tol = kRankRelTol) {
    detail::ColumnSvd<3> svd = detail::svd_of(a);
    int rank = detail::count_rank(svd.sigma, rel_tol);

    AffineSolutionSet out;
    out.consistent = (numeric_rank_augmented(a, b, rel_tol) == rank);
    if (!out.consistent) return out;

    // pseudo-inverse solution: x = sum v_i (u_i . b) / sigma_i over the
    // nonzero spectrum, with u_i the orthogonalized column i
    Vec3 x(0, 0, 0);
    for (int i = 0; i < rank; ++i) {
        Vec3 ui(svd.col[i][0], svd.col[i][1], svd.col[i][2]);
        x += svd.v[i] * (ui.dot(b) / (svd.sigma[i] * svd.sigma[i]));
    }
    out.particular = x;
    for (int i = rank; i < 3; ++i) out.null_basis.push_back(svd.v[i]);
    return out;
}

}  // namespace scrollforge

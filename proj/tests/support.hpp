#pragma once

// Shared test utilities: seeded draws built directly on mt19937_64 output
// (identical sequences on every platform) and single-piece system builders.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "scrollforge/pwl.hpp"
#include "scrollforge/systems.hpp"

namespace sftest {

using namespace scrollforge;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 vec(double lo, double hi) {
        double a = uniform(lo, hi), b = uniform(lo, hi), c = uniform(lo, hi);
        return Vec3(a, b, c);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// x' = a x + b on all of R^3.
inline PWLSystem single_piece(const Mat3& a, const Vec3& b, std::string name = "single") {
    PWLSystem sys;
    sys.name = std::move(name);
    sys.pieces.push_back(AffinePiece{RegionPredicate{}, a, b});
    return sys;
}

/// The scroll normal form as a single-piece system matching SubsystemParams.
inline PWLSystem affine_system(const SubsystemParams& p) {
    Mat3 a = Mat3::from_rows(Vec3(p.m, -p.n, 0), Vec3(p.n, p.m, 0), Vec3(0, 0, p.eta));
    Vec3 b = a.col(0) * p.k1 + a.col(1) * p.k2 + Vec3(0, 0, p.v);
    return single_piece(a, b, "affine");
}

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    std::array<double, 9> m{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
            m[static_cast<std::size_t>(3 * r + c)] = acc;
        }
    return Mat3(m);
}

inline Mat3 rotation(double ax, double ay, double az) {
    double cx = std::cos(ax), sx = std::sin(ax);
    double cy = std::cos(ay), sy = std::sin(ay);
    double cz = std::cos(az), sz = std::sin(az);
    Mat3 rx({1, 0, 0, 0, cx, -sx, 0, sx, cx});
    Mat3 ry({cy, 0, sy, 0, 1, 0, -sy, 0, cy});
    Mat3 rz({cz, -sz, 0, sz, cz, 0, 0, 0, 1});
    return mat_mul(rx, mat_mul(ry, rz));
}

}  // namespace sftest

#pragma once

// Factory constructors for the built-in multi-scroll systems: the 12-branch
// double scroll and the two 18-branch triple scrolls (neutral and perturbed
// axial eigenvalue). Branch guards are written out row by row, strict and
// non-strict boundaries as stated; dispatch is first-match-wins.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrollforge/pwl.hpp"

namespace scrollforge {

/// Coefficients of an in-plane forcing vector W = k1 a1 + k2 a2, where a1, a2
/// are the first two columns of the system matrix.
struct WVectorSpec {
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Parameter record for a scroll family: planar spiral eigenstructure (m, n),
/// axial eigenvalue eta, axial drift magnitude v, the switching planes in
/// order S1, S2, ..., the W table (two entries per scroll cell), and the x1
/// split threshold of each cell.
struct ScrollFamilySpec {
    double m = 0.0, n = 0.0, eta = 0.0, v = 0.0;
    std::vector<NamedPlane> planes;
    std::vector<WVectorSpec> w_specs;
    std::vector<double> x1_thresholds;

    std::size_t scroll_count() const { return w_specs.size() / 2; }

    Mat3 a_matrix() const {
        return Mat3::from_rows(Vec3(m, -n, 0), Vec3(n, m, 0), Vec3(0, 0, eta));
    }

    Vec3 w_vector(std::size_t i) const {
        Mat3 a = a_matrix();
        return a.col(0) * w_specs[i].k1 + a.col(1) * w_specs[i].k2;
    }

    void validate() const {
        if (!(m > 0.0)) throw std::invalid_argument("ScrollFamilySpec: m must be > 0");
        if (n == 0.0) throw std::invalid_argument("ScrollFamilySpec: n must be nonzero");
        if (v == 0.0) throw std::invalid_argument("ScrollFamilySpec: v must be nonzero");
        if (w_specs.empty() || w_specs.size() % 2 != 0)
            throw std::invalid_argument("ScrollFamilySpec: need two W vectors per scroll");
        if (x1_thresholds.size() != scroll_count())
            throw std::invalid_argument("ScrollFamilySpec: one x1 threshold per scroll");
        if (planes.size() != 2 * scroll_count() - 1)
            throw std::invalid_argument("ScrollFamilySpec: plane count mismatch");
    }
};

namespace detail {

inline ScrollFamilySpec builtin_family(double eta, std::size_t scrolls) {
    ScrollFamilySpec spec;
    spec.m = 0.5;
    spec.n = 10.0;
    spec.eta = eta;
    spec.v = 5.0;
    // S1: x3=0, S2: x1+x3/2=1, S3: x3=2, S4: x1+x3/2=3, S5: x3=4.
    spec.planes = {{"S1", SwitchingPlane(Vec3(0, 0, 1), 0.0)},
                   {"S2", SwitchingPlane(Vec3(1, 0, 0.5), 1.0)},
                   {"S3", SwitchingPlane(Vec3(0, 0, 1), 2.0)},
                   {"S4", SwitchingPlane(Vec3(1, 0, 0.5), 3.0)},
                   {"S5", SwitchingPlane(Vec3(0, 0, 1), 4.0)}};
    spec.planes.erase(spec.planes.begin() + static_cast<std::ptrdiff_t>(2 * scrolls - 1),
                      spec.planes.end());
    spec.w_specs = {{-0.1, 0.0}, {0.1, 0.0}, {-1.1, 0.0}, {-0.9, 0.0}, {-2.1, 0.0}, {-1.9, 0.0}};
    spec.w_specs.resize(2 * scrolls);
    spec.x1_thresholds = {0.0, 1.0, 2.0};
    spec.x1_thresholds.resize(scrolls);
    spec.validate();
    return spec;
}

struct BranchRow {
    int sigma;           // +1, 0, -1 multiple of V
    std::size_t w;       // W index (0-based)
    std::vector<GuardClause> guard;
};

inline PWLSystem assemble(const ScrollFamilySpec& spec, const std::vector<BranchRow>& rows,
                          std::string name) {
    Mat3 a = spec.a_matrix();
    Vec3 axial(0, 0, spec.v);
    PWLSystem sys;
    sys.name = std::move(name);
    sys.planes = spec.planes;
    for (std::size_t i = 1; i < spec.planes.size(); i += 2) sys.region_cuts.push_back(i);
    sys.pieces.reserve(rows.size());
    for (const auto& row : rows) {
        Vec3 b = spec.w_vector(row.w) + axial * static_cast<double>(row.sigma);
        sys.pieces.push_back(AffinePiece{RegionPredicate{row.guard}, a, b});
    }
    return sys;
}

inline GuardClause rel(const ScrollFamilySpec& spec, std::size_t plane_idx, PlaneRel r) {
    return PlaneClause{spec.planes[plane_idx].plane, r};
}

inline GuardClause x1_lt(double t) { return CoordClause{0, CoordOp::Lt, t}; }
inline GuardClause x1_ge(double t) { return CoordClause{0, CoordOp::Ge, t}; }

}  // namespace detail

/// The 12-branch double-scroll system: m=0.5, n=10, eta=0, v=5, planes
/// S1..S3, W1..W4.
inline PWLSystem build_example1_double() {
    using detail::rel;
    using detail::x1_ge;
    using detail::x1_lt;
    using enum PlaneRel;
    ScrollFamilySpec spec = detail::builtin_family(0.0, 2);
    const std::size_t S1 = 0, S2 = 1, S3 = 2;
    std::vector<detail::BranchRow> rows = {
        {+1, 0, {rel(spec, S1, Below), x1_lt(spec.x1_thresholds[0])}},
        {+1, 1, {rel(spec, S1, Below), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {0, 0, {rel(spec, S1, On), x1_lt(spec.x1_thresholds[0])}},
        {0, 1, {rel(spec, S1, On), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {-1, 0, {rel(spec, S1, Above), rel(spec, S2, Below), x1_lt(spec.x1_thresholds[0])}},
        {-1, 1, {rel(spec, S1, Above), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {+1, 2, {rel(spec, S3, Below), rel(spec, S2, AtOrAbove), x1_lt(spec.x1_thresholds[1])}},
        {+1, 3, {rel(spec, S3, Below), rel(spec, S2, AtOrAbove), x1_ge(spec.x1_thresholds[1])}},
        {0, 2, {rel(spec, S3, On), rel(spec, S2, AtOrAbove), x1_lt(spec.x1_thresholds[1])}},
        {0, 3, {rel(spec, S3, On), x1_ge(spec.x1_thresholds[1])}},
        {-1, 2, {rel(spec, S3, Above), rel(spec, S2, AtOrAbove), x1_lt(spec.x1_thresholds[1])}},
        {-1, 3, {rel(spec, S3, Above), x1_ge(spec.x1_thresholds[1])}},
    };
    return detail::assemble(spec, rows, "example1-double");
}

namespace detail {

/// Shared 18-branch triple-scroll layout; the two built-in instances differ
/// only in the axial eigenvalue. Branch 16 carries the "x >= S4" clause that
/// its symmetric counterparts have.
inline PWLSystem build_triple(double eta, std::string name) {
    using enum PlaneRel;
    ScrollFamilySpec spec = builtin_family(eta, 3);
    const std::size_t S1 = 0, S2 = 1, S3 = 2, S4 = 3, S5 = 4;
    std::vector<BranchRow> rows = {
        {+1, 0, {rel(spec, S1, Below), x1_lt(spec.x1_thresholds[0])}},
        {+1, 1, {rel(spec, S1, Below), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {0, 0, {rel(spec, S1, On), x1_lt(spec.x1_thresholds[0])}},
        {0, 1, {rel(spec, S1, On), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {-1, 0, {rel(spec, S1, Above), rel(spec, S2, Below), x1_lt(spec.x1_thresholds[0])}},
        {-1, 1, {rel(spec, S1, Above), rel(spec, S2, Below), x1_ge(spec.x1_thresholds[0])}},
        {+1, 2, {rel(spec, S3, Below), rel(spec, S2, AtOrAbove), x1_lt(spec.x1_thresholds[1])}},
        {+1, 3, {rel(spec, S3, Below), rel(spec, S2, AtOrAbove), rel(spec, S4, Below), x1_ge(spec.x1_thresholds[1])}},
        {0, 2, {rel(spec, S3, On), rel(spec, S2, AtOrAbove), x1_lt(spec.x1_thresholds[1])}},
        {0, 3, {rel(spec, S3, On), rel(spec, S4, Below), x1_ge(spec.x1_thresholds[1])}},
        {-1, 2, {rel(spec, S3, Above), rel(spec, S2, AtOrAbove), rel(spec, S4, Below), x1_lt(spec.x1_thresholds[1])}},
        {-1, 3, {rel(spec, S3, Above), rel(spec, S4, Below), x1_ge(spec.x1_thresholds[1])}},
        {+1, 4, {rel(spec, S5, Below), rel(spec, S4, AtOrAbove), x1_lt(spec.x1_thresholds[2])}},
        {+1, 5, {rel(spec, S5, Below), rel(spec, S4, AtOrAbove), x1_ge(spec.x1_thresholds[2])}},
        {0, 4, {rel(spec, S5, On), rel(spec, S4, AtOrAbove), x1_lt(spec.x1_thresholds[2])}},
        {0, 5, {rel(spec, S5, On), rel(spec, S4, AtOrAbove), x1_ge(spec.x1_thresholds[2])}},
        {-1, 4, {rel(spec, S5, Above), rel(spec, S4, AtOrAbove), x1_lt(spec.x1_thresholds[2])}},
        {-1, 5, {rel(spec, S5, Above), x1_ge(spec.x1_thresholds[2])}},
    };
    return assemble(spec, rows, std::move(name));
}

}  // namespace detail

/// The 18-branch triple-scroll system with neutral axial direction (eta = 0).
inline PWLSystem build_example1_triple() { return detail::build_triple(0.0, "example1-triple"); }

/// The 18-branch triple-scroll system with invertible matrix (eta = 0.1);
/// same planes and W vectors as the neutral triple scroll.
inline PWLSystem build_example2_triple() { return detail::build_triple(0.1, "example2-triple"); }

}  // namespace scrollforge

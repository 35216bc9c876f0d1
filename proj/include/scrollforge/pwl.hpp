#pragma once

// Piecewise-linear vector fields on R^3: oriented switching planes, guarded
// affine pieces, first-match dispatch, equilibrium analysis, and the
// closed-form subsystem solution used as an integration oracle.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scrollforge/vec_mat.hpp"

namespace scrollforge {

enum class Side { Below, On, Above };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::Below: return "below";
        case Side::On: return "on";
        default: return "above";
    }
}

/// Oriented hyperplane n·x = d. Points with n·x - d > on_tolerance lie Above
/// (the component pointed to by the normal), |n·x - d| <= on_tolerance lie On,
/// the rest Below. The default tolerance 0 makes On fire only at exact
/// floating equality.
struct SwitchingPlane {
    Vec3 normal;
    double offset = 0.0;
    double on_tolerance = 0.0;

    SwitchingPlane(const Vec3& n, double d, double tol = 0.0)
        : normal(n), offset(d), on_tolerance(tol) {
        if (n.norm() == 0.0) throw std::invalid_argument("SwitchingPlane: zero normal");
        if (!std::isfinite(d)) throw std::invalid_argument("SwitchingPlane: non-finite offset");
        if (!(tol >= 0.0) || !std::isfinite(tol))
            throw std::invalid_argument("SwitchingPlane: tolerance must be >= 0");
    }

    double signed_offset(const Vec3& x) const { return normal.dot(x) - offset; }

    bool operator==(const SwitchingPlane&) const = default;
};

inline Side classify(const SwitchingPlane& plane, const Vec3& x) {
    double s = plane.signed_offset(x);
    if (std::fabs(s) <= plane.on_tolerance) return Side::On;
    return s > plane.on_tolerance ? Side::Above : Side::Below;
}

/// Relation of a point to a plane required by a guard clause. AtOrAbove and
/// AtOrBelow admit the On band, encoding guard conditions of the form
/// "x >= S" and "x <= S".
enum class PlaneRel { Below, On, Above, AtOrAbove, AtOrBelow };

enum class CoordOp { Lt, Le, Gt, Ge };

struct PlaneClause {
    SwitchingPlane plane;
    PlaneRel rel;
    bool operator==(const PlaneClause&) const = default;
};

struct CoordClause {
    int axis = 0;  // 0..2
    CoordOp op = CoordOp::Lt;
    double threshold = 0.0;
    bool operator==(const CoordClause&) const = default;
};

using GuardClause = std::variant<PlaneClause, CoordClause>;

inline bool holds(const PlaneClause& c, const Vec3& x) {
    Side s = classify(c.plane, x);
    switch (c.rel) {
        case PlaneRel::Below: return s == Side::Below;
        case PlaneRel::On: return s == Side::On;
        case PlaneRel::Above: return s == Side::Above;
        case PlaneRel::AtOrAbove: return s != Side::Below;
        default: return s != Side::Above;
    }
}

inline bool holds(const CoordClause& c, const Vec3& x) {
    double v = x[static_cast<std::size_t>(c.axis)];
    switch (c.op) {
        case CoordOp::Lt: return v < c.threshold;
        case CoordOp::Le: return v <= c.threshold;
        case CoordOp::Gt: return v > c.threshold;
        default: return v >= c.threshold;
    }
}

inline bool holds(const GuardClause& c, const Vec3& x) {
    return std::visit([&](const auto& clause) { return holds(clause, x); }, c);
}

/// Conjunction of guard clauses; an empty clause list matches everywhere.
struct RegionPredicate {
    std::vector<GuardClause> clauses;

    bool contains(const Vec3& x) const {
        for (const auto& c : clauses)
            if (!holds(c, x)) return false;
        return true;
    }

    bool operator==(const RegionPredicate&) const = default;
};

/// One branch of the PWL field: x' = a_matrix x + b_vector on the guard.
struct AffinePiece {
    RegionPredicate guard;
    Mat3 a_matrix;
    Vec3 b_vector;

    Vec3 field_at(const Vec3& x) const { return a_matrix * x + b_vector; }

    bool operator==(const AffinePiece&) const = default;
};

struct NamedPlane {
    std::string name;
    SwitchingPlane plane;
    bool operator==(const NamedPlane&) const = default;
};

/// Ordered list of guarded affine pieces; the first matching guard wins.
/// `planes` is a catalogue used for export and region labelling;
/// `region_cuts` indexes the transverse planes (S2, S4, ...) that split the
/// state space into scroll regions, ordered from the lowest region upward.
struct PWLSystem {
    std::vector<AffinePiece> pieces;
    std::vector<NamedPlane> planes;
    std::vector<std::size_t> region_cuts;
    std::string name;

    std::optional<std::size_t> match_index(const Vec3& x) const {
        for (std::size_t i = 0; i < pieces.size(); ++i)
            if (pieces[i].guard.contains(x)) return i;
        return std::nullopt;
    }

    const AffinePiece* match(const Vec3& x) const {
        auto i = match_index(x);
        return i ? &pieces[*i] : nullptr;
    }

    bool operator==(const PWLSystem&) const = default;
};

/// Raised when no piece guard holds at a query point; signals a
/// mis-specified (non-total) system.
struct NoMatchingRegion : std::runtime_error {
    explicit NoMatchingRegion(const Vec3& x)
        : std::runtime_error("no matching region at (" + std::to_string(x.x) + ", " +
                             std::to_string(x.y) + ", " + std::to_string(x.z) + ")") {}
};

inline Vec3 vector_field_at(const PWLSystem& sys, const Vec3& x) {
    const AffinePiece* p = sys.match(x);
    if (!p) throw NoMatchingRegion(x);
    return p->field_at(x);
}

/// Whether x' = a x + b has at least one rest point, i.e. a x = -b is
/// solvable. Decided by comparing the numeric ranks of A and [A | -b].
inline bool has_equilibrium(const Mat3& a, const Vec3& b, double rel_tol = kRankRelTol) {
    return numeric_rank(a, rel_tol) == numeric_rank_augmented(a, -b, rel_tol);
}

struct NotSingleZeroEigenvalue : std::runtime_error {
    NotSingleZeroEigenvalue()
        : std::runtime_error("matrix does not have zero as a simple eigenvalue") {}
};

/// True iff v is an eigenvector of the (simple) zero eigenvalue of a and is
/// independent of the column space of a. Requires zero to be a simple root
/// of the characteristic polynomial; throws NotSingleZeroEigenvalue
/// otherwise. For a simple zero eigenvalue the independence holds for every
/// such eigenvector, so the column-space test is a consistency check.
inline bool neutral_vector_independent(const Mat3& a, const Vec3& v,
                                       double rel_tol = kRankRelTol) {
    double smax = singular_values(a)[0];
    // char poly: -l^3 + tr l^2 - c2 l + det. Zero simple <=> det ~ 0, c2 != 0.
    bool det_zero = std::fabs(a.det()) <= rel_tol * smax * smax * smax;
    bool c2_nonzero = std::fabs(a.second_invariant()) > rel_tol * smax * smax;
    if (!(det_zero && c2_nonzero)) throw NotSingleZeroEigenvalue();

    double vn = v.norm();
    if (vn == 0.0) return false;
    if ((a * v).norm() > rel_tol * smax * vn) return false;  // not a 0-eigenvector
    return numeric_rank_augmented(a, v, rel_tol) > numeric_rank(a, rel_tol);
}

/// Parameters of one affine branch in the scroll normal form:
///   x' = A (x + (k1, k2, 0)) + (0, 0, v),
/// with A = [[m, -n, 0], [n, m, 0], [0, 0, eta]]. `v` is the net axial drift
/// (sign included).
struct SubsystemParams {
    double m = 0.0, n = 0.0, eta = 0.0;
    double k1 = 0.0, k2 = 0.0;
    double v = 0.0;
};

/// Closed-form state at time t for the scroll normal form. Planar part:
/// e^{mt} rotation by nt about the axis (-k1, -k2, *). Axial part:
/// x3(0) + v t when eta = 0, and e^{eta t}(x3(0) + v/eta) - v/eta otherwise.
inline Vec3 subsystem_solution(const SubsystemParams& p, const Vec3& x0, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("subsystem_solution: non-finite t");
    double g = std::exp(p.m * t);
    double c = std::cos(p.n * t), s = std::sin(p.n * t);
    double u1 = x0.x + p.k1, u2 = x0.y + p.k2;
    double x1 = g * (c * u1 - s * u2) - p.k1;
    double x2 = g * (s * u1 + c * u2) - p.k2;
    double x3 = x0.z * std::exp(p.eta * t) +
                p.v * (p.eta == 0.0 ? t : std::expm1(p.eta * t) / p.eta);
    return Vec3(x1, x2, x3);
}

/// Affine rest point of one piece, ignoring its guard. Pieces with singular
/// a_matrix carry no point and are flagged singular.
struct VirtualEquilibrium {
    std::size_t piece_index = 0;
    bool singular = false;
    std::optional<Vec3> point;
    bool inside_guard = false;
};

inline std::vector<VirtualEquilibrium> virtual_equilibria(const PWLSystem& sys,
                                                          double rel_tol = kRankRelTol) {
    std::vector<VirtualEquilibrium> out;
    out.reserve(sys.pieces.size());
    for (std::size_t i = 0; i < sys.pieces.size(); ++i) {
        const AffinePiece& piece = sys.pieces[i];
        VirtualEquilibrium ve;
        ve.piece_index = i;
        auto pt = solve3(piece.a_matrix, -piece.b_vector, rel_tol);
        if (!pt) {
            ve.singular = true;
        } else {
            ve.point = *pt;
            ve.inside_guard = piece.guard.contains(*pt);
        }
        out.push_back(ve);
    }
    return out;
}

namespace detail {

/// Closed/open interval of a scalar parameter t, narrowed by linear
/// constraints a t + b REL 0. Used to intersect a line of affine rest points
/// with a guard region exactly.
struct TInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_strict = false, hi_strict = false;
    bool empty = false;

    void clip_below(double v, bool strict) {  // t > v or t >= v
        if (empty) return;
        if (v > lo || (v == lo && strict && !lo_strict)) {
            lo = v;
            lo_strict = strict;
        }
        normalize();
    }
    void clip_above(double v, bool strict) {  // t < v or t <= v
        if (empty) return;
        if (v < hi || (v == hi && strict && !hi_strict)) {
            hi = v;
            hi_strict = strict;
        }
        normalize();
    }
    void normalize() {
        if (lo > hi || (lo == hi && (lo_strict || hi_strict))) empty = true;
    }
    bool feasible() const { return !empty; }

    double pick() const {
        bool lo_fin = std::isfinite(lo), hi_fin = std::isfinite(hi);
        if (lo_fin && hi_fin) return lo == hi ? lo : 0.5 * (lo + hi);
        if (lo_fin) return lo + 1.0;
        if (hi_fin) return hi - 1.0;
        return 0.0;
    }
};

enum class LinRel { Lt, Le, Gt, Ge };

inline void apply_linear(TInterval& iv, double a, double b, LinRel rel) {
    if (iv.empty) return;
    if (a == 0.0) {
        bool ok = false;
        switch (rel) {
            case LinRel::Lt: ok = b < 0.0; break;
            case LinRel::Le: ok = b <= 0.0; break;
            case LinRel::Gt: ok = b > 0.0; break;
            case LinRel::Ge: ok = b >= 0.0; break;
        }
        if (!ok) iv.empty = true;
        return;
    }
    double r = -b / a;
    bool flipped = a < 0.0;
    switch (rel) {
        case LinRel::Lt: flipped ? iv.clip_below(r, true) : iv.clip_above(r, true); break;
        case LinRel::Le: flipped ? iv.clip_below(r, false) : iv.clip_above(r, false); break;
        case LinRel::Gt: flipped ? iv.clip_above(r, true) : iv.clip_below(r, true); break;
        case LinRel::Ge: flipped ? iv.clip_above(r, false) : iv.clip_below(r, false); break;
    }
}

/// Restrict the line x(t) = base + t dir to one guard clause.
inline void apply_clause(TInterval& iv, const GuardClause& clause, const Vec3& base,
                         const Vec3& dir) {
    if (const auto* pc = std::get_if<PlaneClause>(&clause)) {
        double a = pc->plane.normal.dot(dir);
        double b = pc->plane.signed_offset(base);
        double tol = pc->plane.on_tolerance;
        switch (pc->rel) {
            case PlaneRel::Below: apply_linear(iv, a, b + tol, LinRel::Lt); break;
            case PlaneRel::On:
                apply_linear(iv, a, b + tol, LinRel::Ge);
                apply_linear(iv, a, b - tol, LinRel::Le);
                break;
            case PlaneRel::Above: apply_linear(iv, a, b - tol, LinRel::Gt); break;
            case PlaneRel::AtOrAbove: apply_linear(iv, a, b + tol, LinRel::Ge); break;
            case PlaneRel::AtOrBelow: apply_linear(iv, a, b - tol, LinRel::Le); break;
        }
    } else {
        const auto& cc = std::get<CoordClause>(clause);
        double a = dir[static_cast<std::size_t>(cc.axis)];
        double b = base[static_cast<std::size_t>(cc.axis)] - cc.threshold;
        switch (cc.op) {
            case CoordOp::Lt: apply_linear(iv, a, b, LinRel::Lt); break;
            case CoordOp::Le: apply_linear(iv, a, b, LinRel::Le); break;
            case CoordOp::Gt: apply_linear(iv, a, b, LinRel::Gt); break;
            case CoordOp::Ge: apply_linear(iv, a, b, LinRel::Ge); break;
        }
    }
}

}  // namespace detail

/// Equilibrium analysis of one piece against its own guard.
struct PieceEquilibria {
    std::size_t piece_index = 0;
    int a_rank = 3;
    bool affine_has_solutions = false;
    std::optional<Vec3> witness;  // a rest point; inside the guard when any is
    bool intersects_guard = false;
    bool exact = true;  // false when decided by sampling (null dim >= 2)
};

struct EquilibriumReport {
    std::vector<PieceEquilibria> pieces;
    bool equilibrium_free = true;
    bool exact = true;
};

/// Decides whether each piece's affine rest-point set meets its own guard.
/// The PWL system is equilibrium-free iff no piece's set does. Point sets
/// (invertible A) and line sets (rank-2 A) are decided exactly; null spaces
/// of dimension >= 2 fall back to a sampled probe and are flagged inexact.
inline EquilibriumReport analyze_equilibria(const PWLSystem& sys,
                                            double rel_tol = kRankRelTol) {
    EquilibriumReport report;
    for (std::size_t i = 0; i < sys.pieces.size(); ++i) {
        const AffinePiece& piece = sys.pieces[i];
        PieceEquilibria pe;
        pe.piece_index = i;
        pe.a_rank = numeric_rank(piece.a_matrix, rel_tol);
        auto sol = solve_affine_set(piece.a_matrix, -piece.b_vector, rel_tol);
        pe.affine_has_solutions = sol.consistent;
        if (sol.consistent) {
            std::size_t dim = sol.null_basis.size();
            if (dim == 0) {
                pe.witness = sol.particular;
                pe.intersects_guard = piece.guard.contains(sol.particular);
            } else if (dim == 1) {
                detail::TInterval iv;
                for (const auto& clause : piece.guard.clauses)
                    detail::apply_clause(iv, clause, sol.particular, sol.null_basis[0]);
                pe.intersects_guard = iv.feasible();
                pe.witness = pe.intersects_guard
                                 ? sol.particular + sol.null_basis[0] * iv.pick()
                                 : sol.particular;
            } else {
                // Sampled probe over the affine solution set.
                pe.exact = false;
                double radius = 10.0 * (1.0 + sol.particular.norm());
                const int steps = 21;
                auto coord = [&](int k) { return radius * (2.0 * k / (steps - 1) - 1.0); };
                pe.witness = sol.particular;
                for (int k1 = 0; k1 < steps && !pe.intersects_guard; ++k1) {
                    for (int k2 = 0; k2 < (dim > 1 ? steps : 1) && !pe.intersects_guard; ++k2) {
                        Vec3 x = sol.particular + sol.null_basis[0] * coord(k1);
                        if (dim > 1) x += sol.null_basis[1] * coord(k2);
                        if (dim > 2) {
                            for (int k3 = 0; k3 < steps; ++k3) {
                                Vec3 y = x + sol.null_basis[2] * coord(k3);
                                if (piece.guard.contains(y)) {
                                    pe.intersects_guard = true;
                                    pe.witness = y;
                                    break;
                                }
                            }
                        } else if (piece.guard.contains(x)) {
                            pe.intersects_guard = true;
                            pe.witness = x;
                        }
                    }
                }
            }
        }
        if (pe.affine_has_solutions && pe.intersects_guard) report.equilibrium_free = false;
        if (!pe.exact) report.exact = false;
        report.pieces.push_back(std::move(pe));
    }
    return report;
}

}  // namespace scrollforge

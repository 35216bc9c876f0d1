#pragma once

// Chaos diagnostics: the 0-1 test (translation variables p_c, q_c, mean-square
// displacement, correlation-method K_c, median K), a two-trajectory largest
// Lyapunov exponent, symbolic region sequences, and occupancy statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scrollforge/integrate.hpp"
#include "scrollforge/systems.hpp"

namespace scrollforge {

struct DegenerateSeries : std::runtime_error {
    DegenerateSeries() : std::runtime_error("0-1 test input series is degenerate") {}
};

struct EmptyTrajectory : std::runtime_error {
    EmptyTrajectory() : std::runtime_error("trajectory has no samples") {}
};

/// Configuration of the 0-1 test. K_c is the correlation coefficient between
/// n and the mean-square displacement of the translation variables over
/// n <= msd_cutoff * N. With subtract_oscillation set (the default), the
/// bounded oscillatory term driven by the series mean is removed from the
/// displacement before correlating, which stabilizes K_c for signals with a
/// nonzero mean; disable it to correlate the raw displacement.
struct Chaos01Config {
    std::vector<double> c_values;
    int series_length = 2000;
    double msd_cutoff = 0.1;
    bool subtract_oscillation = true;
};

/// Uniform draws from (lo, hi), seeded and reproducible. The default interval
/// (pi/5, 4pi/5) avoids the resonant neighbourhoods of 0, pi and 2pi.
inline std::vector<double> sample_c_values(int count, std::uint64_t seed,
                                           double lo = std::numbers::pi / 5.0,
                                           double hi = 4.0 * std::numbers::pi / 5.0) {
    if (count < 1) throw std::invalid_argument("sample_c_values: count must be >= 1");
    if (!(lo > 0.0 && hi < 2.0 * std::numbers::pi && lo < hi))
        throw std::invalid_argument("sample_c_values: need 0 < lo < hi < 2*pi");
    std::mt19937_64 rng(seed);
    std::vector<double> cs(static_cast<std::size_t>(count));
    for (auto& c : cs) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        c = lo + (hi - lo) * u;
    }
    return cs;
}

/// Translation variables p_c(n) = sum_{j=1..n} phi(j) cos(jc) and the sin
/// analogue, together with the stats of the driving series needed downstream.
struct TranslationSeries {
    double c = 0.0;
    std::vector<double> p, q;
    double phi_mean = 0.0;
    double phi_variance = 0.0;
};

inline TranslationSeries translation_series(std::span<const double> phi, double c) {
    TranslationSeries ts;
    ts.c = c;
    ts.p.reserve(phi.size());
    ts.q.reserve(phi.size());
    double sp = 0.0, sq = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        double j = static_cast<double>(i + 1);
        sp += phi[i] * std::cos(j * c);
        sq += phi[i] * std::sin(j * c);
        ts.p.push_back(sp);
        ts.q.push_back(sq);
        sum += phi[i];
    }
    if (!phi.empty()) {
        double n = static_cast<double>(phi.size());
        ts.phi_mean = sum / n;
        double acc = 0.0;  // centered pass keeps a constant series at ulp level
        for (double v : phi) acc += (v - ts.phi_mean) * (v - ts.phi_mean);
        ts.phi_variance = acc / n;
    }
    return ts;
}

namespace detail {

/// Observable phi(j) = x3 at samples j = 1..n (the t=0 sample is the initial
/// condition, not part of the series).
inline std::vector<double> observable_series(const Trajectory& traj, int n) {
    if (traj.size() < static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("trajectory too short for requested series length");
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) phi[static_cast<std::size_t>(j - 1)] = traj.states[static_cast<std::size_t>(j)].z;
    return phi;
}

}  // namespace detail

/// Trajectory observable route: phi(j) = x3 at samples j = 1..n.
inline TranslationSeries translation_series(const Trajectory& traj, double c,
                                            int series_length = -1) {
    if (series_length < 0) series_length = static_cast<int>(traj.size()) - 1;
    return translation_series(detail::observable_series(traj, series_length), c);
}

namespace detail {

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateSeries();
    return sxy / std::sqrt(sxx * syy);
}

inline double kc_from_sums(std::span<const double> p, std::span<const double> q,
                           const Chaos01Config& cfg,
                           std::optional<std::pair<double, double>> mean_and_c) {
    if (p.size() != q.size() || p.empty())
        throw std::invalid_argument("growth_rate_Kc: p and q must be equal-length, nonempty");
    const std::size_t n_total = p.size();
    std::size_t n_cut = static_cast<std::size_t>(cfg.msd_cutoff * static_cast<double>(n_total));
    n_cut = std::clamp<std::size_t>(n_cut, 1, n_total - 2);

    std::vector<double> ns(n_cut), msd(n_cut);
    for (std::size_t n = 1; n <= n_cut; ++n) {
        double acc = 0.0;
        std::size_t count = n_total - n;
        for (std::size_t j = 0; j < count; ++j) {
            double dp = p[j + n] - p[j];
            double dq = q[j + n] - q[j];
            acc += dp * dp + dq * dq;
        }
        double m = acc / static_cast<double>(count);
        if (mean_and_c) {
            auto [mean, c] = *mean_and_c;
            m -= mean * mean * (1.0 - std::cos(static_cast<double>(n) * c)) / (1.0 - std::cos(c));
        }
        ns[n - 1] = static_cast<double>(n);
        msd[n - 1] = m;
    }
    return pearson(ns, msd);
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void validate(const Chaos01Config& cfg) {
    if (cfg.series_length < 100)
        throw std::invalid_argument("Chaos01Config: series length must be >= 100");
    if (!(cfg.msd_cutoff > 0.0 && cfg.msd_cutoff < 1.0))
        throw std::invalid_argument("Chaos01Config: msd_cutoff must lie in (0, 1)");
    if (cfg.c_values.empty()) throw std::invalid_argument("Chaos01Config: no c values");
    for (double c : cfg.c_values)
        if (!(c > 0.0 && c < 2.0 * std::numbers::pi))
            throw std::invalid_argument("Chaos01Config: c must lie in (0, 2*pi)");
}

}  // namespace detail

/// Asymptotic growth rate K_c of one translation pair. Throws
/// DegenerateSeries when the driving series is constant or the displacement
/// carries no variance.
inline double growth_rate_Kc(const TranslationSeries& ts, const Chaos01Config& cfg) {
    // constant up to rounding: variance at the level of squared ulps of the rms
    if (ts.phi_variance <= 1e-24 * (ts.phi_variance + ts.phi_mean * ts.phi_mean))
        throw DegenerateSeries();
    std::optional<std::pair<double, double>> osc;
    if (cfg.subtract_oscillation) osc = {ts.phi_mean, ts.c};
    return detail::kc_from_sums(ts.p, ts.q, cfg, osc);
}

/// Raw-sum variant: correlates n with the unmodified mean-square displacement
/// of the given cumulative sums.
inline double growth_rate_Kc(std::span<const double> p, std::span<const double> q,
                             const Chaos01Config& cfg) {
    return detail::kc_from_sums(p, q, cfg, std::nullopt);
}

struct KcResult {
    double k_median = 0.0;
    std::vector<std::pair<double, double>> k_per_c;  // sorted by c
};

/// Runs the 0-1 test on the x3 observable of a uniformly sampled trajectory:
/// K_c per configured c, reduced to the median. Results are independent of
/// the order of c_values (sorted before reduction).
inline KcResult chaos01_K(const Trajectory& traj, const Chaos01Config& cfg) {
    detail::validate(cfg);
    std::vector<double> phi = detail::observable_series(traj, cfg.series_length);

    std::vector<double> cs = cfg.c_values;
    std::sort(cs.begin(), cs.end());

    KcResult out;
    out.k_per_c.reserve(cs.size());
    std::vector<double> ks;
    ks.reserve(cs.size());
    for (double c : cs) {
        TranslationSeries ts = translation_series(phi, c);
        double kc = growth_rate_Kc(ts, cfg);
        out.k_per_c.emplace_back(c, kc);
        ks.push_back(kc);
    }
    out.k_median = detail::median_of(std::move(ks));
    return out;
}

/// Largest Lyapunov exponent by two-trajectory renormalization: a companion
/// orbit offset by d0 is rescaled back to d0 every renorm_every steps and the
/// log stretch factors are averaged over the post-transient window. Returns
/// nats per unit time. The pair runs through the transient (aligning the
/// offset with the dominant direction) before accumulation starts.
///
/// For switched fields the separation must stay large enough relative to the
/// step that the pair's surface crossings resolve into different steps:
/// expansion contributed at a crossing scales with the crossing-time offset
/// (normal separation / normal speed) and is lost when both orbits cross
/// within one step. d0 / (step * normal speed) of order one or larger keeps
/// that contribution; the defaults here pair with steps around 1e-4 for the
/// factory systems. Smooth systems are insensitive to this choice.
inline double lle_benettin(const PWLSystem& sys, const IntegrationConfig& cfg, double d0 = 1e-3,
                           int renorm_every = 1, double transient = 50.0) {
    detail::validate(cfg);
    if (!(d0 > 0.0)) throw std::invalid_argument("lle_benettin: d0 must be > 0");
    if (renorm_every < 1) throw std::invalid_argument("lle_benettin: renorm_every must be >= 1");
    if (!(transient >= 0.0)) throw std::invalid_argument("lle_benettin: transient must be >= 0");

    const double h = cfg.step;
    const std::int64_t trans_steps = std::llround(transient / h);
    const std::int64_t meas_steps = std::llround(cfg.duration / h);
    if (meas_steps < renorm_every)
        throw std::invalid_argument("lle_benettin: duration shorter than one renormalization");

    Vec3 x = cfg.initial_state;
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    Vec3 y = x + Vec3(inv_sqrt3, inv_sqrt3, inv_sqrt3) * d0;

    double log_sum = 0.0;
    std::int64_t measured_chunks = 0;
    for (std::int64_t k = 1; k <= trans_steps + meas_steps; ++k) {
        x = rk4_step(sys, x, h);
        y = rk4_step(sys, y, h);
        if (x.norm_inf() > cfg.divergence_bound)
            throw Divergence(static_cast<double>(k) * h, x.norm_inf());
        if (k % renorm_every == 0) {
            Vec3 delta = y - x;
            double d = delta.norm();
            if (d <= 0.0) throw std::runtime_error("lle_benettin: trajectories coincided");
            if (k - renorm_every >= trans_steps) {
                log_sum += std::log(d / d0);
                ++measured_chunks;
            }
            y = x + delta * (d0 / d);
        }
    }
    return log_sum / (static_cast<double>(measured_chunks) * renorm_every * h);
}

/// Labels states by their scroll region: '1' below the first transverse cut,
/// '3' between the first and second, '5' above the second, and so on.
struct ScrollRegionScheme {
    std::vector<SwitchingPlane> cuts;  // ordered from the lowest region upward

    char label(const Vec3& x) const {
        int above = 0;
        for (const auto& p : cuts)
            if (classify(p, x) != Side::Below) ++above;
        return static_cast<char>('1' + 2 * above);
    }

    RegionLabeler labeler() const {
        return [scheme = *this](const Vec3& x) { return scheme.label(x); };
    }

    static ScrollRegionScheme for_system(const PWLSystem& sys) {
        ScrollRegionScheme scheme;
        for (std::size_t idx : sys.region_cuts) scheme.cuts.push_back(sys.planes[idx].plane);
        return scheme;
    }
};

/// Itinerary of regions visited: one symbol per region entry, consecutive
/// repeats collapsed.
inline std::string symbol_sequence(const Trajectory& traj) {
    std::string out;
    for (char r : traj.regions)
        if (out.empty() || out.back() != r) out.push_back(r);
    return out;
}

/// Same, relabelling the stored states through the given scheme.
inline std::string symbol_sequence(const Trajectory& traj, const ScrollRegionScheme& scheme) {
    std::string out;
    for (const Vec3& x : traj.states) {
        char r = scheme.label(x);
        if (out.empty() || out.back() != r) out.push_back(r);
    }
    return out;
}

/// Fraction of samples spent in each region; fractions sum to 1 up to
/// rounding.
inline std::map<char, double> occupancy(const Trajectory& traj) {
    if (traj.empty()) throw EmptyTrajectory();
    std::map<char, std::size_t> counts;
    for (char r : traj.regions) ++counts[r];
    std::map<char, double> out;
    for (auto [r, c] : counts)
        out[r] = static_cast<double>(c) / static_cast<double>(traj.size());
    return out;
}

/// Aggregate chaos diagnostics of one run. lle is in nats per unit time;
/// k fields are absent when the corresponding analysis was disabled.
struct ChaosReport {
    std::optional<double> lle;
    std::optional<double> k_median;
    std::vector<std::pair<double, double>> k_per_c;
    std::string symbols;
    std::map<char, double> region_occupancy;
};

}  // namespace scrollforge

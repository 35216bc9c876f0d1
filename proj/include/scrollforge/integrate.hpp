#pragma once

// Fixed-step classical RK4 over PWL vector fields, with subsampled trajectory
// recording, per-sample region labels, and transition events. The field is
// integrated as-is across switching planes (no event localization); stage
// evaluations may dispatch to different pieces within one step.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrollforge/pwl.hpp"

namespace scrollforge {

struct IntegrationConfig {
    double step = 0.01;
    double duration = 0.0;
    int sample_every = 1;
    Vec3 initial_state{};
    double divergence_bound = 1e6;
};

/// Raised when the state norm exceeds the divergence bound; converts runaway
/// orbits into a clean error instead of NaN propagation.
struct Divergence : std::runtime_error {
    Divergence(double t, double norm)
        : std::runtime_error("state diverged at t=" + std::to_string(t) +
                             " (|x|=" + std::to_string(norm) + ")") {}
};

struct Transition {
    double time = 0.0;
    char from = '1';
    char to = '1';
    bool operator==(const Transition&) const = default;
};

/// Uniformly sampled orbit with one region label per sample and the list of
/// label changes at sample resolution.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec3> states;
    std::string regions;
    std::vector<Transition> transitions;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    double sample_dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

using RegionLabeler = std::function<char(const Vec3&)>;

inline Vec3 rk4_step(const PWLSystem& sys, const Vec3& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step must be > 0");
    Vec3 k1 = vector_field_at(sys, x);
    Vec3 k2 = vector_field_at(sys, x + k1 * (h / 2.0));
    Vec3 k3 = vector_field_at(sys, x + k2 * (h / 2.0));
    Vec3 k4 = vector_field_at(sys, x + k3 * h);
    return x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
}

namespace detail {
inline void validate(const IntegrationConfig& cfg) {
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
        throw std::invalid_argument("IntegrationConfig: step must be > 0");
    if (!(cfg.duration >= cfg.step) || !std::isfinite(cfg.duration))
        throw std::invalid_argument("IntegrationConfig: duration must be >= step");
    if (cfg.sample_every < 1)
        throw std::invalid_argument("IntegrationConfig: sample_every must be >= 1");
    if (!(cfg.divergence_bound > 0.0))
        throw std::invalid_argument("IntegrationConfig: divergence bound must be > 0");
}
}  // namespace detail

/// Integrates duration/step RK4 steps from the initial state, recording every
/// sample_every-th state with its region label. A transition is appended
/// whenever the label changes between consecutive samples.
inline Trajectory integrate(const PWLSystem& sys, const IntegrationConfig& cfg,
                            const RegionLabeler& labeler = {}) {
    detail::validate(cfg);
    auto label = [&](const Vec3& x) { return labeler ? labeler(x) : '1'; };

    const std::int64_t steps = std::llround(cfg.duration / cfg.step);
    if (steps < 1) throw std::invalid_argument("IntegrationConfig: duration too short");

    Trajectory traj;
    const std::size_t expected = static_cast<std::size_t>(steps / cfg.sample_every) + 1;
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    traj.regions.reserve(expected);

    Vec3 x = cfg.initial_state;
    auto record = [&](double t) {
        char r = label(x);
        if (!traj.regions.empty() && traj.regions.back() != r)
            traj.transitions.push_back({t, traj.regions.back(), r});
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.regions.push_back(r);
    };

    record(0.0);
    for (std::int64_t k = 1; k <= steps; ++k) {
        x = rk4_step(sys, x, cfg.step);
        double t = static_cast<double>(k) * cfg.step;
        if (x.norm_inf() > cfg.divergence_bound) throw Divergence(t, x.norm_inf());
        if (k % cfg.sample_every == 0) record(t);
    }
    return traj;
}

/// Keeps every stride-th sample (always including the first) and rebuilds
/// labels and transitions at the coarser resolution.
inline Trajectory subsample(const Trajectory& traj, int stride) {
    if (stride < 1) throw std::invalid_argument("subsample: stride must be >= 1");
    Trajectory out;
    for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
        char r = traj.regions[i];
        if (!out.regions.empty() && out.regions.back() != r)
            out.transitions.push_back({traj.times[i], out.regions.back(), r});
        out.times.push_back(traj.times[i]);
        out.states.push_back(traj.states[i]);
        out.regions.push_back(r);
    }
    return out;
}

}  // namespace scrollforge

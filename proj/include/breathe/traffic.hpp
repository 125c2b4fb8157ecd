#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "breathe/core.hpp"

namespace breathe {

struct Hotspot {
    Vec2 center;
    double weight = 1.0;
    double spread = 0.0;  // Gaussian sigma, meters
};

struct HotspotKeyframe {
    int period = 1;
    Hotspot hotspot;
};

/// Hotspot whose center, weight and spread move piecewise-linearly between
/// keyframes and hold their end values outside the keyframe range.
struct HotspotTrack {
    std::vector<HotspotKeyframe> keys;

    Hotspot at(int period) const;
};

enum class TrafficMode { free, proportional };

struct TrafficScenario {
    int periods = 1;
    std::vector<HotspotTrack> tracks;
    // Share of users drawn uniformly over the area, before normalization.
    // A non-degenerate area also bounds hotspot users.
    double background_weight = 0.0;
    Vec2 area_min;
    Vec2 area_max;
    // Users per period. Empty means base_users in every period.
    std::vector<std::size_t> total_users;
    std::size_t base_users = 0;
    TrafficMode mode = TrafficMode::free;
    // Proportional mode: geometry frozen from k_star on, user count scaled by beta[k-1].
    int k_star = 1;
    std::vector<double> beta;
    int demand = 1;
    std::uint64_t seed = 1;

    /// Hotspots of period k with weights normalized so that hotspots plus
    /// background sum to one.
    std::vector<Hotspot> hotspots(int k) const;
    double background_share(int k) const;
    std::size_t users(int k) const;
    /// Period whose geometry period k uses (k itself in free mode).
    int geometry_period(int k) const;
    void check() const;
};

struct PathlossModel {
    double exponent = 3.76;
    double reference_loss = 15.3;  // dB at 1 m
    double shadowing_sigma = 6.0;  // dB
    std::uint64_t seed = 7;

    double attenuation(double meters, double shadowing) const;
    void check() const;
};

struct UserSample {
    Vec2 position;
    std::vector<double> attenuation;  // dB, one per antenna
    int demand = 1;
};

/// Monte-Carlo realization of the period-k traffic density. User u of a
/// period draws from a stream keyed by (seed, geometry period, u), so in
/// proportional mode periods share their common user prefix.
std::vector<UserSample> sample_users(const TrafficScenario& scenario, const PathlossModel& model,
                                     const NetworkTopology& topo, int k);

/// Serving antenna per user: argmax of p_i - a_i, lowest index on ties.
std::vector<AntennaIndex> assign_users(std::span<const UserSample> users, std::span<const double> powers);

long long total_traffic(std::span<const UserSample> users);

void write_users_csv(std::ostream& os, std::span<const UserSample> users, int period);

}  // namespace breathe

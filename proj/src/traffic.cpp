#include "breathe/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "breathe/rng.hpp"

namespace breathe {

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

double standard_normal(StreamRng& rng) {
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

Hotspot HotspotTrack::at(int period) const {
    if (keys.empty()) throw InvalidArgument("hotspot track has no keyframes");
    if (period <= keys.front().period) return keys.front().hotspot;
    if (period >= keys.back().period) return keys.back().hotspot;
    auto hi = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.period >= period; });
    auto lo = hi - 1;
    double t = static_cast<double>(period - lo->period) / static_cast<double>(hi->period - lo->period);
    const auto& a = lo->hotspot;
    const auto& b = hi->hotspot;
    return Hotspot{{lerp(a.center.x, b.center.x, t), lerp(a.center.y, b.center.y, t)},
                   lerp(a.weight, b.weight, t),
                   lerp(a.spread, b.spread, t)};
}

int TrafficScenario::geometry_period(int k) const {
    if (mode == TrafficMode::proportional && k >= k_star) return k_star;
    return k;
}

std::vector<Hotspot> TrafficScenario::hotspots(int k) const {
    int g = geometry_period(k);
    std::vector<Hotspot> out;
    double total = background_weight;
    for (const auto& t : tracks) {
        out.push_back(t.at(g));
        total += out.back().weight;
    }
    if (total > 0.0)
        for (auto& h : out) h.weight /= total;
    return out;
}

double TrafficScenario::background_share(int k) const {
    int g = geometry_period(k);
    double total = background_weight;
    for (const auto& t : tracks) total += t.at(g).weight;
    return total > 0.0 ? background_weight / total : 1.0;
}

std::size_t TrafficScenario::users(int k) const {
    if (k < 1 || k > periods)
        throw InvalidArgument("traffic: period " + std::to_string(k) + " outside scenario horizon");
    if (mode == TrafficMode::proportional && k >= k_star) {
        double b = beta.empty() ? 1.0 : beta.at(static_cast<std::size_t>(k - 1));
        std::size_t base = total_users.empty() ? base_users : total_users.at(static_cast<std::size_t>(k_star - 1));
        return static_cast<std::size_t>(std::llround(static_cast<double>(base) * b));
    }
    return total_users.empty() ? base_users : total_users.at(static_cast<std::size_t>(k - 1));
}

void TrafficScenario::check() const {
    if (periods < 1) throw InvalidArgument("traffic: periods must be >= 1");
    if (!total_users.empty() && total_users.size() != static_cast<std::size_t>(periods))
        throw InvalidArgument("traffic: total_users must list one count per period");
    if (mode == TrafficMode::proportional) {
        if (k_star < 1 || k_star > periods) throw InvalidArgument("traffic: k_star outside horizon");
        if (!beta.empty() && beta.size() != static_cast<std::size_t>(periods))
            throw InvalidArgument("traffic: beta must list one value per period");
        for (double b : beta)
            if (!(b > 0.0)) throw InvalidArgument("traffic: beta must be positive");
    }
    if (demand < 1) throw InvalidArgument("traffic: demand must be >= 1");
    if (background_weight < 0.0) throw InvalidArgument("traffic: negative background weight");
    for (const auto& t : tracks) {
        if (t.keys.empty()) throw InvalidArgument("traffic: hotspot track without keyframes");
        for (std::size_t i = 1; i < t.keys.size(); ++i)
            if (t.keys[i].period <= t.keys[i - 1].period)
                throw InvalidArgument("traffic: keyframes must have increasing periods");
        for (const auto& key : t.keys)
            if (key.hotspot.weight < 0.0 || key.hotspot.spread < 0.0)
                throw InvalidArgument("traffic: hotspot weight and spread must be non-negative");
    }
    if (tracks.empty() && background_weight <= 0.0)
        throw InvalidArgument("traffic: no hotspots and no background");
}

double PathlossModel::attenuation(double meters, double shadowing) const {
    return reference_loss + 10.0 * exponent * std::log10(std::max(meters, 1.0)) + shadowing;
}

void PathlossModel::check() const {
    if (exponent < 2.0) throw InvalidArgument("pathloss: exponent must be >= 2");
    if (shadowing_sigma < 0.0) throw InvalidArgument("pathloss: shadowing sigma must be >= 0");
}

std::vector<UserSample> sample_users(const TrafficScenario& scenario, const PathlossModel& model,
                                     const NetworkTopology& topo, int k) {
    const std::size_t count = scenario.users(k);
    const int g = scenario.geometry_period(k);
    const auto spots = scenario.hotspots(k);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& h : spots) cumulative.push_back(acc += h.weight);

    const std::size_t n = topo.size();
    const bool bounded = scenario.area_max.x > scenario.area_min.x && scenario.area_max.y > scenario.area_min.y;
    auto inside = [&](Vec2 v) {
        return v.x >= scenario.area_min.x && v.x <= scenario.area_max.x && v.y >= scenario.area_min.y &&
               v.y <= scenario.area_max.y;
    };
    std::vector<UserSample> users(count);
    for (std::size_t u = 0; u < count; ++u) {
        StreamRng rng(scenario.seed, static_cast<std::uint64_t>(g), u);
        auto& user = users[u];
        double pick = rng.uniform();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        if (it == cumulative.end()) {
            user.position = {lerp(scenario.area_min.x, scenario.area_max.x, rng.uniform()),
                             lerp(scenario.area_min.y, scenario.area_max.y, rng.uniform())};
        } else {
            const auto& h = spots[static_cast<std::size_t>(it - cumulative.begin())];
            // Hotspot users are redrawn until they land inside the service area.
            for (int attempt = 0; attempt < 64; ++attempt) {
                double dx = standard_normal(rng);
                double dy = standard_normal(rng);
                user.position = {h.center.x + h.spread * dx, h.center.y + h.spread * dy};
                if (!bounded || inside(user.position)) break;
            }
            if (bounded)
                user.position = {std::clamp(user.position.x, scenario.area_min.x, scenario.area_max.x),
                                 std::clamp(user.position.y, scenario.area_min.y, scenario.area_max.y)};
        }
        user.demand = scenario.demand;

        StreamRng shadow(model.seed, static_cast<std::uint64_t>(g), u, 0x5ad0ULL);
        user.attenuation.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = model.shadowing_sigma > 0.0 ? model.shadowing_sigma * standard_normal(shadow) : 0.0;
            user.attenuation[i] = model.attenuation(distance(user.position, topo.antennas[i].position), s);
        }
    }
    return users;
}

std::vector<AntennaIndex> assign_users(std::span<const UserSample> users, std::span<const double> powers) {
    std::vector<AntennaIndex> out(users.size());
    if (!users.empty() && powers.empty()) throw InvalidArgument("assign_users: no antennas");
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto& a = users[u].attenuation;
        if (a.size() != powers.size()) throw InvalidArgument("assign_users: attenuation/power size mismatch");
        AntennaIndex best = 0;
        double best_rx = powers[0] - a[0];
        for (std::size_t i = 1; i < a.size(); ++i) {
            double rx = powers[i] - a[i];
            if (rx > best_rx) {
                best_rx = rx;
                best = i;
            }
        }
        out[u] = best;
    }
    return out;
}

long long total_traffic(std::span<const UserSample> users) {
    long long z = 0;
    for (const auto& u : users) z += u.demand;
    return z;
}

void write_users_csv(std::ostream& os, std::span<const UserSample> users, int period) {
    os << "user_id,x,y,demand,period\n";
    for (std::size_t u = 0; u < users.size(); ++u)
        os << u + 1 << ',' << users[u].position.x << ',' << users[u].position.y << ',' << users[u].demand
           << ',' << period << '\n';
}

}  // namespace breathe

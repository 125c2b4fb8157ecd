#include <cmath>
#include <sstream>

#include "doctest.h"
#include "breathe/harness.hpp"
#include "breathe/traffic.hpp"

using namespace breathe;

namespace {

NetworkTopology line(std::size_t n) {
    NetworkTopology t;
    for (std::size_t i = 0; i < n; ++i) t.antennas.push_back({40, 46, 100, {400.0 * static_cast<double>(i), 0}});
    t.neighbours.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        t.neighbours[i].push_back(i + 1);
        t.neighbours[i + 1].push_back(i);
    }
    return t;
}

UserSample user(std::vector<double> a) { return {{}, std::move(a), 1}; }

}  // namespace

TEST_CASE("hotspot track interpolates and holds") {
    HotspotTrack t{{{2, {{0, 0}, 1.0, 100}}, {6, {{400, 800}, 0.0, 300}}}};
    auto h = t.at(4);
    CHECK(h.center.x == doctest::Approx(200));
    CHECK(h.center.y == doctest::Approx(400));
    CHECK(h.weight == doctest::Approx(0.5));
    CHECK(h.spread == doctest::Approx(200));
    CHECK(t.at(1).center.x == 0.0);
    CHECK(t.at(9).center.y == 800.0);
}

TEST_CASE("assignment is argmax of p - a with lowest index on ties") {
    std::vector<UserSample> us{user({100, 90, 95}), user({90, 90, 120}), user({80, 100, 70})};
    std::vector<double> p{40, 40, 40};
    auto a = assign_users(us, p);
    CHECK(a == std::vector<AntennaIndex>{1, 0, 2});
    // Raising antenna 1 by 10 dB pulls user 2 but not user 3 (a gap of 30 dB).
    p[1] = 50;
    a = assign_users(us, p);
    CHECK(a == std::vector<AntennaIndex>{1, 1, 2});
    CHECK(assign_users(std::vector<UserSample>{}, p).empty());
    CHECK_THROWS_AS(assign_users(us, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("sampling is deterministic and hotspot share is binomial") {
    auto topo = line(4);
    TrafficScenario s;
    s.periods = 2;
    s.base_users = 20000;
    s.background_weight = 1.0;
    s.area_min = {-200, -200};
    s.area_max = {1400, 200};
    s.tracks = {HotspotTrack{{{1, {{600, 0}, 1.0, 50}}}}};
    s.seed = 9;
    PathlossModel m;
    auto a = sample_users(s, m, topo, 1);
    auto b = sample_users(s, m, topo, 1);
    REQUIRE(a.size() == 20000);
    CHECK(a[123].position.x == b[123].position.x);
    CHECK(a[123].attenuation == b[123].attenuation);
    // Users within 4 sigma of the center: hotspot (p = 1/2) plus a sliver of background.
    std::size_t near = 0;
    for (const auto& u : a)
        if (std::hypot(u.position.x - 600, u.position.y) < 200) ++near;
    const double p = 0.5 + 0.5 * (3.14159265 * 200 * 200) / (1600.0 * 400.0);
    const double mean = 20000 * p, sd = std::sqrt(20000 * p * (1 - p));
    CHECK(std::abs(static_cast<double>(near) - mean) < 5 * sd);
    for (const auto& u : a) {
        REQUIRE(u.position.x >= -200);
        REQUIRE(u.position.x <= 1400);
    }
}

TEST_CASE("proportional mode shares the common user prefix") {
    auto topo = line(3);
    TrafficScenario s;
    s.periods = 3;
    s.mode = TrafficMode::proportional;
    s.k_star = 1;
    s.base_users = 1000;
    s.beta = {1.0, 1.2, 0.8};
    s.background_weight = 1.0;
    s.area_min = {0, -100};
    s.area_max = {800, 100};
    PathlossModel m;
    auto k1 = sample_users(s, m, topo, 1);
    auto k2 = sample_users(s, m, topo, 2);
    auto k3 = sample_users(s, m, topo, 3);
    CHECK(k1.size() == 1000);
    CHECK(k2.size() == 1200);
    CHECK(k3.size() == 800);
    for (std::size_t u = 0; u < 800; ++u) {
        REQUIRE(k1[u].position.x == k2[u].position.x);
        REQUIRE(k1[u].attenuation == k3[u].attenuation);
    }
    CHECK_THROWS_AS(s.users(4), InvalidArgument);
}

TEST_CASE("traffic validation") {
    TrafficScenario s;
    CHECK_THROWS_AS(s.check(), InvalidArgument);  // nothing to draw from
    s.background_weight = 1.0;
    CHECK_NOTHROW(s.check());
    s.tracks = {HotspotTrack{{{3, {}}, {2, {}}}}};
    CHECK_THROWS_AS(s.check(), InvalidArgument);
    PathlossModel m;
    m.exponent = 1.5;
    CHECK_THROWS_AS(m.check(), InvalidArgument);
    CHECK(PathlossModel{}.attenuation(1000, 0) == doctest::Approx(15.3 + 37.6 * 3));
}

TEST_CASE("users csv") {
    std::vector<UserSample> us{{{1.5, 2.5}, {}, 3}};
    std::ostringstream os;
    write_users_csv(os, us, 4);
    CHECK(os.str() == "user_id,x,y,demand,period\n1,1.5,2.5,3,4\n");
    CHECK(total_traffic(us) == 3);
}

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "breathe/mr.hpp"

using namespace breathe;

namespace {

MrRecord rec(std::vector<std::pair<AntennaIndex, double>> e) {
    MrRecord r;
    for (auto [a, v] : e) r.entries.push_back({a, v});
    return r;
}

MrDataset attenuation_ds(std::size_t n, std::vector<MrRecord> records) {
    MrDataset ds;
    ds.domain = MrDomain::attenuation;
    ds.antenna_count = n;
    ds.records = std::move(records);
    ds.raw_count = ds.records.size();
    return ds;
}

// Pairwise oracle: r goes when some q covers a subset of r's antennas with
// attenuations at least as large; exact duplicates keep the earliest.
std::vector<std::size_t> redundancy_oracle(const MrDataset& ds) {
    std::vector<std::size_t> kept;
    const auto& R = ds.records;
    for (std::size_t r = 0; r < R.size(); ++r) {
        bool removed = false;
        for (std::size_t q = 0; q < R.size() && !removed; ++q) {
            if (q == r) continue;
            bool subset = true, ge = true, equal = R[q].entries.size() == R[r].entries.size();
            for (const auto& e : R[q].entries) {
                auto v = R[r].value_of(e.antenna);
                if (!v) {
                    subset = false;
                    break;
                }
                if (e.value < *v) ge = false;
                if (e.value != *v) equal = false;
            }
            if (!subset || !ge) continue;
            if (equal && q > r) continue;
            removed = true;
        }
        if (!removed) kept.push_back(r);
    }
    return kept;
}

}  // namespace

TEST_CASE("generate_mr orders by received power and keeps top m") {
    std::vector<UserSample> us{{{}, {100, 90, 95, 120}, 1}};
    std::vector<double> p{40, 40, 40, 40};
    auto ds = generate_mr(us, p, 3);
    REQUIRE(ds.records.size() == 1);
    const auto& e = ds.records[0].entries;
    REQUIRE(e.size() == 3);
    CHECK(e[0].antenna == 1);
    CHECK(e[1].antenna == 2);
    CHECK(e[2].antenna == 0);
    CHECK(e[0].value == doctest::Approx(-50));
    CHECK(ds.raw_count == 1);
    CHECK_THROWS_AS(generate_mr(us, p, 0), InvalidArgument);
}

TEST_CASE("domain round trip") {
    MrDataset ds;
    ds.domain = MrDomain::signal;
    ds.antenna_count = 2;
    ds.records = {rec({{0, -60}, {1, -70}})};
    std::vector<double> p{40, 43};
    auto a = to_attenuation(ds, p);
    CHECK(a.domain == MrDomain::attenuation);
    CHECK(a.records[0].entries[0].value == doctest::Approx(100));
    CHECK(a.records[0].entries[1].value == doctest::Approx(113));
    auto s = to_signal(a, p);
    CHECK(s.records[0].entries[1].value == doctest::Approx(-70));
    CHECK_THROWS_AS(to_signal(ds, p), InvalidArgument);
    CHECK_THROWS_AS(remove_redundant(ds), InvalidArgument);
}

TEST_CASE("filter_main_service drops records whose first entry is not strongest") {
    MrDataset ds;
    ds.antenna_count = 3;
    ds.records = {rec({{0, -60}, {1, -70}}), rec({{1, -80}, {2, -75}})};
    auto f = filter_main_service(ds);
    REQUIRE(f.records.size() == 1);
    CHECK(f.records[0].serving() == 0);
}

TEST_CASE("redundancy elimination worked example") {
    // Any power vector covering {1:100} also covers {1:90, 2:95}, so the second
    // record goes. {1:110, 2:80} survives; the repeated {1:100} keeps the first copy.
    auto ds = attenuation_ds(3, {rec({{0, 100}}), rec({{0, 90}, {1, 95}}), rec({{0, 110}, {1, 80}}),
                                 rec({{0, 100}})});
    auto out = remove_redundant(ds);
    REQUIRE(out.records.size() == 2);
    CHECK(out.records[0].entries[0].value == 100);
    CHECK(out.records[1].entries[0].value == 110);
}

TEST_CASE("redundancy elimination matches pairwise oracle") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 6;
        std::vector<MrRecord> records;
        const std::size_t k = 20 + gen() % 80;
        for (std::size_t r = 0; r < k; ++r) {
            std::vector<AntennaIndex> ids(n);
            std::iota(ids.begin(), ids.end(), AntennaIndex{0});
            std::shuffle(ids.begin(), ids.end(), gen);
            const std::size_t m = 1 + gen() % 4;
            MrRecord rr;
            for (std::size_t t = 0; t < m; ++t) rr.entries.push_back({ids[t], 90.0 + static_cast<double>(gen() % 4)});
            records.push_back(rr);
        }
        auto ds = attenuation_ds(n, records);
        auto expect = redundancy_oracle(ds);
        auto got = remove_redundant(ds);
        REQUIRE(got.records.size() == expect.size());
        for (std::size_t t = 0; t < expect.size(); ++t) {
            const auto& a = got.records[t].entries;
            const auto& b = ds.records[expect[t]].entries;
            REQUIRE(a.size() == b.size());
            for (std::size_t e = 0; e < a.size(); ++e) {
                CHECK(a[e].antenna == b[e].antenna);
                CHECK(a[e].value == b[e].value);
            }
        }
    }
}

TEST_CASE("per-antenna tables are sorted by attenuation") {
    auto ds = build_per_antenna_tables(attenuation_ds(2, {rec({{0, 120}, {1, 90}}), rec({{0, 100}}), rec({{1, 95}})}));
    REQUIRE(ds.has_tables());
    CHECK(ds.per_antenna[0] == std::vector<std::size_t>{1, 0});
    CHECK(ds.per_antenna[1] == std::vector<std::size_t>{0, 2});
    auto nb = cooccurrence_neighbours(ds);
    CHECK(nb[0] == std::vector<AntennaIndex>{1});
    auto serving = serving_records(ds);
    CHECK(serving[0] == std::vector<std::size_t>{0, 1});
    CHECK(serving[1] == std::vector<std::size_t>{2});
}

TEST_CASE("jacobian sampling is a deterministic subset") {
    std::vector<std::size_t> pool(100);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    auto a = sample_for_jacobian(pool, 30, 5, 2);
    auto b = sample_for_jacobian(pool, 30, 5, 2);
    CHECK(a == b);
    CHECK(a.size() == 30);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(sample_for_jacobian(pool, 500, 5, 2) == pool);
}

TEST_CASE("mr csv round trip and rejection") {
    MrDataset ds;
    ds.antenna_count = 3;
    ds.records = {rec({{0, -60.25}, {2, -70.5}}), rec({{1, -65}})};
    std::ostringstream os;
    write_mr_csv(os, ds);
    std::istringstream is(os.str());
    auto loaded = read_mr_csv(is, 3);
    REQUIRE(loaded.dataset.records.size() == 2);
    CHECK(loaded.dataset.records[0].entries[1].antenna == 2);
    CHECK(loaded.dataset.records[0].entries[1].value == -70.5);
    CHECK(loaded.rejected_records == 0);

    std::istringstream bad(
        "record_id,rank,antenna_id,value,domain\n"
        "1,1,1,-80,signal\n1,2,2,-70,signal\n"  // neighbour stronger than main service
        "2,1,9,-60,signal\n"                    // unknown antenna
        "3,1,1,-60,signal\n3,2,1,-61,signal\n"  // duplicate antenna
        "4,1,2,-60,signal\n"
        "garbage\n");
    auto r = read_mr_csv(bad, 3);
    CHECK(r.dataset.records.size() == 1);
    CHECK(r.rejected_records == 3);
    CHECK(r.rejected_rows == 6);

    std::istringstream mixed("1,1,1,-60,signal\n2,1,1,100,attenuation\n");
    CHECK_THROWS_AS(read_mr_csv(mixed, 3), InvalidArgument);
}

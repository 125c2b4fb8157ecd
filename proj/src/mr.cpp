#include "breathe/mr.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "breathe/rng.hpp"

namespace breathe {

std::optional<double> MrRecord::value_of(AntennaIndex antenna) const {
    for (const auto& e : entries)
        if (e.antenna == antenna) return e.value;
    return std::nullopt;
}

std::string to_string(MrDomain d) { return d == MrDomain::signal ? "signal" : "attenuation"; }

MrDataset generate_mr(std::span<const UserSample> users, std::span<const double> powers, std::size_t top_m) {
    if (top_m < 1) throw InvalidArgument("generate_mr: top_m must be >= 1");
    MrDataset ds;
    ds.domain = MrDomain::signal;
    ds.antenna_count = powers.size();
    ds.records.reserve(users.size());
    const std::size_t m = std::min(top_m, powers.size());
    std::vector<AntennaIndex> order(powers.size());
    std::vector<double> rx(powers.size());
    for (const auto& user : users) {
        for (std::size_t i = 0; i < powers.size(); ++i) rx[i] = powers[i] - user.attenuation[i];
        std::iota(order.begin(), order.end(), AntennaIndex{0});
        auto cmp = [&](AntennaIndex a, AntennaIndex b) { return rx[a] > rx[b] || (rx[a] == rx[b] && a < b); };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(), cmp);
        MrRecord rec;
        rec.entries.reserve(m);
        for (std::size_t r = 0; r < m; ++r) rec.entries.push_back({order[r], rx[order[r]]});
        ds.records.push_back(std::move(rec));
    }
    ds.raw_count = ds.records.size();
    return ds;
}

MrDataset filter_main_service(MrDataset ds) {
    if (ds.domain != MrDomain::signal) throw InvalidArgument("filter_main_service: needs signal-domain records");
    std::erase_if(ds.records, [](const MrRecord& r) {
        if (r.entries.empty()) return true;
        double s0 = r.entries.front().value;
        return std::any_of(r.entries.begin() + 1, r.entries.end(), [&](const MrEntry& e) { return e.value > s0; });
    });
    ds.per_antenna.clear();
    return ds;
}

namespace {

MrDataset shift_domain(MrDataset ds, std::span<const double> powers, MrDomain from, MrDomain to) {
    if (ds.domain != from) throw InvalidArgument("MR dataset is not in the " + to_string(from) + " domain");
    for (auto& r : ds.records)
        for (auto& e : r.entries) {
            if (e.antenna >= powers.size())
                throw InvalidArgument("MR record references antenna " + std::to_string(antenna_id(e.antenna)) +
                                      " outside the topology");
            // a = p - s and s = p - a are the same map.
            e.value = powers[e.antenna] - e.value;
        }
    ds.domain = to;
    ds.recorded_powers.assign(powers.begin(), powers.end());
    return ds;
}

struct SetHash {
    std::size_t operator()(const std::vector<AntennaIndex>& v) const {
        std::uint64_t h = 0x12345;
        for (auto a : v) h = mix_key(h, a);
        return static_cast<std::size_t>(h);
    }
};

// Values of a record ordered by ascending antenna index.
struct Point {
    std::size_t record;
    std::vector<AntennaIndex> set;
    std::vector<double> values;
};

bool dominates(const std::vector<double>& q, const std::vector<double>& p) {
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] < p[i]) return false;
    return true;
}

}  // namespace

MrDataset to_attenuation(MrDataset ds, std::span<const double> powers) {
    return shift_domain(std::move(ds), powers, MrDomain::signal, MrDomain::attenuation);
}

MrDataset to_signal(MrDataset ds, std::span<const double> powers) {
    return shift_domain(std::move(ds), powers, MrDomain::attenuation, MrDomain::signal);
}

MrDataset remove_redundant(MrDataset ds) {
    if (ds.domain != MrDomain::attenuation)
        throw InvalidArgument("remove_redundant: needs attenuation-domain records");
    const std::size_t count = ds.records.size();
    std::vector<Point> points(count);
    std::unordered_map<std::vector<AntennaIndex>, std::size_t, SetHash> group_of;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < count; ++r) {
        auto entries = ds.records[r].entries;
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.antenna < b.antenna; });
        auto& p = points[r];
        p.record = r;
        for (const auto& e : entries) {
            p.set.push_back(e.antenna);
            p.values.push_back(e.value);
        }
        auto [it, inserted] = group_of.try_emplace(p.set, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(r);
    }

    // Skyline per antenna set: sort by value sum descending, then lexicographic
    // descending, then record index; a point can only be dominated by an
    // earlier one in that order.
    std::vector<std::vector<std::size_t>> skyline(groups.size());
    std::vector<char> keep(count, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto members = groups[g];
        auto sum_of = [&](std::size_t r) {
            double s = 0.0;
            for (double v : points[r].values) s += v;
            return s;
        };
        std::vector<std::pair<double, std::size_t>> keyed;
        keyed.reserve(members.size());
        for (auto r : members) keyed.emplace_back(sum_of(r), r);
        std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            const auto& va = points[a.second].values;
            const auto& vb = points[b.second].values;
            if (va != vb) return va > vb;
            return a.second < b.second;
        });
        for (const auto& [s, r] : keyed) {
            bool dominated = false;
            for (auto q : skyline[g])
                if (dominates(points[q].values, points[r].values)) {
                    dominated = true;
                    break;
                }
            if (!dominated) {
                skyline[g].push_back(r);
                keep[r] = 1;
            }
        }
    }

    // Proper subsets of each survivor's antenna set: enumerate subset masks,
    // or scan the groups when there are fewer groups than masks.
    std::vector<std::vector<AntennaIndex>> group_sets(groups.size());
    for (const auto& [set, g] : group_of) group_sets[g] = set;
    auto dominated_in = [&](std::size_t g, const std::vector<double>& projected) {
        for (auto q : skyline[g])
            if (dominates(points[q].values, projected)) return true;
        return false;
    };
    std::vector<AntennaIndex> sub;
    std::vector<double> projected;
    for (std::size_t r = 0; r < count; ++r) {
        if (!keep[r]) continue;
        const auto& p = points[r];
        const std::size_t m = p.set.size();
        if (m < 2) continue;
        if (m < 20 && (std::size_t{1} << m) <= groups.size()) {
            const std::uint32_t full = (1u << m) - 1u;
            for (std::uint32_t mask = 1; mask < full && keep[r]; ++mask) {
                sub.clear();
                projected.clear();
                for (std::size_t b = 0; b < m; ++b)
                    if (mask & (1u << b)) {
                        sub.push_back(p.set[b]);
                        projected.push_back(p.values[b]);
                    }
                auto it = group_of.find(sub);
                if (it != group_of.end() && dominated_in(it->second, projected)) keep[r] = 0;
            }
        } else {
            for (std::size_t g = 0; g < groups.size() && keep[r]; ++g) {
                const auto& set = group_sets[g];
                if (set.size() >= m) continue;
                projected.clear();
                std::size_t b = 0;
                for (auto a : set) {
                    while (b < m && p.set[b] < a) ++b;
                    if (b == m || p.set[b] != a) break;
                    projected.push_back(p.values[b]);
                }
                if (projected.size() == set.size() && dominated_in(g, projected)) keep[r] = 0;
            }
        }
    }

    std::vector<MrRecord> survivors;
    for (std::size_t r = 0; r < count; ++r)
        if (keep[r]) survivors.push_back(std::move(ds.records[r]));
    ds.records = std::move(survivors);
    ds.per_antenna.clear();
    return ds;
}

MrDataset build_per_antenna_tables(MrDataset ds) {
    ds.per_antenna.assign(ds.antenna_count, {});
    std::vector<std::vector<std::pair<double, std::size_t>>> keyed(ds.antenna_count);
    for (std::size_t r = 0; r < ds.records.size(); ++r)
        for (const auto& e : ds.records[r].entries) {
            if (e.antenna >= ds.antenna_count) throw InvalidArgument("MR record references unknown antenna");
            keyed[e.antenna].emplace_back(e.value, r);
        }
    for (std::size_t i = 0; i < ds.antenna_count; ++i) {
        std::sort(keyed[i].begin(), keyed[i].end());
        ds.per_antenna[i].reserve(keyed[i].size());
        for (const auto& [a, r] : keyed[i]) ds.per_antenna[i].push_back(r);
    }
    return ds;
}

std::vector<std::vector<std::size_t>> serving_records(const MrDataset& ds) {
    std::vector<std::vector<std::size_t>> out(ds.antenna_count);
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        const auto& rec = ds.records[r];
        if (!rec.entries.empty() && rec.serving() < ds.antenna_count) out[rec.serving()].push_back(r);
    }
    return out;
}

std::vector<std::size_t> sample_for_jacobian(std::span<const std::size_t> serving_of_i, std::size_t n_s,
                                             std::uint64_t seed, AntennaIndex i) {
    if (n_s < 1) throw InvalidArgument("sample_for_jacobian: n_s must be >= 1");
    std::vector<std::size_t> pool(serving_of_i.begin(), serving_of_i.end());
    if (n_s >= pool.size()) return pool;
    StreamRng rng(seed, 0x4a4aULL, i);
    for (std::size_t t = 0; t < n_s; ++t) {
        auto span = pool.size() - t;
        auto pick = t + static_cast<std::size_t>(rng.uniform() * static_cast<double>(span));
        if (pick >= pool.size()) pick = pool.size() - 1;
        std::swap(pool[t], pool[pick]);
    }
    pool.resize(n_s);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<std::vector<AntennaIndex>> cooccurrence_neighbours(const MrDataset& ds) {
    std::vector<std::vector<AntennaIndex>> adj(ds.antenna_count);
    for (const auto& rec : ds.records)
        for (const auto& a : rec.entries)
            for (const auto& b : rec.entries)
                if (a.antenna != b.antenna) adj[a.antenna].push_back(b.antenna);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

void write_mr_csv(std::ostream& os, const MrDataset& ds) {
    os << "record_id,rank,antenna_id,value,domain\n";
    const auto domain = to_string(ds.domain);
    auto old = os.precision(17);
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        const auto& rec = ds.records[r];
        for (std::size_t k = 0; k < rec.entries.size(); ++k)
            os << r + 1 << ',' << k + 1 << ',' << antenna_id(rec.entries[k].antenna) << ',' << rec.entries[k].value
               << ',' << domain << '\n';
    }
    os.precision(old);
}

MrLoadResult read_mr_csv(std::istream& is, std::size_t antenna_count) {
    struct Row {
        long rank;
        long antenna;
        double value;
    };
    std::map<long, std::vector<Row>> by_record;
    std::optional<MrDomain> domain;
    std::string line;
    bool header = true;
    std::size_t malformed = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("record_id", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string f[5];
        int nf = 0;
        while (nf < 5 && std::getline(ss, f[nf], ',')) ++nf;
        try {
            if (nf != 5) throw std::invalid_argument("fields");
            MrDomain d = f[4] == "signal" ? MrDomain::signal
                         : f[4] == "attenuation" ? MrDomain::attenuation
                                                 : throw std::invalid_argument("domain");
            if (domain && *domain != d) throw InvalidArgument("read_mr_csv: mixed domains in one batch");
            domain = d;
            by_record[std::stol(f[0])].push_back({std::stol(f[1]), std::stol(f[2]), std::stod(f[3])});
        } catch (const InvalidArgument&) {
            throw;
        } catch (const std::exception&) {
            ++malformed;
        }
    }

    MrLoadResult result;
    result.rejected_rows = malformed;
    result.dataset.domain = domain.value_or(MrDomain::signal);
    result.dataset.antenna_count = antenna_count;
    for (auto& [id, rows] : by_record) {
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
        MrRecord rec;
        bool valid = true;
        std::vector<char> seen(antenna_count, 0);
        for (const auto& row : rows) {
            if (row.antenna < 1 || static_cast<std::size_t>(row.antenna) > antenna_count) {
                valid = false;
                break;
            }
            auto a = static_cast<AntennaIndex>(row.antenna - 1);
            if (seen[a]) {
                valid = false;
                break;
            }
            seen[a] = 1;
            rec.entries.push_back({a, row.value});
        }
        if (valid && result.dataset.domain == MrDomain::signal)
            for (std::size_t k = 1; k < rec.entries.size(); ++k)
                if (rec.entries[k].value > rec.entries[0].value) valid = false;
        if (!valid || rec.entries.empty()) {
            ++result.rejected_records;
            result.rejected_rows += rows.size();
            continue;
        }
        result.dataset.records.push_back(std::move(rec));
    }
    result.dataset.raw_count = result.dataset.records.size();
    return result;
}

}  // namespace breathe

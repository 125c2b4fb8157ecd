#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "breathe/core.hpp"
#include "breathe/traffic.hpp"

namespace breathe {

enum class MrDomain { signal, attenuation };

struct MrEntry {
    AntennaIndex antenna = 0;
    double value = 0.0;  // dBm for signal records, dB for attenuation records
};

/// One measurement report; the first entry is the main service antenna.
struct MrRecord {
    std::vector<MrEntry> entries;

    AntennaIndex serving() const { return entries.front().antenna; }
    std::optional<double> value_of(AntennaIndex antenna) const;
};

struct MrDataset {
    MrDomain domain = MrDomain::signal;
    std::size_t antenna_count = 0;
    std::vector<MrRecord> records;
    std::size_t raw_count = 0;  // K, before redundancy elimination
    // Powers in force when the batch was recorded; set by the domain conversions.
    std::vector<double> recorded_powers;
    // Relevant-record tables: per antenna, indices of records mentioning it,
    // ascending by that antenna's attenuation. Empty until built.
    std::vector<std::vector<std::size_t>> per_antenna;

    std::size_t k_prime() const { return records.size(); }
    bool has_tables() const { return per_antenna.size() == antenna_count && antenna_count > 0; }
};

/// One record per user: the top_m antennas by received power, descending,
/// lowest index first on ties.
MrDataset generate_mr(std::span<const UserSample> users, std::span<const double> powers, std::size_t top_m);

/// Drops records whose main service antenna is not the strongest entry.
MrDataset filter_main_service(MrDataset ds);

MrDataset to_attenuation(MrDataset ds, std::span<const double> powers);
MrDataset to_signal(MrDataset ds, std::span<const double> powers);

/// Redundancy elimination: a record is deleted when another record's antenna
/// set is a subset of its own and that record's attenuations are at least as
/// large on every shared antenna. Identical records keep the earliest.
MrDataset remove_redundant(MrDataset ds);

MrDataset build_per_antenna_tables(MrDataset ds);

/// Records whose main service antenna is i (the set behind the perturbation
/// counting), as opposed to the relevant-record tables.
std::vector<std::vector<std::size_t>> serving_records(const MrDataset& ds);

/// Uniform sample without replacement of min(n_s, |M_i|) serving records of
/// antenna i, returned in ascending record order.
std::vector<std::size_t> sample_for_jacobian(std::span<const std::size_t> serving_of_i, std::size_t n_s,
                                             std::uint64_t seed, AntennaIndex i);

/// Antennas co-occurring with i in at least one record.
std::vector<std::vector<AntennaIndex>> cooccurrence_neighbours(const MrDataset& ds);

void write_mr_csv(std::ostream& os, const MrDataset& ds);

struct MrLoadResult {
    MrDataset dataset;
    std::size_t rejected_records = 0;
    std::size_t rejected_rows = 0;
};

/// Reads the record_id,rank,antenna_id,value,domain layout. Signal-domain
/// records that break the main-service invariant, carry duplicate antennas
/// or reference antennas outside [1, antenna_count] are rejected as a whole.
MrLoadResult read_mr_csv(std::istream& is, std::size_t antenna_count);

std::string to_string(MrDomain d);

}  // namespace breathe

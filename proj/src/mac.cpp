#include "d2dsim/mac.hpp"

#include "d2dsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace d2dsim {

McsTable McsTable::builtin_default() {
    McsTable t;
    constexpr int n = 29;
    constexpr double eff_lo = 0.15, eff_hi = 5.55;
    // 50 RBs x 168 data REs per subframe, 188-byte (1504-bit) PDUs.
    constexpr double bits_per_eff = 50.0 * 168.0;
    for (int i = 0; i < n; ++i) {
        McsRow r;
        r.mcs = i;
        r.spectral_eff = eff_lo + i * (eff_hi - eff_lo) / (n - 1);
        r.sinr_threshold_db = 10.0 * std::log10(std::pow(2.0, r.spectral_eff) - 1.0) + 2.0;
        r.pdus_per_subframe =
            std::max(1, static_cast<int>(std::floor(r.spectral_eff * bits_per_eff / 1504.0)));
        t.rows.push_back(r);
    }
    return t;
}

void McsTable::validate() const {
    if (rows.empty()) throw ConfigError("mcs table: empty");
    if (rows.front().pdus_per_subframe < 1)
        throw ConfigError("mcs table: row 0 must carry at least one PDU per subframe");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].mcs != static_cast<int>(i))
            throw ConfigError("mcs table: indices must be 0..n-1 in order");
        if (i > 0) {
            if (rows[i].sinr_threshold_db <= rows[i - 1].sinr_threshold_db)
                throw ConfigError("mcs table: sinr thresholds must be strictly increasing");
            if (rows[i].pdus_per_subframe < rows[i - 1].pdus_per_subframe)
                throw ConfigError("mcs table: pdus_per_subframe must be non-decreasing");
        }
    }
}

const McsRow& McsTable::row(int mcs) const {
    if (mcs < 0 || mcs >= static_cast<int>(rows.size()))
        throw DomainError("mcs " + std::to_string(mcs) + " not in table");
    return rows[static_cast<std::size_t>(mcs)];
}

McsTable McsTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("mcs table: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("mcs,eff,sinr_thresh_db,pdus_per_sf", 0) != 0)
        throw ConfigError("mcs table: missing header in " + path);
    McsTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string m, e, s, p;
        if (!std::getline(row, m, ',') || !std::getline(row, e, ',') ||
            !std::getline(row, s, ',') || !std::getline(row, p))
            throw ConfigError("mcs table: malformed row: " + line);
        t.rows.push_back({std::stoi(m), std::stod(e), std::stod(s), std::stoi(p)});
    }
    t.validate();
    return t;
}

void McsTable::save_csv(std::ostream& out) const {
    out << "mcs,eff,sinr_thresh_db,pdus_per_sf\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d", r.mcs, r.spectral_eff,
                      r.sinr_threshold_db, r.pdus_per_subframe);
        out << buf << '\n';
    }
}

int sinr_to_cqi(double sinr_db) {
    const auto raw = static_cast<long>(std::floor((sinr_db + 6.0) / 2.0));
    return static_cast<int>(std::clamp(raw, 0L, 15L));
}

int cqi_to_mcs(int cqi, const McsTable& table) {
    if (cqi < 0 || cqi > 15) throw DomainError("cqi out of range");
    const double representative = 2.0 * cqi - 6.0 + 1.0; // bin midpoint
    int best = 0;
    for (const auto& r : table.rows)
        if (r.sinr_threshold_db <= representative) best = r.mcs;
    return best;
}

int pdu_capacity(int mcs, const McsTable& table) { return table.row(mcs).pdus_per_subframe; }

bool decode_pdu(double actual_sinr_db, int mcs, const McsTable& table) {
    return actual_sinr_db >= table.row(mcs).sinr_threshold_db;
}

TxPlan schedule_subframe(const BacklogView& backlog, std::uint64_t slot, int mcs,
                         const McsTable& table) {
    TxPlan plan;
    plan.slot = slot;
    plan.mcs = mcs;
    const std::uint32_t take =
        std::min<std::uint32_t>(backlog.size(), static_cast<std::uint32_t>(pdu_capacity(mcs, table)));
    plan.pdu_packet_indices.reserve(take);
    for (std::uint32_t i = 0; i < take; ++i) {
        plan.pdu_packet_indices.push_back(
            backlog.map->entries[backlog.head + i].packet_index);
    }
    return plan;
}

} // namespace d2dsim

#pragma once

#include "d2dsim/stream.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace d2dsim {

struct McsRow {
    int mcs = 0;
    double spectral_eff = 0.0;     // bits/symbol proxy
    double sinr_threshold_db = 0.0;
    int pdus_per_subframe = 1;     // whole 188-byte packets at 50 RBs
};

struct McsTable {
    std::vector<McsRow> rows;

    // 29 rows, spectral efficiency 0.15..5.55, threshold
    // 10*log10(2^eff - 1) + 2 dB margin, capacity
    // floor(eff * 50 RB * 168 RE / 1504 bit) clamped to >= 1.
    static McsTable builtin_default();

    // CSV: mcs,eff,sinr_thresh_db,pdus_per_sf
    static McsTable load_csv(const std::string& path);
    void save_csv(std::ostream& out) const;

    void validate() const; // throws ConfigError
    const McsRow& row(int mcs) const;
    int max_mcs() const { return static_cast<int>(rows.size()) - 1; }
};

// cqi = clamp(floor((sinr + 6) / 2), 0, 15)
int sinr_to_cqi(double sinr_db);

// Highest MCS whose threshold does not exceed the CQI bin midpoint
// (2*cqi - 5 dB); falls back to MCS 0.
int cqi_to_mcs(int cqi, const McsTable& table);

int pdu_capacity(int mcs, const McsTable& table);

// Hard threshold decode: delivered iff the realized SINR reaches the
// threshold of the MCS the scheduler picked (boundary inclusive).
// Extension point for a BLER curve: replace this predicate, keeping the
// signature.
bool decode_pdu(double actual_sinr_db, int mcs, const McsTable& table);

struct TxPlan {
    std::uint64_t slot = 0;
    int mcs = 0;
    std::vector<std::uint32_t> pdu_packet_indices;
};

// Contiguous in-order slice of the packet map: [head, released_end) are
// the released-but-unsent packets, head first.
struct BacklogView {
    const PacketMap* map = nullptr;
    std::uint32_t head = 0;
    std::uint32_t released_end = 0;

    std::uint32_t size() const { return released_end - head; }
};

// Head-of-line scheduling of min(backlog, capacity) packets; the
// degenerate single-UE case of a proportional-fair scheduler.
TxPlan schedule_subframe(const BacklogView& backlog, std::uint64_t slot, int mcs,
                         const McsTable& table);

} // namespace d2dsim

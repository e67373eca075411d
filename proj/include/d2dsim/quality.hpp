#pragma once

#include "d2dsim/stream.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

namespace d2dsim {

struct VideoPduRecord {
    std::uint32_t packet_index = 0;
    std::uint64_t slot = 0;
    bool delivered = true;
};

struct D2dSlotDecision {
    std::uint64_t slot = 0;
    bool transmitted = false;
    bool succeeded = false;
};

struct LossTrace {
    std::vector<VideoPduRecord> video; // every packet of the map, in order
    std::vector<D2dSlotDecision> d2d;  // one record per slot
    std::uint64_t total_slots = 0;
};

struct FrameStatus {
    std::uint32_t frame_index = 0;
    FrameType frame_type = FrameType::I;
    bool directly_damaged = false;   // at least one own packet lost
    bool effectively_damaged = false; // after GoP propagation
};

struct GopDamage {
    std::uint32_t gop_index = 0;
    std::uint32_t damaged_frames = 0;
    bool i_frame_lost = false;
};

struct QualityReport {
    double p_det = 1.0;
    std::optional<double> d2d_rel_throughput;
    std::optional<double> efficiency;
    std::vector<GopDamage> per_gop;
    std::vector<std::uint64_t> seeds;
    double stddev = 0.0; // sample stddev of p_det over seeds
};

// GoP error propagation: a frame is directly damaged iff any of its
// packets was lost; a damaged I frame damages its whole GoP; a damaged
// differential frame damages only itself unless chain_propagation also
// damages every later frame of the GoP.
std::vector<FrameStatus> propagate_damage(const LossTrace& trace, const PacketMap& map,
                                          bool chain_propagation = false);

// Fraction of frames that are not effectively damaged.
double detection_probability(const std::vector<FrameStatus>& statuses);

// Successful D2D slot transmissions over total slots (the reference
// strategy transmits every slot and never loses).
double relative_throughput(const LossTrace& trace);

// p_det / (1 - throughput); throughput == 1 has no defined efficiency.
double efficiency(double p_det, double throughput);

std::vector<GopDamage> per_gop_damage(const std::vector<FrameStatus>& statuses);

nlohmann::json quality_to_json(const QualityReport& report);

// CSV: slot,packet_idx,frame_type,delivered
void write_loss_trace_csv(const LossTrace& trace, const PacketMap& map, std::ostream& out);
// Reads the video part of a trace; validates it against the map.
LossTrace read_loss_trace_csv(std::istream& in, const PacketMap& map);

// CSV: slot,transmitted,succeeded
void write_d2d_trace_csv(const LossTrace& trace, std::ostream& out);
void read_d2d_trace_csv(std::istream& in, LossTrace& trace);

} // namespace d2dsim

#pragma once

#include "d2dsim/config.hpp"
#include "d2dsim/quality.hpp"

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace d2dsim {

// Slot census by (access mode, frame class in flight).
struct TimelineSummary {
    enum FrameClass : std::size_t { fc_i = 0, fc_diff = 1, fc_idle = 2 };
    // [mode low/high][I, Diff, idle]
    std::array<std::array<std::uint64_t, 3>, 2> counts{};

    std::uint64_t total() const;
    nlohmann::json to_json() const;
};

struct SimResult {
    LossTrace loss_trace;
    QualityReport quality;
    TimelineSummary timeline;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    std::uint64_t total_packets = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

// Subframe-level simulation. Per slot, in order: apply due
// preamble/DCI events, draw the D2D access decision, compute both
// SINRs, schedule the uplink with the MCS derived from the delayed CQI,
// decode, log. Deterministic given (config, seed).
class Engine {
public:
    Engine(const SimConfig& cfg, const SimInputs& inputs);

    // Rewind to slot 0, optionally with a different seed.
    void reset();
    void reset(std::uint64_t seed);

    // Advance one subframe; false once the last slot has run.
    bool step();

    bool done() const { return slot_ >= total_slots_; }
    SimResult finish() const;
    SimResult run(); // reset-free full pass from the current state

    const PacketMap& map() const { return map_; }
    const LossTrace& trace() const { return trace_; }
    const AccessMode& mode() const { return mode_; }
    std::uint64_t slot() const { return slot_; }
    std::uint64_t total_slots() const { return total_slots_; }

private:
    struct SlotEvent {
        std::uint64_t apply_slot;
        PreambleEvent event;
    };

    double enb_sinr_db(std::uint64_t slot, bool d2d_active) const;
    double d2drx_sinr_db(std::uint64_t slot, bool lte_active) const;
    std::uint64_t release_slot(double release_time_s) const;

    const SimConfig cfg_;
    const FadingTrace* fading_ = nullptr;
    McsTable mcs_;
    PacketMap map_;
    std::vector<SlotEvent> events_;
    std::vector<std::uint64_t> release_slots_; // per packet, dci-shifted

    double noise_dbm_ = 0.0;
    LinkBudget ue_enb_;
    LinkBudget d2d_enb_;
    LinkBudget d2d_pair_;
    LinkBudget ue_d2drx_;
    std::size_t off_ue_enb_ = 0, off_d2d_enb_ = 0, off_d2d_pair_ = 0, off_ue_d2drx_ = 0;

    std::uint64_t total_slots_ = 0;
    std::uint64_t seed_ = 0;

    // mutable per-run state
    std::uint64_t slot_ = 0;
    std::uint32_t head_ = 0;         // first unsent packet
    std::size_t next_event_ = 0;
    AccessMode mode_;
    std::vector<std::int8_t> cqi_meas_; // per-slot measured CQI
    LossTrace trace_;
    TimelineSummary timeline_;
};

SimResult run_sim(const SimConfig& cfg, const SimInputs& inputs);

// Canonical serialization hash: loss trace, D2D decisions and the
// quality JSON. Stable across runs, processes and worker counts.
std::uint64_t result_hash(const SimResult& result, const PacketMap& map);

nlohmann::json result_to_json(const SimResult& result);

} // namespace d2dsim

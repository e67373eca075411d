#include "d2dsim/engine.hpp"

#include "d2dsim/errors.hpp"
#include "d2dsim/hash.hpp"
#include "d2dsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace d2dsim {

std::uint64_t TimelineSummary::total() const {
    std::uint64_t n = 0;
    for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
    return n;
}

nlohmann::json TimelineSummary::to_json() const {
    return {{"low_i", counts[0][fc_i]},    {"low_diff", counts[0][fc_diff]},
            {"low_idle", counts[0][fc_idle]}, {"high_i", counts[1][fc_i]},
            {"high_diff", counts[1][fc_diff]}, {"high_idle", counts[1][fc_idle]}};
}

Engine::Engine(const SimConfig& cfg, const SimInputs& inputs) : cfg_(cfg) {
    cfg_.validate();
    fading_ = &inputs.trace_for(cfg_.fading_label);
    mcs_ = inputs.mcs;
    mcs_.validate();

    map_ = build_packet_map(cfg_.stream);
    if (map_.entries.empty())
        throw ConfigError("stream releases no frames within the configured duration");
    const auto preambles = preamble_schedule(map_);

    const double freq_mhz = earfcn_to_uplink_freq_mhz(cfg_.earfcn);
    noise_dbm_ = noise_floor_dbm(cfg_.bandwidth_hz, cfg_.noise_figure_db);
    ue_enb_ = {cfg_.ue_tx_power_dbm, friis_path_loss_db(cfg_.topology.ue_enb_dist_m, freq_mhz)};
    d2d_enb_ = {cfg_.strategy.d2d_tx_power_dbm,
                friis_path_loss_db(cfg_.topology.d2dtx_enb_dist_m, freq_mhz)};
    d2d_pair_ = {cfg_.strategy.d2d_tx_power_dbm,
                 friis_path_loss_db(cfg_.topology.d2d_pair_dist_m, freq_mhz)};
    ue_d2drx_ = {cfg_.ue_tx_power_dbm,
                 friis_path_loss_db(cfg_.topology.ue_d2drx_dist_m, freq_mhz)};

    // Links see decorrelated channels: each draws the shared trace at a
    // fixed per-link phase offset.
    const std::size_t n = fading_->size();
    off_ue_enb_ = 0;
    off_d2d_enb_ = n / 4;
    off_d2d_pair_ = n / 2;
    off_ue_d2drx_ = (3 * n) / 4;

    total_slots_ = static_cast<std::uint64_t>(std::ceil(cfg_.stream.duration_s / cfg_.slot_len_s - 1e-9));

    // The UE announces each frame-type change ahead of the data; the
    // frame data itself trails the preamble by the DCI latency, so the
    // whole pipeline (events and packet eligibility) shifts by
    // dci_delay slots for either strategy.
    events_.reserve(preambles.size());
    for (const auto& ev : preambles)
        events_.push_back({release_slot(ev.time_s), ev});
    release_slots_.reserve(map_.entries.size());
    for (const auto& e : map_.entries)
        release_slots_.push_back(release_slot(e.release_time_s));

    reset(cfg_.seed);
}

std::uint64_t Engine::release_slot(double release_time_s) const {
    const auto base = static_cast<std::uint64_t>(
        std::floor(release_time_s / cfg_.slot_len_s + 1e-9));
    return base + cfg_.strategy.dci_delay;
}

void Engine::reset() { reset(seed_); }

void Engine::reset(std::uint64_t seed) {
    seed_ = seed;
    slot_ = 0;
    head_ = 0;
    next_event_ = 0;
    mode_ = AccessMode{};
    cqi_meas_.clear();
    cqi_meas_.reserve(total_slots_);
    trace_ = LossTrace{};
    trace_.total_slots = total_slots_;
    trace_.video.reserve(map_.entries.size());
    trace_.d2d.reserve(total_slots_);
    timeline_ = TimelineSummary{};
}

double Engine::enb_sinr_db(std::uint64_t slot, bool d2d_active) const {
    const double ue_rx =
        rx_power_dbm(ue_enb_, fading_->gain_at(slot, cfg_.slot_len_s, off_ue_enb_));
    const double d2d_rx =
        rx_power_dbm(d2d_enb_, fading_->gain_at(slot, cfg_.slot_len_s, off_d2d_enb_));
    return sinr_at_enb_db(ue_rx, d2d_active, d2d_rx, noise_dbm_);
}

double Engine::d2drx_sinr_db(std::uint64_t slot, bool lte_active) const {
    const double d2d_rx =
        rx_power_dbm(d2d_pair_, fading_->gain_at(slot, cfg_.slot_len_s, off_d2d_pair_));
    const double ue_rx =
        rx_power_dbm(ue_d2drx_, fading_->gain_at(slot, cfg_.slot_len_s, off_ue_d2drx_));
    return sinr_at_d2drx_db(d2d_rx, lte_active, ue_rx, noise_dbm_);
}

bool Engine::step() {
    if (done()) return false;
    const std::uint64_t t = slot_;

    // (1) preamble/DCI events due this slot
    while (next_event_ < events_.size() && events_[next_event_].apply_slot <= t) {
        mode_ = fdtp_update_mode(mode_, events_[next_event_].event, t,
                                 cfg_.strategy.dci_delay, cfg_.slot_len_s);
        ++next_event_;
    }

    // (2) D2D access decision
    const double draw = draw_uniform(seed_, t, DrawPurpose::d2d_access);
    const bool transmitted = access_decide(cfg_.strategy, mode_, draw);

    // (3) SINRs; the eNodeB sounds the uplink every subframe whether or
    // not the UE has data, so the CQI always reflects the composite
    // interference state of this slot.
    std::uint32_t released_end = head_;
    while (released_end < map_.entries.size() && release_slots_[released_end] <= t)
        ++released_end;
    const bool ue_active = released_end > head_;

    const double sinr_enb = enb_sinr_db(t, transmitted);
    cqi_meas_.push_back(static_cast<std::int8_t>(sinr_to_cqi(sinr_enb)));

    const bool succeeded =
        transmitted &&
        d2d_success(true, d2drx_sinr_db(t, ue_active), cfg_.d2d_decode_threshold_db);
    trace_.d2d.push_back({t, transmitted, succeeded});

    // (4) schedule with the MCS derived from the delayed CQI report
    const std::uint64_t meas_slot = t >= cfg_.report_delay ? t - cfg_.report_delay : 0;
    const int mcs = cqi_to_mcs(cqi_meas_[meas_slot], mcs_);
    TimelineSummary::FrameClass fc = TimelineSummary::fc_idle;
    if (ue_active) {
        const BacklogView backlog{&map_, head_, released_end};
        const TxPlan plan = schedule_subframe(backlog, t, mcs, mcs_);

        // (5) decode: one SINR per subframe, all PDUs share its fate;
        // lost PDUs are dropped for good (RLC UM, no HARQ).
        const bool delivered = decode_pdu(sinr_enb, mcs, mcs_);
        for (const auto pkt : plan.pdu_packet_indices)
            trace_.video.push_back({pkt, t, delivered});
        head_ += static_cast<std::uint32_t>(plan.pdu_packet_indices.size());
        fc = map_.entries[plan.pdu_packet_indices.front()].frame_type == FrameType::I
                 ? TimelineSummary::fc_i
                 : TimelineSummary::fc_diff;
    }

    // (6) log
    timeline_.counts[mode_.mode == TxMode::Low ? 0 : 1][fc] += 1;

    ++slot_;

    if (done() && head_ < map_.entries.size()) {
        // Packets that never got a transmission opportunity before the
        // end of the simulation count as lost, keeping
        // delivered + lost == total.
        for (std::uint32_t p = head_; p < map_.entries.size(); ++p)
            trace_.video.push_back({p, total_slots_ - 1, false});
        head_ = static_cast<std::uint32_t>(map_.entries.size());
    }
    return true;
}

SimResult Engine::finish() const {
    SimResult result;
    result.loss_trace = trace_;
    result.timeline = timeline_;
    result.seed = seed_;
    result.config_hash = cfg_.config_hash();
    result.total_packets = map_.entries.size();
    for (const auto& rec : trace_.video)
        (rec.delivered ? result.delivered : result.lost) += 1;

    const auto statuses = propagate_damage(trace_, map_, cfg_.chain_propagation);
    QualityReport q;
    q.p_det = detection_probability(statuses);
    q.d2d_rel_throughput = relative_throughput(trace_);
    if (*q.d2d_rel_throughput < 1.0)
        q.efficiency = efficiency(q.p_det, *q.d2d_rel_throughput);
    q.per_gop = per_gop_damage(statuses);
    q.seeds = {seed_};
    q.stddev = 0.0;
    result.quality = std::move(q);
    return result;
}

SimResult Engine::run() {
    while (step()) {
    }
    return finish();
}

SimResult run_sim(const SimConfig& cfg, const SimInputs& inputs) {
    Engine engine(cfg, inputs);
    return engine.run();
}

std::uint64_t result_hash(const SimResult& result, const PacketMap& map) {
    std::ostringstream blob;
    write_loss_trace_csv(result.loss_trace, map, blob);
    write_d2d_trace_csv(result.loss_trace, blob);
    blob << quality_to_json(result.quality).dump();
    return fnv1a64(blob.str());
}

nlohmann::json result_to_json(const SimResult& result) {
    return {{"quality", quality_to_json(result.quality)},
            {"timeline_summary", result.timeline.to_json()},
            {"delivered", result.delivered},
            {"lost", result.lost},
            {"total_packets", result.total_packets},
            {"config_hash", hash_hex(result.config_hash)},
            {"seed", result.seed}};
}

} // namespace d2dsim

#include "d2dsim/quality.hpp"

#include "d2dsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace d2dsim {

std::vector<FrameStatus> propagate_damage(const LossTrace& trace, const PacketMap& map,
                                          bool chain_propagation) {
    const std::uint32_t frames = frame_count(map);
    std::vector<FrameStatus> statuses(frames);
    for (std::uint32_t f = 0; f < frames; ++f) statuses[f].frame_index = f;
    for (const auto& e : map.entries) statuses[e.frame_index].frame_type = e.frame_type;

    if (trace.video.size() != map.entries.size())
        throw ConsistencyError("loss trace covers " + std::to_string(trace.video.size()) +
                               " packets, map has " + std::to_string(map.entries.size()));
    std::vector<bool> seen(map.entries.size(), false);
    for (const auto& rec : trace.video) {
        if (rec.packet_index >= map.entries.size())
            throw ConsistencyError("loss trace packet " + std::to_string(rec.packet_index) +
                                   " absent from packet map");
        if (seen[rec.packet_index])
            throw ConsistencyError("loss trace repeats packet " +
                                   std::to_string(rec.packet_index));
        seen[rec.packet_index] = true;
        if (!rec.delivered)
            statuses[map.entries[rec.packet_index].frame_index].directly_damaged = true;
    }

    // GoP membership follows from the I-frame positions: every frame up
    // to the next I belongs to the preceding I's group.
    for (std::uint32_t f = 0; f < frames; ++f)
        statuses[f].effectively_damaged = statuses[f].directly_damaged;
    std::uint32_t g_start = 0;
    while (g_start < frames) {
        std::uint32_t g_end = g_start + 1;
        while (g_end < frames && statuses[g_end].frame_type != FrameType::I) ++g_end;
        if (statuses[g_start].frame_type == FrameType::I && statuses[g_start].directly_damaged) {
            for (std::uint32_t f = g_start; f < g_end; ++f)
                statuses[f].effectively_damaged = true;
        } else if (chain_propagation) {
            bool tainted = false;
            for (std::uint32_t f = g_start; f < g_end; ++f) {
                tainted = tainted || statuses[f].directly_damaged;
                if (tainted) statuses[f].effectively_damaged = true;
            }
        }
        g_start = g_end;
    }
    return statuses;
}

double detection_probability(const std::vector<FrameStatus>& statuses) {
    if (statuses.empty()) throw DomainError("detection_probability: no frames");
    const auto intact = std::count_if(statuses.begin(), statuses.end(),
                                      [](const FrameStatus& s) { return !s.effectively_damaged; });
    return static_cast<double>(intact) / static_cast<double>(statuses.size());
}

double relative_throughput(const LossTrace& trace) {
    if (trace.total_slots == 0) throw DomainError("relative_throughput: no slots");
    const auto ok = std::count_if(trace.d2d.begin(), trace.d2d.end(),
                                  [](const D2dSlotDecision& d) { return d.succeeded; });
    return static_cast<double>(ok) / static_cast<double>(trace.total_slots);
}

double efficiency(double p_det, double throughput) {
    if (throughput < 0.0 || throughput >= 1.0) {
        if (throughput == 1.0)
            throw DomainError("efficiency undefined at relative throughput 1");
        throw DomainError("efficiency: throughput must be in [0,1)");
    }
    return p_det / (1.0 - throughput);
}

std::vector<GopDamage> per_gop_damage(const std::vector<FrameStatus>& statuses) {
    std::vector<GopDamage> gops;
    std::uint32_t g_start = 0;
    const auto frames = static_cast<std::uint32_t>(statuses.size());
    while (g_start < frames) {
        std::uint32_t g_end = g_start + 1;
        while (g_end < frames && statuses[g_end].frame_type != FrameType::I) ++g_end;
        GopDamage g;
        g.gop_index = static_cast<std::uint32_t>(gops.size());
        g.i_frame_lost = statuses[g_start].frame_type == FrameType::I &&
                         statuses[g_start].directly_damaged;
        for (std::uint32_t f = g_start; f < g_end; ++f)
            if (statuses[f].effectively_damaged) ++g.damaged_frames;
        gops.push_back(g);
        g_start = g_end;
    }
    return gops;
}

nlohmann::json quality_to_json(const QualityReport& report) {
    nlohmann::json j;
    j["metric"] = "proxy";
    j["p_det"] = report.p_det;
    j["d2d_rel_throughput"] =
        report.d2d_rel_throughput ? nlohmann::json(*report.d2d_rel_throughput) : nullptr;
    j["efficiency"] = report.efficiency ? nlohmann::json(*report.efficiency) : nullptr;
    j["stddev"] = report.stddev;
    j["seeds"] = report.seeds;
    auto gops = nlohmann::json::array();
    for (const auto& g : report.per_gop) {
        gops.push_back({{"gop_index", g.gop_index},
                        {"damaged_frames", g.damaged_frames},
                        {"i_frame_lost", g.i_frame_lost}});
    }
    j["per_gop"] = std::move(gops);
    return j;
}

void write_loss_trace_csv(const LossTrace& trace, const PacketMap& map, std::ostream& out) {
    out << "slot,packet_idx,frame_type,delivered\n";
    for (const auto& rec : trace.video) {
        if (rec.packet_index >= map.entries.size())
            throw ConsistencyError("loss trace packet absent from packet map");
        out << rec.slot << ',' << rec.packet_index << ','
            << frame_type_char(map.entries[rec.packet_index].frame_type) << ','
            << (rec.delivered ? 1 : 0) << '\n';
    }
}

LossTrace read_loss_trace_csv(std::istream& in, const PacketMap& map) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("slot,packet_idx,frame_type,delivered", 0) != 0)
        throw ConfigError("loss trace CSV: missing or wrong header");
    LossTrace trace;
    std::uint64_t max_slot = 0;
    std::uint64_t prev_slot = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string slot, pidx, ftype, del;
        if (!std::getline(row, slot, ',') || !std::getline(row, pidx, ',') ||
            !std::getline(row, ftype, ',') || !std::getline(row, del))
            throw ConfigError("loss trace CSV: malformed row: " + line);
        VideoPduRecord rec;
        rec.slot = std::stoull(slot);
        rec.packet_index = static_cast<std::uint32_t>(std::stoul(pidx));
        rec.delivered = del == "1";
        if (rec.packet_index >= map.entries.size())
            throw ConsistencyError("loss trace CSV: packet " + pidx + " absent from map");
        if (frame_type_from_char(ftype.empty() ? '?' : ftype[0]) !=
            map.entries[rec.packet_index].frame_type)
            throw ConsistencyError("loss trace CSV: frame type mismatch for packet " + pidx);
        if (!first && rec.slot < prev_slot)
            throw ConsistencyError("loss trace CSV: slots must be non-decreasing");
        prev_slot = rec.slot;
        first = false;
        max_slot = std::max(max_slot, rec.slot);
        trace.video.push_back(rec);
    }
    trace.total_slots = max_slot + 1;
    return trace;
}

void write_d2d_trace_csv(const LossTrace& trace, std::ostream& out) {
    out << "slot,transmitted,succeeded\n";
    for (const auto& d : trace.d2d)
        out << d.slot << ',' << (d.transmitted ? 1 : 0) << ',' << (d.succeeded ? 1 : 0) << '\n';
}

void read_d2d_trace_csv(std::istream& in, LossTrace& trace) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("slot,transmitted,succeeded", 0) != 0)
        throw ConfigError("d2d trace CSV: missing or wrong header");
    trace.d2d.clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string slot, tx, ok;
        if (!std::getline(row, slot, ',') || !std::getline(row, tx, ',') ||
            !std::getline(row, ok))
            throw ConfigError("d2d trace CSV: malformed row: " + line);
        D2dSlotDecision d;
        d.slot = std::stoull(slot);
        d.transmitted = tx == "1";
        d.succeeded = ok == "1";
        if (d.succeeded && !d.transmitted)
            throw ConsistencyError("d2d trace CSV: succeeded without transmitting");
        trace.d2d.push_back(d);
    }
    trace.total_slots = std::max<std::uint64_t>(trace.total_slots, trace.d2d.size());
}

} // namespace d2dsim

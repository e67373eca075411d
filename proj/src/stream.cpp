#include "d2dsim/stream.hpp"

#include "d2dsim/errors.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace d2dsim {

std::string StreamConfig::effective_pattern() const {
    if (!gop_pattern.empty()) return gop_pattern;
    std::string p(gop_size, 'P');
    if (!p.empty()) p[0] = 'I';
    return p;
}

void StreamConfig::validate() const {
    if (gop_size < 1) throw ConfigError("stream: gop_size must be >= 1");
    if (frame_rate <= 0.0) throw ConfigError("stream: frame_rate must be > 0");
    if (duration_s <= 0.0) throw ConfigError("stream: duration must be > 0");
    if (packets_per_diff < 1) throw ConfigError("stream: packets_per_diff must be >= 1");
    if (packets_per_i < packets_per_diff)
        throw ConfigError("stream: packets_per_i must be >= packets_per_diff");
    const std::string p = effective_pattern();
    if (p.size() != gop_size)
        throw ConfigError("stream: gop_pattern length must equal gop_size");
    if (p[0] != 'I') throw ConfigError("stream: gop_pattern must start with 'I'");
    std::size_t i_count = 0;
    for (char c : p) {
        if (c == 'I') ++i_count;
        else if (c != 'P' && c != 'B')
            throw ConfigError(std::string("stream: illegal gop_pattern symbol '") + c + "'");
    }
    if (i_count != 1) throw ConfigError("stream: gop_pattern must contain exactly one 'I'");
}

char frame_type_char(FrameType t) { return t == FrameType::I ? 'I' : 'D'; }

FrameType frame_type_from_char(char c) {
    if (c == 'I') return FrameType::I;
    if (c == 'D') return FrameType::Diff;
    throw ConsistencyError(std::string("unknown frame type '") + c + "'");
}

std::uint32_t frame_count(const PacketMap& map) {
    return map.entries.empty() ? 0u : map.entries.back().frame_index + 1u;
}

PacketMap build_packet_map(const StreamConfig& cfg) {
    cfg.validate();
    const std::string pattern = cfg.effective_pattern();
    // Trailing partial GoPs are kept and truncated at the duration end.
    const auto total_frames =
        static_cast<std::uint32_t>(std::floor(cfg.duration_s * cfg.frame_rate + 1e-9));

    PacketMap map;
    std::uint32_t packet_index = 0;
    for (std::uint32_t f = 0; f < total_frames; ++f) {
        const char sym = pattern[f % cfg.gop_size];
        const FrameType type = sym == 'I' ? FrameType::I : FrameType::Diff;
        const std::uint32_t n = type == FrameType::I ? cfg.packets_per_i : cfg.packets_per_diff;
        const double release = static_cast<double>(f) / cfg.frame_rate;
        for (std::uint32_t k = 0; k < n; ++k)
            map.entries.push_back({packet_index++, f, type, release});
    }
    return map;
}

std::vector<PreambleEvent> preamble_schedule(const PacketMap& map) {
    if (map.entries.empty()) throw DomainError("preamble_schedule: empty packet map");
    std::vector<PreambleEvent> events;
    events.push_back({map.entries.front().release_time_s, map.entries.front().frame_type});
    FrameType prev = map.entries.front().frame_type;
    for (const auto& e : map.entries) {
        if (e.frame_type != prev) {
            events.push_back({e.release_time_s, e.frame_type});
            prev = e.frame_type;
        }
    }
    return events;
}

void write_packet_map_csv(const PacketMap& map, std::ostream& out) {
    out << "packet_idx,frame_idx,frame_type,release_time_s\n";
    char buf[64];
    for (const auto& e : map.entries) {
        std::snprintf(buf, sizeof buf, "%.17g", e.release_time_s);
        out << e.packet_index << ',' << e.frame_index << ','
            << frame_type_char(e.frame_type) << ',' << buf << '\n';
    }
}

PacketMap read_packet_map_csv(std::istream& in) {
    PacketMap map;
    std::string line;
    if (!std::getline(in, line) || line.rfind("packet_idx,frame_idx,frame_type,release_time_s", 0) != 0)
        throw ConfigError("packet map CSV: missing or wrong header");
    std::uint32_t expect = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string pidx, fidx, ftype, rel;
        if (!std::getline(row, pidx, ',') || !std::getline(row, fidx, ',') ||
            !std::getline(row, ftype, ',') || !std::getline(row, rel))
            throw ConfigError("packet map CSV: malformed row: " + line);
        PacketEntry e;
        e.packet_index = static_cast<std::uint32_t>(std::stoul(pidx));
        e.frame_index = static_cast<std::uint32_t>(std::stoul(fidx));
        e.frame_type = frame_type_from_char(ftype.empty() ? '?' : ftype[0]);
        e.release_time_s = std::stod(rel);
        if (e.packet_index != expect)
            throw ConsistencyError("packet map CSV: packet_idx not gapless at " + pidx);
        ++expect;
        map.entries.push_back(e);
    }
    return map;
}

} // namespace d2dsim

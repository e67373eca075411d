#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace d2dsim {

// Video source model: a fixed GoP structure packetized into 188-byte
// transport-stream packets. Every frame releases all of its packets at
// the frame's capture instant; I frames carry more packets than
// differential (P/B) frames.
struct StreamConfig {
    std::uint32_t gop_size = 128;
    std::string gop_pattern;          // empty -> "I" followed by P's
    double frame_rate = 30.0;         // frames per second
    std::uint32_t packets_per_i = 30;
    std::uint32_t packets_per_diff = 5;
    double duration_s = 60.0;

    std::string effective_pattern() const;
    void validate() const; // throws ConfigError
};

enum class FrameType : std::uint8_t { I, Diff };

char frame_type_char(FrameType t);
FrameType frame_type_from_char(char c);

struct PacketEntry {
    std::uint32_t packet_index = 0;
    std::uint32_t frame_index = 0;
    FrameType frame_type = FrameType::I;
    double release_time_s = 0.0;
};

struct PacketMap {
    std::vector<PacketEntry> entries;
    std::uint32_t packet_size_bytes = 188;
};

// Total number of frames covered by the map.
std::uint32_t frame_count(const PacketMap& map);

struct PreambleEvent {
    double time_s = 0.0;
    FrameType frame_type = FrameType::I;
};

PacketMap build_packet_map(const StreamConfig& cfg);

// One event at t=0 plus one at every release time where the frame type
// of the next packet differs from the previous packet's type.
std::vector<PreambleEvent> preamble_schedule(const PacketMap& map);

// CSV: packet_idx,frame_idx,frame_type,release_time_s (frame_type I or D)
void write_packet_map_csv(const PacketMap& map, std::ostream& out);
PacketMap read_packet_map_csv(std::istream& in);

} // namespace d2dsim

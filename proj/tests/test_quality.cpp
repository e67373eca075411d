#include "d2dsim/quality.hpp"

#include "d2dsim/errors.hpp"
#include "d2dsim/rng.hpp"

#include <doctest.h>

#include <sstream>

using namespace d2dsim;

namespace {

PacketMap small_map(std::uint32_t gop, const std::string& pattern, std::uint32_t ppi,
                    std::uint32_t ppd, double fps, double dur) {
    StreamConfig cfg;
    cfg.gop_size = gop;
    cfg.gop_pattern = pattern;
    cfg.packets_per_i = ppi;
    cfg.packets_per_diff = ppd;
    cfg.frame_rate = fps;
    cfg.duration_s = dur;
    return build_packet_map(cfg);
}

LossTrace trace_with_losses(const PacketMap& map, const std::vector<std::uint32_t>& lost) {
    LossTrace trace;
    trace.total_slots = map.entries.size();
    for (const auto& e : map.entries) {
        const bool is_lost =
            std::find(lost.begin(), lost.end(), e.packet_index) != lost.end();
        trace.video.push_back({e.packet_index, e.packet_index, !is_lost});
    }
    return trace;
}

// test-local reference: independent recomputation of the damage rule
double reference_p_det(const PacketMap& map, const std::vector<std::uint32_t>& lost) {
    const std::uint32_t frames = frame_count(map);
    std::vector<bool> direct(frames, false);
    std::vector<FrameType> type(frames, FrameType::I);
    for (const auto& e : map.entries) {
        type[e.frame_index] = e.frame_type;
        if (std::find(lost.begin(), lost.end(), e.packet_index) != lost.end())
            direct[e.frame_index] = true;
    }
    std::size_t damaged = 0;
    std::uint32_t g = 0;
    while (g < frames) {
        std::uint32_t end = g + 1;
        while (end < frames && type[end] != FrameType::I) ++end;
        if (direct[g]) {
            damaged += end - g;
        } else {
            for (std::uint32_t f = g + 1; f < end; ++f) damaged += direct[f] ? 1 : 0;
        }
        g = end;
    }
    return 1.0 - static_cast<double>(damaged) / frames;
}

} // namespace

TEST_CASE("no losses leaves every frame intact") {
    const auto map = small_map(4, "IPPP", 2, 1, 1.0, 8.0);
    const auto statuses = propagate_damage(trace_with_losses(map, {}), map);
    for (const auto& s : statuses) {
        CHECK_FALSE(s.directly_damaged);
        CHECK_FALSE(s.effectively_damaged);
    }
    CHECK(detection_probability(statuses) == 1.0);
}

TEST_CASE("one lost I packet damages the whole GoP") {
    const auto map = small_map(4, "IPPP", 3, 1, 1.0, 4.0);
    // lose one of frame 0's three packets
    const auto statuses = propagate_damage(trace_with_losses(map, {1}), map);
    REQUIRE(statuses.size() == 4);
    for (const auto& s : statuses) CHECK(s.effectively_damaged);
    CHECK(statuses[1].directly_damaged == false);
    CHECK(detection_probability(statuses) == 0.0);
    const auto gops = per_gop_damage(statuses);
    REQUIRE(gops.size() == 1);
    CHECK(gops[0].damaged_frames == 4);
    CHECK(gops[0].i_frame_lost);
}

TEST_CASE("diff losses stay local") {
    const auto map = small_map(4, "IPPP", 3, 1, 1.0, 4.0);
    // frames 1 and 3 are packets 3 and 5
    const auto statuses = propagate_damage(trace_with_losses(map, {3, 5}), map);
    CHECK(statuses[0].effectively_damaged == false);
    CHECK(statuses[1].effectively_damaged == true);
    CHECK(statuses[2].effectively_damaged == false);
    CHECK(statuses[3].effectively_damaged == true);
    CHECK(detection_probability(statuses) == doctest::Approx(0.5));
}

TEST_CASE("chain propagation flag damages the rest of the GoP") {
    const auto map = small_map(4, "IPPP", 3, 1, 1.0, 4.0);
    const auto statuses = propagate_damage(trace_with_losses(map, {3}), map, true);
    CHECK(statuses[0].effectively_damaged == false);
    CHECK(statuses[1].effectively_damaged == true);
    CHECK(statuses[2].effectively_damaged == true);
    CHECK(statuses[3].effectively_damaged == true);
}

TEST_CASE("randomized loss patterns match the reference rule") {
    const auto map = small_map(5, "IPBPB", 4, 2, 10.0, 3.0);
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        std::vector<std::uint32_t> lost;
        for (std::uint32_t p = 0; p < map.entries.size(); ++p)
            if (draw_uniform(700 + trial, p, DrawPurpose::d2d_access) < 0.2) lost.push_back(p);
        const auto statuses = propagate_damage(trace_with_losses(map, lost), map);
        CHECK(detection_probability(statuses) ==
              doctest::Approx(reference_p_det(map, lost)).epsilon(1e-12));
    }
}

TEST_CASE("dominance: promoting a diff loss to an I loss never helps") {
    const auto map = small_map(4, "IPPP", 2, 1, 1.0, 12.0);
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        std::vector<std::uint32_t> lost;
        for (std::uint32_t p = 0; p < map.entries.size(); ++p)
            if (draw_uniform(800 + trial, p, DrawPurpose::d2d_access) < 0.25) lost.push_back(p);
        const double base =
            detection_probability(propagate_damage(trace_with_losses(map, lost), map));
        // find a lost diff packet and move the loss to its GoP's I frame
        for (const auto idx : lost) {
            const auto& entry = map.entries[idx];
            if (entry.frame_type != FrameType::Diff) continue;
            const std::uint32_t gop_first_frame = (entry.frame_index / 4) * 4;
            std::uint32_t i_packet = 0;
            for (const auto& e : map.entries)
                if (e.frame_index == gop_first_frame) {
                    i_packet = e.packet_index;
                    break;
                }
            auto promoted = lost;
            promoted.erase(std::find(promoted.begin(), promoted.end(), idx));
            if (std::find(promoted.begin(), promoted.end(), i_packet) == promoted.end())
                promoted.push_back(i_packet);
            const double after = detection_probability(
                propagate_damage(trace_with_losses(map, promoted), map));
            CHECK(after <= base + 1e-12);
            break;
        }
    }
}

TEST_CASE("proxy lower bound on p_det") {
    const auto map = small_map(4, "IPPP", 2, 1, 1.0, 16.0);
    const std::uint32_t frames = frame_count(map);
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        std::vector<std::uint32_t> lost;
        for (std::uint32_t p = 0; p < map.entries.size(); ++p)
            if (draw_uniform(900 + trial, p, DrawPurpose::d2d_access) < 0.15) lost.push_back(p);
        const auto statuses = propagate_damage(trace_with_losses(map, lost), map);
        const auto gops = per_gop_damage(statuses);
        std::size_t damaged_gops = 0, isolated_diffs = 0;
        for (const auto& g : gops) damaged_gops += g.i_frame_lost ? 1 : 0;
        for (const auto& s : statuses)
            if (s.frame_type == FrameType::Diff && s.directly_damaged) ++isolated_diffs;
        const double bound =
            1.0 - static_cast<double>(damaged_gops * 4 + isolated_diffs) / frames;
        CHECK(detection_probability(statuses) >= bound - 1e-12);
    }
}

TEST_CASE("detection probability arithmetic") {
    std::vector<FrameStatus> statuses(8);
    for (std::uint32_t f = 0; f < 8; ++f) statuses[f].frame_index = f;
    CHECK(detection_probability(statuses) == 1.0);
    statuses[2].effectively_damaged = true;
    statuses[5].effectively_damaged = true;
    CHECK(detection_probability(statuses) == doctest::Approx(0.75));
    for (auto& s : statuses) s.effectively_damaged = true;
    CHECK(detection_probability(statuses) == 0.0);
    CHECK_THROWS_AS(detection_probability({}), DomainError);
}

TEST_CASE("relative throughput counting") {
    LossTrace trace;
    trace.total_slots = 100;
    for (std::uint64_t t = 0; t < 100; ++t) trace.d2d.push_back({t, false, false});
    CHECK(relative_throughput(trace) == 0.0);
    for (std::uint64_t t = 0; t < 37; ++t) {
        trace.d2d[t].transmitted = true;
        trace.d2d[t].succeeded = true;
    }
    CHECK(relative_throughput(trace) == doctest::Approx(0.37));
    for (auto& d : trace.d2d) d.transmitted = d.succeeded = true;
    CHECK(relative_throughput(trace) == 1.0);
}

TEST_CASE("efficiency per the definition") {
    CHECK(efficiency(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(efficiency(0.9, 0.5) == doctest::Approx(1.8));
    CHECK(efficiency(0.6, 0.75) == doctest::Approx(2.4));
    CHECK_THROWS_AS(efficiency(0.9, 1.0), DomainError);
    CHECK_THROWS_AS(efficiency(0.9, 1.2), DomainError);
}

TEST_CASE("trace consistency errors") {
    const auto map = small_map(2, "IP", 1, 1, 1.0, 2.0);
    LossTrace trace = trace_with_losses(map, {});
    trace.video[0].packet_index = 99;
    CHECK_THROWS_AS(propagate_damage(trace, map), ConsistencyError);
    LossTrace dup = trace_with_losses(map, {});
    dup.video[1].packet_index = 0;
    CHECK_THROWS_AS(propagate_damage(dup, map), ConsistencyError);
    LossTrace missing = trace_with_losses(map, {});
    missing.video.pop_back();
    CHECK_THROWS_AS(propagate_damage(missing, map), ConsistencyError);
}

TEST_CASE("loss trace csv round trip and d2d csv") {
    const auto map = small_map(3, "IPP", 2, 1, 5.0, 1.0);
    LossTrace trace = trace_with_losses(map, {2, 4});
    trace.d2d = {{0, true, true}, {1, true, false}, {2, false, false}};
    trace.total_slots = map.entries.size();

    std::stringstream video;
    write_loss_trace_csv(trace, map, video);
    const auto back = read_loss_trace_csv(video, map);
    REQUIRE(back.video.size() == trace.video.size());
    for (std::size_t i = 0; i < trace.video.size(); ++i) {
        CHECK(back.video[i].packet_index == trace.video[i].packet_index);
        CHECK(back.video[i].delivered == trace.video[i].delivered);
    }

    std::stringstream d2d;
    write_d2d_trace_csv(trace, d2d);
    LossTrace with_d2d = back;
    read_d2d_trace_csv(d2d, with_d2d);
    REQUIRE(with_d2d.d2d.size() == 3);
    CHECK(with_d2d.d2d[1].transmitted);
    CHECK_FALSE(with_d2d.d2d[1].succeeded);
}

TEST_CASE("quality report json carries the contract keys") {
    QualityReport report;
    report.p_det = 0.75;
    report.d2d_rel_throughput = 0.4;
    report.efficiency = efficiency(0.75, 0.4);
    report.per_gop = {{0, 2, false}};
    report.seeds = {1, 2, 3};
    report.stddev = 0.01;
    const auto j = quality_to_json(report);
    CHECK(j.at("metric") == "proxy");
    CHECK(j.at("p_det") == doctest::Approx(0.75));
    CHECK(j.at("d2d_rel_throughput") == doctest::Approx(0.4));
    CHECK(j.at("efficiency") == doctest::Approx(1.25));
    CHECK(j.at("seeds").size() == 3);
    CHECK(j.at("per_gop")[0].at("damaged_frames") == 2);
    CHECK(j.at("stddev") == doctest::Approx(0.01));

    QualityReport saturated;
    saturated.p_det = 0.5;
    saturated.d2d_rel_throughput = 1.0; // efficiency undefined
    const auto j2 = quality_to_json(saturated);
    CHECK(j2.at("efficiency").is_null());
}

#pragma once

#include "d2dsim/channel.hpp"
#include "d2dsim/mac.hpp"
#include "d2dsim/strategy.hpp"
#include "d2dsim/stream.hpp"

#include <cstdint>
#include <string>

#include <json.hpp>

namespace d2dsim {

struct SimConfig {
    StreamConfig stream;
    Topology topology;
    StrategyConfig strategy;

    // "flat" is accepted in place of a path and yields a 0 dB trace.
    std::string fading_low = "data/fading_epa_low.csv";
    std::string fading_high = "data/fading_epa_high.csv";
    FadingLabel fading_label = FadingLabel::low_speed;

    std::string mcs_table = "builtin"; // "builtin" or a CSV path

    int earfcn = 18100;
    double bandwidth_hz = 10e6;
    double noise_figure_db = 5.0;
    double ue_tx_power_dbm = 23.0;
    // Uplink-only scenario: recorded for fidelity, never used.
    double enb_tx_power_dbm = 25.0;
    double d2d_decode_threshold_db = 5.0;
    std::uint32_t report_delay = 4; // CQI reporting latency, subframes
    double slot_len_s = 1e-3;
    std::uint64_t seed = 1;
    bool chain_propagation = false;

    void validate() const; // throws ConfigError

    // Strict parse: unknown keys anywhere are a ConfigError.
    static SimConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static SimConfig load_file(const std::string& path);

    // Hash of the canonical JSON with the seed removed, so a
    // (config_hash, seed) pair identifies a run.
    std::uint64_t config_hash() const;
};

// Immutable data shared by every engine of a sweep.
struct SimInputs {
    FadingTrace low;
    FadingTrace high;
    McsTable mcs;

    const FadingTrace& trace_for(FadingLabel label) const {
        return label == FadingLabel::low_speed ? low : high;
    }

    // Relative paths resolve against base_dir (directory of the config
    // file, or the working directory for inline configs).
    static SimInputs load(const SimConfig& cfg, const std::string& base_dir = "");
};

} // namespace d2dsim

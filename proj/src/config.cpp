#include "d2dsim/config.hpp"

#include "d2dsim/errors.hpp"
#include "d2dsim/hash.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace d2dsim {

namespace {

void require_keys(const nlohmann::json& j, const std::string& where,
                  const std::set<std::string>& known) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key))
            throw ConfigError("config: unknown key '" + where + key + "'");
    }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

} // namespace

void SimConfig::validate() const {
    stream.validate();
    topology.validate();
    strategy.validate();
    if (bandwidth_hz <= 0) throw ConfigError("config: bandwidth_hz must be > 0");
    if (slot_len_s <= 0) throw ConfigError("config: slot_len_s must be > 0");
    if (report_delay > 8) throw ConfigError("config: report_delay must be in 0..8");
    if (fading_low.empty() || fading_high.empty())
        throw ConfigError("config: fading trace refs must be set");
    earfcn_to_uplink_freq_mhz(earfcn); // throws on out-of-band values
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    require_keys(j, "", {"stream", "topology", "strategy", "fading_low", "fading_high",
                         "fading_label", "mcs_table", "earfcn", "bandwidth_hz",
                         "noise_figure_db", "ue_tx_power_dbm", "enb_tx_power_dbm",
                         "d2d_decode_threshold_db", "report_delay", "slot_len_s", "seed",
                         "chain_propagation"});
    SimConfig cfg;
    if (j.contains("stream")) {
        const auto& s = j.at("stream");
        require_keys(s, "stream.", {"gop_size", "gop_pattern", "frame_rate", "packets_per_i",
                                    "packets_per_diff", "duration_s"});
        maybe(s, "gop_size", cfg.stream.gop_size);
        maybe(s, "gop_pattern", cfg.stream.gop_pattern);
        maybe(s, "frame_rate", cfg.stream.frame_rate);
        maybe(s, "packets_per_i", cfg.stream.packets_per_i);
        maybe(s, "packets_per_diff", cfg.stream.packets_per_diff);
        maybe(s, "duration_s", cfg.stream.duration_s);
    }
    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        require_keys(t, "topology.", {"ue_enb_dist_m", "d2d_pair_dist_m", "d2dtx_enb_dist_m",
                                      "ue_d2drx_dist_m"});
        maybe(t, "ue_enb_dist_m", cfg.topology.ue_enb_dist_m);
        maybe(t, "d2d_pair_dist_m", cfg.topology.d2d_pair_dist_m);
        maybe(t, "d2dtx_enb_dist_m", cfg.topology.d2dtx_enb_dist_m);
        maybe(t, "ue_d2drx_dist_m", cfg.topology.ue_d2drx_dist_m);
    }
    if (j.contains("strategy")) {
        const auto& s = j.at("strategy");
        require_keys(s, "strategy.", {"kind", "rho", "rho_i", "rho_d", "power_dbm", "dci_delay"});
        if (s.contains("kind")) cfg.strategy.kind = strategy_kind_from_name(s.at("kind"));
        maybe(s, "rho", cfg.strategy.rho);
        maybe(s, "rho_i", cfg.strategy.rho_i);
        maybe(s, "rho_d", cfg.strategy.rho_d);
        maybe(s, "power_dbm", cfg.strategy.d2d_tx_power_dbm);
        maybe(s, "dci_delay", cfg.strategy.dci_delay);
    }
    maybe(j, "fading_low", cfg.fading_low);
    maybe(j, "fading_high", cfg.fading_high);
    if (j.contains("fading_label"))
        cfg.fading_label = fading_label_from_name(j.at("fading_label"));
    maybe(j, "mcs_table", cfg.mcs_table);
    maybe(j, "earfcn", cfg.earfcn);
    maybe(j, "bandwidth_hz", cfg.bandwidth_hz);
    maybe(j, "noise_figure_db", cfg.noise_figure_db);
    maybe(j, "ue_tx_power_dbm", cfg.ue_tx_power_dbm);
    maybe(j, "enb_tx_power_dbm", cfg.enb_tx_power_dbm);
    maybe(j, "d2d_decode_threshold_db", cfg.d2d_decode_threshold_db);
    maybe(j, "report_delay", cfg.report_delay);
    maybe(j, "slot_len_s", cfg.slot_len_s);
    maybe(j, "seed", cfg.seed);
    maybe(j, "chain_propagation", cfg.chain_propagation);
    cfg.validate();
    return cfg;
}

nlohmann::json SimConfig::to_json() const {
    nlohmann::json j;
    j["stream"] = {{"gop_size", stream.gop_size},
                   {"gop_pattern", stream.effective_pattern()},
                   {"frame_rate", stream.frame_rate},
                   {"packets_per_i", stream.packets_per_i},
                   {"packets_per_diff", stream.packets_per_diff},
                   {"duration_s", stream.duration_s}};
    j["topology"] = {{"ue_enb_dist_m", topology.ue_enb_dist_m},
                     {"d2d_pair_dist_m", topology.d2d_pair_dist_m},
                     {"d2dtx_enb_dist_m", topology.d2dtx_enb_dist_m},
                     {"ue_d2drx_dist_m", topology.ue_d2drx_dist_m}};
    j["strategy"] = {{"kind", strategy_kind_name(strategy.kind)},
                     {"rho", strategy.rho},
                     {"rho_i", strategy.rho_i},
                     {"rho_d", strategy.rho_d},
                     {"power_dbm", strategy.d2d_tx_power_dbm},
                     {"dci_delay", strategy.dci_delay}};
    j["fading_low"] = fading_low;
    j["fading_high"] = fading_high;
    j["fading_label"] = fading_label_name(fading_label);
    j["mcs_table"] = mcs_table;
    j["earfcn"] = earfcn;
    j["bandwidth_hz"] = bandwidth_hz;
    j["noise_figure_db"] = noise_figure_db;
    j["ue_tx_power_dbm"] = ue_tx_power_dbm;
    j["enb_tx_power_dbm"] = enb_tx_power_dbm;
    j["d2d_decode_threshold_db"] = d2d_decode_threshold_db;
    j["report_delay"] = report_delay;
    j["slot_len_s"] = slot_len_s;
    j["seed"] = seed;
    j["chain_propagation"] = chain_propagation;
    return j;
}

SimConfig SimConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return from_json(j);
}

std::uint64_t SimConfig::config_hash() const {
    nlohmann::json j = to_json();
    j.erase("seed");
    return fnv1a64(j.dump());
}

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path == "flat" || path == "builtin" || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

} // namespace

SimInputs SimInputs::load(const SimConfig& cfg, const std::string& base_dir) {
    SimInputs inputs;
    inputs.low = cfg.fading_low == "flat"
                     ? FadingTrace::flat()
                     : FadingTrace::load_csv(resolve(cfg.fading_low, base_dir), "low_speed");
    inputs.high = cfg.fading_high == "flat"
                      ? FadingTrace::flat()
                      : FadingTrace::load_csv(resolve(cfg.fading_high, base_dir), "high_speed");
    inputs.mcs = cfg.mcs_table == "builtin"
                     ? McsTable::builtin_default()
                     : McsTable::load_csv(resolve(cfg.mcs_table, base_dir));
    inputs.mcs.validate();
    return inputs;
}

} // namespace d2dsim

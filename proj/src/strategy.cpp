#include "d2dsim/strategy.hpp"

#include "d2dsim/errors.hpp"

#include <cmath>

namespace d2dsim {

std::string strategy_kind_name(StrategyKind kind) {
    return kind == StrategyKind::FP ? "FP" : "FDTP";
}

StrategyKind strategy_kind_from_name(const std::string& name) {
    if (name == "FP") return StrategyKind::FP;
    if (name == "FDTP") return StrategyKind::FDTP;
    throw ConfigError("unknown strategy kind '" + name + "'");
}

namespace {
bool is_probability(double p) { return p >= 0.0 && p <= 1.0 && std::isfinite(p); }
} // namespace

void StrategyConfig::validate() const {
    if (!is_probability(rho)) throw ConfigError("strategy: rho must be in [0,1]");
    if (!is_probability(rho_i)) throw ConfigError("strategy: rho_i must be in [0,1]");
    if (!is_probability(rho_d)) throw ConfigError("strategy: rho_d must be in [0,1]");
    if (!std::isfinite(d2d_tx_power_dbm)) throw ConfigError("strategy: power_dbm not finite");
}

bool fp_decide(const StrategyConfig& cfg, double rng_draw) {
    if (cfg.kind != StrategyKind::FP) throw ConfigError("fp_decide: strategy kind is not FP");
    return rng_draw < cfg.rho;
}

AccessMode fdtp_update_mode(const AccessMode& state, const PreambleEvent& event,
                            std::uint64_t now_slot, std::uint32_t dci_delay,
                            double slot_len_s) {
    const auto event_slot = static_cast<std::uint64_t>(
        std::floor(event.time_s / slot_len_s + 1e-9));
    const std::uint64_t due = event_slot + dci_delay;
    if (due != now_slot)
        throw ProtocolError("fdtp_update_mode: event due at slot " + std::to_string(due) +
                            " applied at slot " + std::to_string(now_slot));
    if (now_slot < state.since_slot)
        throw ProtocolError("fdtp_update_mode: events applied out of order");

    const TxMode next = event.frame_type == FrameType::I ? TxMode::Low : TxMode::High;
    if (next == state.mode) return state; // duplicate same-type event
    return AccessMode{next, now_slot};
}

bool fdtp_decide(const StrategyConfig& cfg, const AccessMode& mode, double rng_draw) {
    if (cfg.kind != StrategyKind::FDTP)
        throw ConfigError("fdtp_decide: strategy kind is not FDTP");
    const double p = mode.mode == TxMode::Low ? cfg.rho_i : cfg.rho_d;
    return rng_draw < p;
}

bool access_decide(const StrategyConfig& cfg, const AccessMode& mode, double rng_draw) {
    return cfg.kind == StrategyKind::FP ? fp_decide(cfg, rng_draw)
                                        : fdtp_decide(cfg, mode, rng_draw);
}

bool d2d_success(bool transmitted, double sinr_d2d_db, double threshold_db) {
    return transmitted && sinr_d2d_db >= threshold_db;
}

} // namespace d2dsim

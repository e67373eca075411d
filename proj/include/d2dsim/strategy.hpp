#pragma once

#include "d2dsim/stream.hpp"

#include <cstdint>
#include <string>

namespace d2dsim {

enum class StrategyKind : std::uint8_t { FP, FDTP };

std::string strategy_kind_name(StrategyKind kind);
StrategyKind strategy_kind_from_name(const std::string& name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::FDTP;
    double rho = 0.5;     // FP access probability
    double rho_i = 0.0;   // FDTP probability while reference frames are in flight
    double rho_d = 0.5;   // FDTP probability otherwise
    double d2d_tx_power_dbm = 5.0;
    std::uint32_t dci_delay = 1; // subframes between preamble and applied DCI

    void validate() const; // throws ConfigError
};

// FDTP transmitter mode. LOW is entered when the last applied preamble
// announced an I frame, HIGH when it announced a differential frame.
enum class TxMode : std::uint8_t { Low, High };

struct AccessMode {
    TxMode mode = TxMode::High;
    std::uint64_t since_slot = 0;
};

bool fp_decide(const StrategyConfig& cfg, double rng_draw);

// Applies one preamble event. Must be called at exactly the slot where
// the event's DCI lands (event slot + dci_delay); earlier or later
// application is a protocol error. Same-type events are idempotent.
AccessMode fdtp_update_mode(const AccessMode& state, const PreambleEvent& event,
                            std::uint64_t now_slot, std::uint32_t dci_delay,
                            double slot_len_s);

bool fdtp_decide(const StrategyConfig& cfg, const AccessMode& mode, double rng_draw);

// Dispatch on cfg.kind. FDTP with rho_i == rho_d == rho is
// decision-identical to FP with rho under the same draws.
bool access_decide(const StrategyConfig& cfg, const AccessMode& mode, double rng_draw);

bool d2d_success(bool transmitted, double sinr_d2d_db, double threshold_db);

} // namespace d2dsim

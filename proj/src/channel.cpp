#include "d2dsim/channel.hpp"

#include "d2dsim/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace d2dsim {

void Topology::validate() const {
    if (ue_enb_dist_m <= 0 || d2d_pair_dist_m <= 0 || d2dtx_enb_dist_m <= 0 ||
        ue_d2drx_dist_m <= 0)
        throw ConfigError("topology: all distances must be > 0");
}

std::string fading_label_name(FadingLabel label) {
    return label == FadingLabel::low_speed ? "low_speed" : "high_speed";
}

FadingLabel fading_label_from_name(const std::string& name) {
    if (name == "low_speed" || name == "low") return FadingLabel::low_speed;
    if (name == "high_speed" || name == "high") return FadingLabel::high_speed;
    throw ConfigError("unknown fading label '" + name + "'");
}

FadingTrace FadingTrace::flat() {
    FadingTrace t;
    t.gain_db = {0.0};
    t.sample_period_s = 1e-3;
    t.label = "flat";
    return t;
}

FadingTrace FadingTrace::load_csv(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw ConfigError("fading trace: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_s,gain_db", 0) != 0)
        throw ConfigError("fading trace: missing t_s,gain_db header in " + path);

    FadingTrace t;
    t.label = label;
    double t0 = 0.0, t1 = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string ts, gs;
        if (!std::getline(row, ts, ',') || !std::getline(row, gs))
            throw ConfigError("fading trace: malformed row in " + path + ": " + line);
        const double tv = std::stod(ts);
        if (t.gain_db.empty()) t0 = tv;
        else if (t.gain_db.size() == 1) t1 = tv;
        t.gain_db.push_back(std::stod(gs));
    }
    if (t.gain_db.empty()) throw ConfigError("fading trace: no samples in " + path);
    t.sample_period_s = t.gain_db.size() > 1 ? t1 - t0 : 1e-3;
    if (t.sample_period_s <= 0)
        throw ConfigError("fading trace: non-positive sample period in " + path);
    return t;
}

double FadingTrace::gain_at(std::uint64_t slot, double slot_len_s, std::size_t offset) const {
    const auto idx = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(slot) * slot_len_s / sample_period_s + 1e-9));
    return gain_db[(idx + offset) % gain_db.size()];
}

double rx_power_dbm(const LinkBudget& budget, double fading_gain_db) {
    return budget.tx_power_dbm - budget.path_loss_db + fading_gain_db;
}

namespace {

struct UplinkBand {
    int band;
    int earfcn_low;
    int earfcn_high;
    double freq_low_mhz;
};

// E-UTRA FDD uplink ranges (3GPP TS 36.101 Table 5.7.3-1), common bands.
constexpr UplinkBand kUplinkBands[] = {
    {1, 18000, 18599, 1920.0},  {2, 18600, 19199, 1850.0}, {3, 19200, 19949, 1710.0},
    {4, 19950, 20399, 1710.0},  {5, 20400, 20649, 824.0},  {7, 20750, 21449, 2500.0},
    {8, 21450, 21799, 880.0},   {20, 24150, 24449, 832.0}, {28, 27210, 27659, 703.0},
};

} // namespace

double earfcn_to_uplink_freq_mhz(int earfcn) {
    for (const auto& b : kUplinkBands) {
        if (earfcn >= b.earfcn_low && earfcn <= b.earfcn_high)
            return b.freq_low_mhz + 0.1 * (earfcn - b.earfcn_low);
    }
    throw ConfigError("EARFCN " + std::to_string(earfcn) +
                      " outside the supported uplink bands");
}

double friis_path_loss_db(double dist_m, double freq_mhz) {
    if (dist_m <= 0 || freq_mhz <= 0)
        throw DomainError("friis_path_loss: distance and frequency must be > 0");
    return 32.44 + 20.0 * std::log10(dist_m / 1000.0) + 20.0 * std::log10(freq_mhz);
}

double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
    if (bandwidth_hz <= 0) throw DomainError("noise_floor: bandwidth must be > 0");
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
    if (mw <= 0) throw DomainError("mw_to_dbm: power must be > 0");
    return 10.0 * std::log10(mw);
}

double sinr_at_enb_db(double ue_rx_dbm, bool d2d_active, double d2d_rx_dbm, double noise_dbm) {
    const double denom_mw = dbm_to_mw(noise_dbm) + (d2d_active ? dbm_to_mw(d2d_rx_dbm) : 0.0);
    return ue_rx_dbm - mw_to_dbm(denom_mw);
}

double sinr_at_d2drx_db(double d2d_rx_dbm, bool lte_active, double ue_rx_dbm, double noise_dbm) {
    const double denom_mw = dbm_to_mw(noise_dbm) + (lte_active ? dbm_to_mw(ue_rx_dbm) : 0.0);
    return d2d_rx_dbm - mw_to_dbm(denom_mw);
}

} // namespace d2dsim

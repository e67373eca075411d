#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace d2dsim {

struct Topology {
    double ue_enb_dist_m = 200.0;
    double d2d_pair_dist_m = 10.0;
    double d2dtx_enb_dist_m = 200.0;
    double ue_d2drx_dist_m = 200.0;

    void validate() const;
};

enum class FadingLabel : std::uint8_t { low_speed, high_speed };

std::string fading_label_name(FadingLabel label);
FadingLabel fading_label_from_name(const std::string& name);

// Slot-indexed channel gain in dB, applied on top of path loss. The
// trace loops cyclically, so it may be shorter than the simulation.
struct FadingTrace {
    std::vector<double> gain_db;
    double sample_period_s = 1e-3;
    std::string label = "flat";

    static FadingTrace flat();
    // CSV with header t_s,gain_db; sample period inferred from the
    // first two rows.
    static FadingTrace load_csv(const std::string& path, const std::string& label);

    std::size_t size() const { return gain_db.size(); }
    double gain_at(std::uint64_t slot, double slot_len_s, std::size_t offset) const;
};

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double path_loss_db = 0.0;
};

// rx = tx - path_loss + fading gain
double rx_power_dbm(const LinkBudget& budget, double fading_gain_db);

// Standard E-UTRA linear mapping F = F_low + 0.1 * (N - N_offset) over
// the uplink band table shipped with the artifact.
double earfcn_to_uplink_freq_mhz(int earfcn);

// Free-space loss 32.44 + 20 log10(d_km) + 20 log10(f_MHz).
double friis_path_loss_db(double dist_m, double freq_mhz);

// -174 dBm/Hz thermal floor over the given bandwidth plus noise figure.
double noise_floor_dbm(double bandwidth_hz, double noise_figure_db);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// SINR of the uplink signal at the eNodeB; the D2D transmitter is the
// only interferer and contributes iff active this slot.
double sinr_at_enb_db(double ue_rx_dbm, bool d2d_active, double d2d_rx_dbm, double noise_dbm);

// Mirror image at the D2D receiver: the LTE UE is the interferer.
double sinr_at_d2drx_db(double d2d_rx_dbm, bool lte_active, double ue_rx_dbm, double noise_dbm);

} // namespace d2dsim

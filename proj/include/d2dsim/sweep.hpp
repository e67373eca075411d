#pragma once

#include "d2dsim/config.hpp"
#include "d2dsim/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace d2dsim {

struct AxisSpec {
    std::string key; // dotted config path, e.g. strategy.rho_d
    std::vector<nlohmann::json> values;
};

struct SweepSpec {
    nlohmann::json base;   // materialized base config
    std::string base_dir;  // directory for resolving trace paths
    AxisSpec axis1;
    std::optional<AxisSpec> axis2;
    std::vector<std::uint64_t> seeds;
    std::string out_csv;
    std::string out_json;

    void validate() const;
    static SweepSpec load_file(const std::string& path);
};

struct SweepRow {
    std::string strategy;
    double rho = 0.0;
    double rho_i = 0.0;
    double rho_d = 0.0;
    double power_dbm = 0.0;
    std::string fading_label;
    std::string seed; // decimal seed, or "mean"
    double d2d_throughput = 0.0;
    double p_det = 0.0;
    std::optional<double> efficiency;
    std::string status = "ok";
};

struct SweepStats {
    std::size_t executed = 0;
    std::size_t reused = 0;
    std::size_t failed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // raw rows then one mean row per grid point
    SweepStats stats;
};

// Runs the grid axis1 x axis2 x seeds on a bounded worker pool. Output
// ordering is deterministic regardless of completion order. Completed
// (config-hash, seed) rows found in the sidecar state file next to
// out_csv are reused instead of re-run; failed runs get status=error
// and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, unsigned workers = 1);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

struct ComparePoint {
    std::string fading_label;
    double d2d_throughput = 0.0;
    double p_det_fp = 0.0;
    double p_det_fdtp = 0.0; // interpolated at equal throughput
    double delta_p_det = 0.0;
    double ci95 = 0.0;
    std::string status = "ok"; // or no_comparison
};

// For each FP grid point, piecewise-linear interpolation of the FDTP
// mean curve at the same relative throughput. Points outside the FDTP
// curve's throughput range are marked no_comparison, never extrapolated.
std::vector<ComparePoint> compare_strategies(const std::vector<SweepRow>& fp_rows,
                                             const std::vector<SweepRow>& fdtp_rows);

void write_compare_csv(const std::vector<ComparePoint>& points, std::ostream& out);

} // namespace d2dsim

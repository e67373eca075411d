// Command-line front end: single runs, parameter sweeps, strategy
// comparison and offline trace analysis.

#include "d2dsim/config.hpp"
#include "d2dsim/engine.hpp"
#include "d2dsim/errors.hpp"
#include "d2dsim/hash.hpp"
#include "d2dsim/sweep.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

namespace {

using namespace d2dsim;

std::string dir_of(const std::string& path) {
    return std::filesystem::path(path).parent_path().string();
}

void write_text(const std::string& path, const std::string& text) {
    if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

struct RunArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned seeds = 20;
    std::string fading;
    std::string out;
    std::string trace_out;
    std::string map_out;
    unsigned workers = 1;
};

int cmd_run(const RunArgs& args) {
    SimConfig cfg = args.config_path.empty() ? SimConfig{} : SimConfig::load_file(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.fading.empty()) cfg.fading_label = fading_label_from_name(args.fading);
    const SimInputs inputs = SimInputs::load(cfg, dir_of(args.config_path));

    std::vector<std::uint64_t> seeds(args.seeds);
    for (unsigned i = 0; i < args.seeds; ++i) seeds[i] = cfg.seed + i;

    std::vector<SimResult> results(seeds.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            SimConfig c = cfg;
            c.seed = seeds[i];
            results[i] = run_sim(c, inputs);
        }
    };
    const unsigned workers = std::max(1u, args.workers);
    if (workers == 1 || seeds.size() == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // Aggregate per the averaging contract: mean metrics over the
    // seeds, sample stddev of p_det, per-GoP means.
    QualityReport agg;
    agg.seeds = seeds;
    double pd = 0, thr = 0, eff = 0;
    bool eff_defined = true;
    for (const auto& r : results) {
        pd += r.quality.p_det;
        thr += r.quality.d2d_rel_throughput.value_or(0.0);
        if (r.quality.efficiency) eff += *r.quality.efficiency;
        else eff_defined = false;
    }
    const auto n = static_cast<double>(results.size());
    agg.p_det = pd / n;
    agg.d2d_rel_throughput = thr / n;
    if (eff_defined) agg.efficiency = eff / n;
    if (results.size() > 1) {
        double ss = 0;
        for (const auto& r : results) {
            const double d = r.quality.p_det - agg.p_det;
            ss += d * d;
        }
        agg.stddev = std::sqrt(ss / (n - 1));
    }
    agg.per_gop = results.front().quality.per_gop;
    for (std::size_t g = 0; g < agg.per_gop.size(); ++g) {
        std::uint64_t damaged = 0;
        std::uint32_t i_lost = 0;
        for (const auto& r : results) {
            damaged += r.quality.per_gop[g].damaged_frames;
            i_lost += r.quality.per_gop[g].i_frame_lost ? 1 : 0;
        }
        agg.per_gop[g].damaged_frames =
            static_cast<std::uint32_t>(std::llround(static_cast<double>(damaged) / n));
        agg.per_gop[g].i_frame_lost = i_lost * 2 >= results.size();
    }

    nlohmann::json report = quality_to_json(agg);
    report["config_hash"] = hash_hex(results.front().config_hash);
    report["runs"] = nlohmann::json::array();
    for (const auto& r : results) report["runs"].push_back(result_to_json(r));

    if (!args.map_out.empty()) {
        std::ostringstream map_csv;
        write_packet_map_csv(build_packet_map(cfg.stream), map_csv);
        write_text(args.map_out, map_csv.str());
    }
    if (!args.trace_out.empty()) {
        Engine engine(cfg, inputs);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::ostringstream video, d2d;
            write_loss_trace_csv(results[i].loss_trace, engine.map(), video);
            write_d2d_trace_csv(results[i].loss_trace, d2d);
            const std::string suffix =
                seeds.size() == 1 ? "" : "_seed" + std::to_string(seeds[i]);
            write_text(args.trace_out + suffix + ".csv", video.str());
            write_text(args.trace_out + suffix + ".d2d.csv", d2d.str());
        }
    }

    if (args.out.empty()) std::cout << report.dump(1) << '\n';
    else write_text(args.out, report.dump(1) + "\n");
    return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& map_path,
                const std::string& config_path, const std::string& d2d_path,
                const std::string& out_path) {
    PacketMap map;
    if (!map_path.empty()) {
        std::ifstream in(map_path);
        if (!in) throw ConfigError("cannot open " + map_path);
        map = read_packet_map_csv(in);
    } else if (!config_path.empty()) {
        map = build_packet_map(SimConfig::load_file(config_path).stream);
    } else {
        throw ConfigError("analyze needs --map or --config to recover the packet map");
    }

    std::ifstream in(trace_path);
    if (!in) throw ConfigError("cannot open " + trace_path);
    LossTrace trace = read_loss_trace_csv(in, map);
    if (!d2d_path.empty()) {
        std::ifstream d2d(d2d_path);
        if (!d2d) throw ConfigError("cannot open " + d2d_path);
        read_d2d_trace_csv(d2d, trace);
    }

    const auto statuses = propagate_damage(trace, map);
    QualityReport report;
    report.p_det = detection_probability(statuses);
    report.per_gop = per_gop_damage(statuses);
    if (!d2d_path.empty()) {
        report.d2d_rel_throughput = relative_throughput(trace);
        if (*report.d2d_rel_throughput < 1.0)
            report.efficiency = efficiency(report.p_det, *report.d2d_rel_throughput);
    }
    const std::string text = quality_to_json(report).dump(1) + "\n";
    if (out_path.empty()) std::cout << text;
    else write_text(out_path, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slot-level simulator of D2D/LTE-uplink coexistence with "
                 "content-aware interference control"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run one configuration over a set of seeds");
    run->add_option("--config", run_args.config_path, "Config JSON (defaults when omitted)");
    auto* seed_opt = run->add_option("--seed", run_args.seed, "Base seed (overrides config)");
    run->add_option("--seeds", run_args.seeds, "Number of consecutive seeds")
        ->default_val(20);
    run->add_option("--fading", run_args.fading, "Fading label: low or high");
    run->add_option("--out", run_args.out, "Quality report JSON path (stdout when omitted)");
    run->add_option("--trace-out", run_args.trace_out, "Loss trace CSV path prefix");
    run->add_option("--map-out", run_args.map_out, "Packet map CSV path");
    run->add_option("--workers", run_args.workers, "Worker threads")->default_val(1);

    std::string spec_path, sweep_fading;
    unsigned sweep_workers = 1;
    auto* sweep = app.add_subcommand("sweep", "Run a sweep spec over its grid and seeds");
    sweep->add_option("--spec", spec_path, "SweepSpec JSON")->required();
    sweep->add_option("--workers", sweep_workers, "Worker threads")->default_val(1);
    sweep->add_option("--fading", sweep_fading, "Override base fading label: low or high");

    std::string fp_path, fdtp_path, cmp_out;
    auto* compare = app.add_subcommand("compare", "FDTP-vs-FP detection gap at equal throughput");
    compare->add_option("--fp", fp_path, "FP sweep result CSV")->required();
    compare->add_option("--fdtp", fdtp_path, "FDTP sweep result CSV")->required();
    compare->add_option("--out", cmp_out, "Comparison CSV path (stdout when omitted)");

    std::string an_trace, an_map, an_config, an_d2d, an_out;
    auto* analyze = app.add_subcommand("analyze", "Loss-trace CSV to quality JSON");
    analyze->add_option("--trace", an_trace, "Loss trace CSV")->required();
    analyze->add_option("--map", an_map, "Packet map CSV");
    analyze->add_option("--config", an_config, "Config JSON to rebuild the packet map");
    analyze->add_option("--d2d", an_d2d, "D2D decision CSV for throughput/efficiency");
    analyze->add_option("--out", an_out, "Report JSON path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            run_args.seed_set = seed_opt->count() > 0;
            return cmd_run(run_args);
        }
        if (*sweep) {
            SweepSpec spec = SweepSpec::load_file(spec_path);
            if (!sweep_fading.empty())
                spec.base["fading_label"] = fading_label_name(fading_label_from_name(sweep_fading));
            const SweepResult result = run_sweep(spec, sweep_workers);
            std::cerr << "sweep: " << result.stats.executed << " executed, "
                      << result.stats.reused << " reused, " << result.stats.failed
                      << " failed\n";
            return result.stats.failed == 0 ? 0 : 1;
        }
        if (*compare) {
            std::ifstream fp_in(fp_path), fdtp_in(fdtp_path);
            if (!fp_in) throw ConfigError("cannot open " + fp_path);
            if (!fdtp_in) throw ConfigError("cannot open " + fdtp_path);
            const auto points =
                compare_strategies(read_sweep_csv(fp_in), read_sweep_csv(fdtp_in));
            std::ostringstream text;
            write_compare_csv(points, text);
            if (cmp_out.empty()) std::cout << text.str();
            else write_text(cmp_out, text.str());
            return 0;
        }
        if (*analyze) return cmd_analyze(an_trace, an_map, an_config, an_d2d, an_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

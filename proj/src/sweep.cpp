#include "d2dsim/sweep.hpp"

#include "d2dsim/errors.hpp"
#include "d2dsim/hash.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace d2dsim {

namespace {

nlohmann::json::json_pointer pointer_for(const std::string& dotted_key) {
    std::string p = "/" + dotted_key;
    std::replace(p.begin(), p.end(), '.', '/');
    return nlohmann::json::json_pointer(p);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void SweepSpec::validate() const {
    if (seeds.empty()) throw ConfigError("sweep: at least one seed required");
    if (axis1.key.empty() || axis1.values.empty())
        throw ConfigError("sweep: axis1 needs a key and values");
    if (axis2 && (axis2->key.empty() || axis2->values.empty()))
        throw ConfigError("sweep: axis2 needs a key and values");
    // Axis keys must address paths that exist in the base config.
    // Input file refs are loaded once per sweep and cannot be swept.
    for (const AxisSpec* axis : {&axis1, axis2 ? &*axis2 : nullptr}) {
        if (!axis) continue;
        if (!base.contains(pointer_for(axis->key)))
            throw ConfigError("sweep: axis key '" + axis->key + "' not a config path");
        if (axis->key == "fading_low" || axis->key == "fading_high" ||
            axis->key == "mcs_table")
            throw ConfigError("sweep: axis key '" + axis->key +
                              "' is an input file ref and cannot be swept");
    }
    SimConfig::from_json(base); // full strict validation
}

SweepSpec SweepSpec::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("sweep: " + path + ": " + e.what());
    }
    for (const auto& [key, _] : j.items()) {
        static const std::set<std::string> known{"base", "axis1", "axis2", "seeds", "outputs"};
        if (!known.count(key)) throw ConfigError("sweep: unknown key '" + key + "'");
    }

    SweepSpec spec;
    const std::string spec_dir = std::filesystem::path(path).parent_path().string();
    if (!j.contains("base")) throw ConfigError("sweep: missing base config");
    if (j.at("base").is_string()) {
        std::filesystem::path base_path(j.at("base").get<std::string>());
        if (base_path.is_relative() && !spec_dir.empty())
            base_path = std::filesystem::path(spec_dir) / base_path;
        std::ifstream bin(base_path);
        if (!bin) throw ConfigError("sweep: cannot open base config " + base_path.string());
        bin >> spec.base;
        spec.base_dir = base_path.parent_path().string();
    } else {
        spec.base = j.at("base");
        spec.base_dir = spec_dir;
    }

    auto load_axis = [](const nlohmann::json& a) {
        AxisSpec axis;
        axis.key = a.at("key").get<std::string>();
        for (const auto& v : a.at("values")) axis.values.push_back(v);
        return axis;
    };
    if (!j.contains("axis1")) throw ConfigError("sweep: missing axis1");
    spec.axis1 = load_axis(j.at("axis1"));
    if (j.contains("axis2")) spec.axis2 = load_axis(j.at("axis2"));
    if (!j.contains("seeds")) throw ConfigError("sweep: missing seeds");
    for (const auto& s : j.at("seeds")) spec.seeds.push_back(s.get<std::uint64_t>());
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        for (const auto& [key, _] : o.items()) {
            if (key != "csv" && key != "json")
                throw ConfigError("sweep: unknown outputs key '" + key + "'");
        }
        if (o.contains("csv")) spec.out_csv = o.at("csv").get<std::string>();
        if (o.contains("json")) spec.out_json = o.at("json").get<std::string>();
    }
    spec.validate();
    return spec;
}

namespace {

struct Task {
    nlohmann::json config_json;
    std::uint64_t seed = 0;
    std::size_t grid_index = 0;
    std::string resume_key;
};

// Best-effort shell from the raw JSON so even invalid grid points keep
// their identifying columns in the output.
SweepRow row_shell(const nlohmann::json& j, const std::string& seed_text) {
    SweepRow row;
    const auto s = j.value("strategy", nlohmann::json::object());
    row.strategy = s.value("kind", "FDTP");
    row.rho = s.value("rho", 0.0);
    row.rho_i = s.value("rho_i", 0.0);
    row.rho_d = s.value("rho_d", 0.0);
    row.power_dbm = s.value("power_dbm", 0.0);
    row.fading_label = j.value("fading_label", "low_speed");
    row.seed = seed_text;
    return row;
}

nlohmann::json row_to_json(const SweepRow& row) {
    nlohmann::json j{{"strategy", row.strategy}, {"rho", row.rho},
                     {"rho_i", row.rho_i},       {"rho_d", row.rho_d},
                     {"power_dbm", row.power_dbm}, {"fading_label", row.fading_label},
                     {"seed", row.seed},         {"d2d_throughput", row.d2d_throughput},
                     {"p_det", row.p_det},       {"status", row.status}};
    j["efficiency"] = row.efficiency ? nlohmann::json(*row.efficiency) : nullptr;
    return j;
}

SweepRow row_from_json(const nlohmann::json& j) {
    SweepRow row;
    row.strategy = j.at("strategy").get<std::string>();
    row.rho = j.at("rho").get<double>();
    row.rho_i = j.at("rho_i").get<double>();
    row.rho_d = j.at("rho_d").get<double>();
    row.power_dbm = j.at("power_dbm").get<double>();
    row.fading_label = j.at("fading_label").get<std::string>();
    row.seed = j.at("seed").get<std::string>();
    row.d2d_throughput = j.at("d2d_throughput").get<double>();
    row.p_det = j.at("p_det").get<double>();
    if (!j.at("efficiency").is_null()) row.efficiency = j.at("efficiency").get<double>();
    row.status = j.at("status").get<std::string>();
    return row;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, unsigned workers) {
    spec.validate();

    // Resume sidecar: completed (config-hash, seed) -> row.
    const std::string state_path = spec.out_csv.empty() ? "" : spec.out_csv + ".state.json";
    nlohmann::json state = nlohmann::json::object();
    if (!state_path.empty() && std::filesystem::exists(state_path)) {
        std::ifstream in(state_path);
        try {
            in >> state;
        } catch (const nlohmann::json::exception&) {
            state = nlohmann::json::object(); // unreadable state: recompute
        }
    }

    // Materialize the grid in axis1-major order.
    std::vector<Task> tasks;
    std::vector<std::size_t> grid_of_task;
    const std::size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
    std::size_t grid_points = spec.axis1.values.size() * n2;
    for (std::size_t i1 = 0; i1 < spec.axis1.values.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            nlohmann::json grid_json = spec.base;
            grid_json[pointer_for(spec.axis1.key)] = spec.axis1.values[i1];
            if (spec.axis2) grid_json[pointer_for(spec.axis2->key)] = spec.axis2->values[i2];
            for (const auto seed : spec.seeds) {
                Task task;
                task.config_json = grid_json;
                task.config_json["seed"] = seed;
                task.seed = seed;
                task.grid_index = i1 * n2 + i2;
                try {
                    const auto cfg = SimConfig::from_json(task.config_json);
                    task.resume_key = hash_hex(cfg.config_hash()) + "-" + std::to_string(seed);
                } catch (const std::exception&) {
                    // invalid grid point: key it by the raw json so the
                    // row still exists and the sweep continues
                    task.resume_key =
                        hash_hex(fnv1a64(grid_json.dump())) + "-" + std::to_string(seed);
                }
                tasks.push_back(std::move(task));
            }
        }
    }

    SweepResult result;
    std::vector<SweepRow> raw(tasks.size());
    std::vector<bool> reused(tasks.size(), false);

    // Shared immutable inputs: every grid point uses the same traces
    // and table files, so load them once from the base config.
    const SimInputs inputs = SimInputs::load(SimConfig::from_json(spec.base), spec.base_dir);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    auto worker_fn = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            if (auto it = state.find(task.resume_key); it != state.end()) {
                raw[i] = row_from_json(*it);
                reused[i] = true;
                continue;
            }
            SweepRow row = row_shell(task.config_json, std::to_string(task.seed));
            try {
                const SimConfig cfg = SimConfig::from_json(task.config_json);
                const SimResult r = run_sim(cfg, inputs);
                row.d2d_throughput = r.quality.d2d_rel_throughput.value_or(0.0);
                row.p_det = r.quality.p_det;
                row.efficiency = r.quality.efficiency;
            } catch (const std::exception&) {
                row.status = "error";
                failures.fetch_add(1);
            }
            raw[i] = std::move(row);
        }
    };

    workers = std::max(1u, workers);
    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        result.rows.push_back(raw[i]);
        if (reused[i]) ++result.stats.reused;
        else ++result.stats.executed;
    }
    result.stats.failed = failures.load();

    // One mean row per grid point, over its ok seed rows.
    for (std::size_t g = 0; g < grid_points; ++g) {
        std::vector<const SweepRow*> ok;
        const SweepRow* any = nullptr;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].grid_index != g) continue;
            any = &raw[i];
            if (raw[i].status == "ok") ok.push_back(&raw[i]);
        }
        if (!any) continue;
        SweepRow mean = *any;
        mean.seed = "mean";
        if (ok.empty()) {
            mean.status = "error";
            mean.d2d_throughput = 0;
            mean.p_det = 0;
            mean.efficiency.reset();
        } else {
            mean.status = "ok";
            double thr = 0, pd = 0, eff = 0;
            bool eff_defined = true;
            for (const auto* r : ok) {
                thr += r->d2d_throughput;
                pd += r->p_det;
                if (r->efficiency) eff += *r->efficiency;
                else eff_defined = false;
            }
            mean.d2d_throughput = thr / static_cast<double>(ok.size());
            mean.p_det = pd / static_cast<double>(ok.size());
            if (eff_defined) mean.efficiency = eff / static_cast<double>(ok.size());
            else mean.efficiency.reset();
        }
        result.rows.push_back(std::move(mean));
    }

    if (!spec.out_csv.empty()) {
        if (const auto dir = std::filesystem::path(spec.out_csv).parent_path(); !dir.empty())
            std::filesystem::create_directories(dir);
        std::ofstream out(spec.out_csv);
        if (!out) throw ConfigError("sweep: cannot write " + spec.out_csv);
        write_sweep_csv(result.rows, out);

        for (std::size_t i = 0; i < tasks.size(); ++i)
            if (raw[i].status == "ok") state[tasks[i].resume_key] = row_to_json(raw[i]);
        std::ofstream st(state_path);
        st << state.dump(1) << '\n';
    }
    if (!spec.out_json.empty()) {
        if (const auto dir = std::filesystem::path(spec.out_json).parent_path(); !dir.empty())
            std::filesystem::create_directories(dir);
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : result.rows) rows_json.push_back(row_to_json(row));
        std::ofstream out(spec.out_json);
        out << nlohmann::json{{"rows", rows_json},
                              {"executed", result.stats.executed},
                              {"reused", result.stats.reused},
                              {"failed", result.stats.failed}}
                   .dump(1)
            << '\n';
    }
    return result;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "strategy,rho,rho_i,rho_d,power_dbm,fading_label,seed,d2d_throughput,p_det,"
           "efficiency,status\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << fmt_double(r.rho) << ',' << fmt_double(r.rho_i) << ','
            << fmt_double(r.rho_d) << ',' << fmt_double(r.power_dbm) << ',' << r.fading_label
            << ',' << r.seed << ',' << fmt_double(r.d2d_throughput) << ','
            << fmt_double(r.p_det) << ',' << (r.efficiency ? fmt_double(*r.efficiency) : "")
            << ',' << r.status << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("strategy,rho,rho_i,rho_d,power_dbm", 0) != 0)
        throw ConfigError("sweep CSV: missing or wrong header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::array<std::string, 11> col;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (i + 1 < col.size()) {
                if (!std::getline(row, col[i], ',')) throw ConfigError("sweep CSV: short row");
            } else {
                std::getline(row, col[i]);
            }
        }
        SweepRow r;
        r.strategy = col[0];
        r.rho = std::stod(col[1]);
        r.rho_i = std::stod(col[2]);
        r.rho_d = std::stod(col[3]);
        r.power_dbm = std::stod(col[4]);
        r.fading_label = col[5];
        r.seed = col[6];
        r.d2d_throughput = std::stod(col[7]);
        r.p_det = std::stod(col[8]);
        if (!col[9].empty()) r.efficiency = std::stod(col[9]);
        r.status = col[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

struct CurvePoint {
    double throughput = 0;
    double p_det = 0;
    double var = 0; // sample variance of p_det
    std::size_t n = 0;
};

// Group raw (non-mean) ok rows by grid point and reduce to mean curve
// points sorted by throughput.
std::map<std::string, std::vector<CurvePoint>> curves_by_label(const std::vector<SweepRow>& rows) {
    std::map<std::string, std::map<std::string, std::vector<const SweepRow*>>> groups;
    for (const auto& r : rows) {
        if (r.seed == "mean" || r.status != "ok") continue;
        std::ostringstream key;
        key << r.strategy << '|' << fmt_double(r.rho) << '|' << fmt_double(r.rho_i) << '|'
            << fmt_double(r.rho_d) << '|' << fmt_double(r.power_dbm);
        groups[r.fading_label][key.str()].push_back(&r);
    }
    std::map<std::string, std::vector<CurvePoint>> curves;
    for (auto& [label, by_point] : groups) {
        for (auto& [_, members] : by_point) {
            CurvePoint p;
            p.n = members.size();
            for (const auto* r : members) {
                p.throughput += r->d2d_throughput;
                p.p_det += r->p_det;
            }
            p.throughput /= static_cast<double>(p.n);
            p.p_det /= static_cast<double>(p.n);
            if (p.n > 1) {
                double ss = 0;
                for (const auto* r : members) {
                    const double d = r->p_det - p.p_det;
                    ss += d * d;
                }
                p.var = ss / static_cast<double>(p.n - 1);
            }
            curves[label].push_back(p);
        }
        std::sort(curves[label].begin(), curves[label].end(),
                  [](const CurvePoint& a, const CurvePoint& b) {
                      return a.throughput < b.throughput;
                  });
    }
    return curves;
}

} // namespace

std::vector<ComparePoint> compare_strategies(const std::vector<SweepRow>& fp_rows,
                                             const std::vector<SweepRow>& fdtp_rows) {
    const auto fp_curves = curves_by_label(fp_rows);
    const auto fdtp_curves = curves_by_label(fdtp_rows);

    std::vector<ComparePoint> out;
    for (const auto& [label, fp_curve] : fp_curves) {
        const auto it = fdtp_curves.find(label);
        for (const auto& fp : fp_curve) {
            ComparePoint cp;
            cp.fading_label = label;
            cp.d2d_throughput = fp.throughput;
            cp.p_det_fp = fp.p_det;
            if (it == fdtp_curves.end() || it->second.empty() ||
                fp.throughput < it->second.front().throughput ||
                fp.throughput > it->second.back().throughput) {
                cp.status = "no_comparison"; // refuse extrapolation
                out.push_back(cp);
                continue;
            }
            const auto& curve = it->second;
            std::size_t hi = curve.size() > 1 ? 1 : 0;
            while (hi + 1 < curve.size() && curve[hi].throughput < fp.throughput) ++hi;
            const auto& a = curve[hi > 0 ? hi - 1 : 0];
            const auto& b = curve[hi];
            const double span = b.throughput - a.throughput;
            const double w = span > 0 ? (fp.throughput - a.throughput) / span : 0.0;
            cp.p_det_fdtp = a.p_det + w * (b.p_det - a.p_det);
            cp.delta_p_det = cp.p_det_fdtp - fp.p_det;
            const double var_fdtp =
                (1 - w) * (1 - w) * (a.n ? a.var / a.n : 0) + w * w * (b.n ? b.var / b.n : 0);
            const double var_fp = fp.n ? fp.var / fp.n : 0;
            cp.ci95 = 1.96 * std::sqrt(var_fp + var_fdtp);
            out.push_back(cp);
        }
    }
    return out;
}

void write_compare_csv(const std::vector<ComparePoint>& points, std::ostream& out) {
    out << "fading_label,d2d_throughput,p_det_fp,p_det_fdtp,delta_p_det,ci95,status\n";
    for (const auto& p : points) {
        out << p.fading_label << ',' << fmt_double(p.d2d_throughput) << ','
            << fmt_double(p.p_det_fp) << ','
            << (p.status == "ok" ? fmt_double(p.p_det_fdtp) : "") << ','
            << (p.status == "ok" ? fmt_double(p.delta_p_det) : "") << ','
            << (p.status == "ok" ? fmt_double(p.ci95) : "") << ',' << p.status << '\n';
    }
}

} // namespace d2dsim

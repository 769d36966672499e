#include "dualsu11/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace dualsu11 {
namespace {

using nlohmann::ordered_json;

void validate_axis(const AxisSpec& axis, const std::string& expected,
                   const char* label) {
    if (axis.parameter != expected)
        throw ConfigError(std::string(label) + " must sweep " + expected +
                          " (got \"" + axis.parameter + "\")");
    if (axis.count < 2)
        throw ConfigError(std::string(label) + ": count must be at least 2");
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop))
        throw ConfigError(std::string(label) + ": range must be finite");
}

SweepRow evaluate_point(const InterferometerConfig& cfg, bool optimize) {
    SensitivityResult r;
    if (optimize) {
        try {
            r = optimize_phi_su(cfg).result;
        } catch (const NoSensitivePointError&) {
            r = sensitivity_at(cfg);
        }
    } else {
        r = sensitivity_at(cfg);
    }
    SweepRow row;
    row.phi_b = cfg.sample_phase_phi_b;
    row.mean_N = r.mean_N;
    row.delta_N = r.delta_N;
    row.dN_dphi = r.dNdphi;
    row.delta_phi_sq = r.delta_phi_sq;
    row.snl_sq = r.snl_sq;
    row.S2_db = r.S2_db;
    row.phi_su = r.phi_su_used;
    row.insensitive = r.insensitive;
    return row;
}

const char* bell_name(BellState b) {
    switch (b) {
        case BellState::PhiPlus: return "phi_plus";
        case BellState::PhiMinus: return "phi_minus";
        case BellState::PsiPlus: return "psi_plus";
        default: return "psi_minus";
    }
}

const char* placement_name(Placement p) {
    switch (p) {
        case Placement::BeforePlates: return "before";
        case Placement::BetweenPlates: return "between";
        default: return "after";
    }
}

double resolved_transmission(const InterferometerConfig& cfg, Frequency f) {
    const auto& override_t = (f == Frequency::Signal) ? cfg.transmission_signal
                                                      : cfg.transmission_idler;
    return override_t ? *override_t : std::sqrt(1.0 - cfg.loss_intensity_l);
}

ordered_json axis_to_json(const AxisSpec& axis) {
    ordered_json j;
    j["parameter"] = axis.parameter;
    j["start"] = axis.start;
    j["stop"] = axis.stop;
    j["count"] = axis.count;
    return j;
}

ordered_json config_to_json(const InterferometerConfig& cfg) {
    ordered_json j;
    j["gain_g"] = cfg.gain_g;
    j["loss_intensity_l"] = cfg.loss_intensity_l;
    j["bell"] = bell_name(cfg.bell);
    j["placement"] = placement_name(cfg.placement);
    j["sample_phase_phi_b"] = cfg.sample_phase_phi_b;
    j["sample_axis_delta"] = cfg.sample_axis_delta;
    j["phi_su"] = cfg.phi_su;
    ordered_json seed = ordered_json::object();
    for (const auto& [mode, amp] : cfg.seed)
        seed[std::string(mode_name(mode))] = {amp.real(), amp.imag()};
    j["seed"] = seed;
    ordered_json modes = ordered_json::array();
    for (ModeIndex m : cfg.detection.modes) modes.push_back(std::string(mode_name(m)));
    j["detection"] = {{"modes", modes},
                      {"basis", cfg.detection.basis == DetectionBasis::AD ? "AD" : "HV"}};
    j["transmission_signal"] = resolved_transmission(cfg, Frequency::Signal);
    j["transmission_idler"] = resolved_transmission(cfg, Frequency::Idler);
    return j;
}

// --- config file parsing ---------------------------------------------------

void require_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                  const std::string& path) {
    for (const auto& item : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            std::string valid;
            for (const char* k : allowed) {
                if (!valid.empty()) valid += ", ";
                valid += k;
            }
            throw ConfigError("unknown key \"" + item.key() + "\" in " + path +
                              " (valid keys: " + valid + ")");
        }
    }
}

double get_double(const ordered_json& j, const std::string& path) {
    if (!j.is_number())
        throw ConfigError(path + " must be a number");
    return j.get<double>();
}

int get_count(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw ConfigError(path + " must be an integer");
    return j.get<int>();
}

std::string get_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string())
        throw ConfigError(path + " must be a string");
    return j.get<std::string>();
}

Complex get_amplitude(const ordered_json& j, const std::string& path) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(path + " must be a number or a [re, im] pair");
}

AxisSpec parse_axis(const ordered_json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + " must be an object");
    require_keys(j, {"parameter", "start", "stop", "count"}, path);
    AxisSpec axis;
    if (!j.contains("parameter") || !j.contains("start") || !j.contains("stop") ||
        !j.contains("count"))
        throw ConfigError(path + " needs parameter, start, stop, and count");
    axis.parameter = get_string(j["parameter"], path + ".parameter");
    if (axis.parameter != "sample_phase_phi_b" && axis.parameter != "sample_axis_delta")
        throw ConfigError(path + ".parameter must be sample_phase_phi_b or sample_axis_delta");
    axis.start = get_double(j["start"], path + ".start");
    axis.stop = get_double(j["stop"], path + ".stop");
    axis.count = get_count(j["count"], path + ".count");
    if (axis.count < 2) throw ConfigError(path + ".count must be at least 2");
    return axis;
}

}  // namespace

std::vector<double> axis_values(const AxisSpec& axis) {
    std::vector<double> xs(axis.count);
    for (int k = 0; k < axis.count; ++k)
        xs[k] = axis.start + (axis.stop - axis.start) * k / (axis.count - 1);
    return xs;
}

SweepTable run_phase_sweep(const SweepRequest& req) {
    validate_axis(req.axis1, "sample_phase_phi_b", "sweep axis1");
    if (req.axis2)
        throw ConfigError("a phase sweep takes a single axis; use the map command for two");

    const std::vector<double> xs = axis_values(req.axis1);
    SweepTable table;
    table.axis1 = req.axis1;
    table.rows.resize(xs.size());
    parallel_for(xs.size(), req.threads, [&](std::size_t i) {
        InterferometerConfig cfg = req.base;
        cfg.sample_phase_phi_b = xs[i];
        table.rows[i] = evaluate_point(cfg, req.optimize_phi_su);
    });
    return table;
}

MapGrid run_map(const SweepRequest& req) {
    validate_axis(req.axis1, "sample_phase_phi_b", "map axis1");
    if (!req.axis2) throw ConfigError("map needs axis2 over sample_axis_delta");
    validate_axis(*req.axis2, "sample_axis_delta", "map axis2");

    MapGrid grid;
    grid.phi_b = axis_values(req.axis1);
    grid.delta = axis_values(*req.axis2);
    const std::size_t width = grid.phi_b.size();
    const std::size_t cells = width * grid.delta.size();
    grid.s2_db.resize(cells);
    grid.phi_su.resize(cells);
    parallel_for(cells, req.threads, [&](std::size_t idx) {
        InterferometerConfig cfg = req.base;
        cfg.sample_phase_phi_b = grid.phi_b[idx % width];
        cfg.sample_axis_delta = grid.delta[idx / width];
        const SweepRow row = evaluate_point(cfg, req.optimize_phi_su);
        grid.s2_db[idx] =
            row.insensitive ? kMapCeilingDb : std::min(row.S2_db, kMapCeilingDb);
        grid.phi_su[idx] = row.phi_su;
    });
    return grid;
}

ValidationReport run_validation(const InterferometerConfig& cfg, int cutoff) {
    if (cutoff < 2) throw ConfigError("validate: cutoff must be at least 2");
    if (cfg.gain_g > 0.5)
        throw ConfigError("validate: oracle certification requires gain_g <= 0.5, got " +
                          std::to_string(cfg.gain_g));

    const PipelineResult engine = build_and_run(cfg);
    const FockState f1 = run_pipeline_fock(cfg, cutoff);
    const FockState f2 = run_pipeline_fock(cfg, 2 * cutoff);

    std::vector<std::pair<std::string, std::vector<ModeIndex>>> subsets = {
        {"sH", {kSignalH}},
        {"sV", {kSignalV}},
        {"iH", {kIdlerH}},
        {"iV", {kIdlerV}},
        {"detection", cfg.detection.modes},
        {"all", {kSignalH, kSignalV, kIdlerH, kIdlerV}},
    };

    ValidationReport report;
    report.cutoff = cutoff;
    report.fock_converged = f1.converged && f2.converged;
    report.max_leakage = std::max(f1.max_leakage, f2.max_leakage);
    report.max_norm_drift = std::max(f1.max_norm_drift, f2.max_norm_drift);

    auto rel = [](double got, double want) {
        return std::abs(got - want) / std::max(std::abs(want), 1e-12);
    };
    for (const auto& [name, modes] : subsets) {
        const PhotonStatistics e = photon_statistics(engine.output, modes);
        const PhotonStatistics a = fock_photon_statistics(f1, modes);
        const PhotonStatistics b = fock_photon_statistics(f2, modes);
        ValidationRow row;
        row.subset = name;
        row.engine_mean = e.mean;
        row.engine_variance = e.variance;
        row.fock_mean = a.mean;
        row.fock_variance = a.variance;
        row.rel_mean = rel(e.mean, a.mean);
        row.rel_variance = rel(e.variance, a.variance);
        report.rows.push_back(row);
        report.max_relative_error =
            std::max({report.max_relative_error, row.rel_mean, row.rel_variance});
        report.certificate_max_delta =
            std::max({report.certificate_max_delta, std::abs(a.mean - b.mean),
                      std::abs(a.variance - b.variance)});
    }
    report.passed = report.fock_converged &&
                    report.certificate_max_delta <= kValidationCertificateLimit &&
                    report.max_relative_error <= kValidationRelErrLimit;
    return report;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_string(buf.str(), path);
}

LoadedConfig load_config_string(const std::string& text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": config must be a JSON object");

    require_keys(j,
                 {"gain_g", "loss_intensity_l", "bell", "placement",
                  "sample_phase_phi_b", "sample_axis_delta", "phi_su", "seed",
                  "detection", "transmission_signal", "transmission_idler", "axis1",
                  "axis2", "optimize_phi_su"},
                 "config");

    LoadedConfig loaded;
    InterferometerConfig& cfg = loaded.config;
    if (j.contains("gain_g")) cfg.gain_g = get_double(j["gain_g"], "gain_g");
    if (j.contains("loss_intensity_l"))
        cfg.loss_intensity_l = get_double(j["loss_intensity_l"], "loss_intensity_l");
    if (j.contains("bell")) {
        const std::string name = get_string(j["bell"], "bell");
        if (name == "phi_plus") cfg.bell = BellState::PhiPlus;
        else if (name == "phi_minus") cfg.bell = BellState::PhiMinus;
        else if (name == "psi_plus") cfg.bell = BellState::PsiPlus;
        else if (name == "psi_minus") cfg.bell = BellState::PsiMinus;
        else
            throw ConfigError("bell must be one of phi_plus, phi_minus, psi_plus, "
                              "psi_minus (got \"" + name + "\")");
    }
    if (j.contains("placement")) {
        const std::string name = get_string(j["placement"], "placement");
        if (name == "before") cfg.placement = Placement::BeforePlates;
        else if (name == "between") cfg.placement = Placement::BetweenPlates;
        else if (name == "after") cfg.placement = Placement::AfterPlates;
        else
            throw ConfigError("placement must be one of before, between, after (got \"" +
                              name + "\")");
    }
    if (j.contains("sample_phase_phi_b"))
        cfg.sample_phase_phi_b = get_double(j["sample_phase_phi_b"], "sample_phase_phi_b");
    if (j.contains("sample_axis_delta"))
        cfg.sample_axis_delta = get_double(j["sample_axis_delta"], "sample_axis_delta");
    if (j.contains("phi_su")) cfg.phi_su = get_double(j["phi_su"], "phi_su");
    if (j.contains("seed")) {
        const ordered_json& seed = j["seed"];
        if (!seed.is_object()) throw ConfigError("seed must be an object of mode: amplitude");
        for (const auto& item : seed.items()) {
            ModeIndex mode;
            try {
                mode = parse_mode(item.key());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("seed: ") + e.what());
            }
            cfg.seed[mode] = get_amplitude(item.value(), "seed." + item.key());
        }
    }
    if (j.contains("detection")) {
        const ordered_json& det = j["detection"];
        if (!det.is_object()) throw ConfigError("detection must be an object");
        require_keys(det, {"modes", "basis"}, "detection");
        if (det.contains("modes")) {
            if (!det["modes"].is_array() || det["modes"].empty())
                throw ConfigError("detection.modes must be a non-empty array of mode names");
            cfg.detection.modes.clear();
            for (const ordered_json& m : det["modes"]) {
                try {
                    cfg.detection.modes.push_back(
                        parse_mode(get_string(m, "detection.modes[]")));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("detection.modes: ") + e.what());
                }
            }
        }
        if (det.contains("basis")) {
            const std::string basis = get_string(det["basis"], "detection.basis");
            if (basis == "HV") cfg.detection.basis = DetectionBasis::HV;
            else if (basis == "AD") cfg.detection.basis = DetectionBasis::AD;
            else throw ConfigError("detection.basis must be HV or AD (got \"" + basis + "\")");
        }
    }
    if (j.contains("transmission_signal"))
        cfg.transmission_signal = get_double(j["transmission_signal"], "transmission_signal");
    if (j.contains("transmission_idler"))
        cfg.transmission_idler = get_double(j["transmission_idler"], "transmission_idler");
    if (j.contains("axis1")) loaded.axis1 = parse_axis(j["axis1"], "axis1");
    if (j.contains("axis2")) loaded.axis2 = parse_axis(j["axis2"], "axis2");
    if (j.contains("optimize_phi_su")) {
        if (!j["optimize_phi_su"].is_boolean())
            throw ConfigError("optimize_phi_su must be a boolean");
        loaded.optimize_phi_su = j["optimize_phi_su"].get<bool>();
    }
    return loaded;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string sweep_to_csv(const SweepTable& table) {
    std::string out = "phi_b,mean_N,delta_N,dN_dphi,delta_phi_sq,snl_sq,S2_db,phi_su\n";
    for (const SweepRow& r : table.rows) {
        out += format_double(r.phi_b) + ',' + format_double(r.mean_N) + ',' +
               format_double(r.delta_N) + ',' + format_double(r.dN_dphi) + ',' +
               format_double(r.delta_phi_sq) + ',' + format_double(r.snl_sq) + ',' +
               format_double(r.S2_db) + ',' + format_double(r.phi_su) + '\n';
    }
    return out;
}

std::string map_to_csv(const MapGrid& grid) {
    std::string out = "phi_b,delta,S2_db,phi_su\n";
    const std::size_t width = grid.phi_b.size();
    for (std::size_t j = 0; j < grid.delta.size(); ++j) {
        for (std::size_t i = 0; i < width; ++i) {
            const std::size_t idx = j * width + i;
            out += format_double(grid.phi_b[i]) + ',' + format_double(grid.delta[j]) +
                   ',' + format_double(grid.s2_db[idx]) + ',' +
                   format_double(grid.phi_su[idx]) + '\n';
        }
    }
    return out;
}

std::string sweep_to_json(const SweepTable& table, const InterferometerConfig& cfg,
                          bool optimized) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "phase_sweep";
    j["config"] = config_to_json(cfg);
    j["axis1"] = axis_to_json(table.axis1);
    j["optimize_phi_su"] = optimized;
    j["columns"] = {"phi_b",        "mean_N", "delta_N", "dN_dphi",
                    "delta_phi_sq", "snl_sq", "S2_db",   "phi_su"};
    ordered_json rows = ordered_json::array();
    for (const SweepRow& r : table.rows)
        rows.push_back({r.phi_b, r.mean_N, r.delta_N, r.dN_dphi, r.delta_phi_sq,
                        r.snl_sq, r.S2_db, r.phi_su});
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string map_to_json(const MapGrid& grid, const InterferometerConfig& cfg,
                        const AxisSpec& axis1, const AxisSpec& axis2, bool optimized) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "map";
    j["config"] = config_to_json(cfg);
    j["axis1"] = axis_to_json(axis1);
    j["axis2"] = axis_to_json(axis2);
    j["optimize_phi_su"] = optimized;
    j["phi_b"] = grid.phi_b;
    j["delta"] = grid.delta;
    const std::size_t width = grid.phi_b.size();
    ordered_json s2 = ordered_json::array();
    ordered_json ps = ordered_json::array();
    for (std::size_t row = 0; row < grid.delta.size(); ++row) {
        ordered_json s2_row = ordered_json::array();
        ordered_json ps_row = ordered_json::array();
        for (std::size_t i = 0; i < width; ++i) {
            s2_row.push_back(grid.s2_db[row * width + i]);
            ps_row.push_back(grid.phi_su[row * width + i]);
        }
        s2.push_back(std::move(s2_row));
        ps.push_back(std::move(ps_row));
    }
    j["s2_db"] = s2;
    j["phi_su"] = ps;
    return j.dump(2) + "\n";
}

std::string validation_to_json(const ValidationReport& report,
                               const InterferometerConfig& cfg) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "validation";
    j["config"] = config_to_json(cfg);
    j["cutoff"] = report.cutoff;
    j["fock_converged"] = report.fock_converged;
    j["max_leakage"] = report.max_leakage;
    j["max_norm_drift"] = report.max_norm_drift;
    j["certificate_max_delta"] = report.certificate_max_delta;
    j["max_relative_error"] = report.max_relative_error;
    j["passed"] = report.passed;
    ordered_json rows = ordered_json::array();
    for (const ValidationRow& r : report.rows) {
        ordered_json row;
        row["subset"] = r.subset;
        row["engine_mean"] = r.engine_mean;
        row["engine_variance"] = r.engine_variance;
        row["fock_mean"] = r.fock_mean;
        row["fock_variance"] = r.fock_variance;
        row["rel_mean"] = r.rel_mean;
        row["rel_variance"] = r.rel_variance;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string optimize_to_json(const PhiSuOptimum& opt, const InterferometerConfig& cfg,
                             int grid_points) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "optimize_phi_su";
    j["config"] = config_to_json(cfg);
    j["grid_points"] = grid_points;
    j["phi_su_best"] = opt.phi_su_best;
    ordered_json r;
    r["mean_N"] = opt.result.mean_N;
    r["delta_N"] = opt.result.delta_N;
    r["dN_dphi"] = opt.result.dNdphi;
    r["delta_phi_sq"] = opt.result.delta_phi_sq;
    r["snl_sq"] = opt.result.snl_sq;
    r["S2_db"] = opt.result.S2_db;
    r["phi_su_used"] = opt.result.phi_su_used;
    r["insensitive"] = opt.result.insensitive;
    j["result"] = r;
    return j.dump(2) + "\n";
}

std::string config_to_json_string(const InterferometerConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

std::string map_to_pgm(const MapGrid& grid) {
    std::ostringstream os;
    os << "P5\n# S2_db linear map: -15 dB -> 0, +15 dB -> 255, clamped\n"
       << grid.phi_b.size() << ' ' << grid.delta.size() << "\n255\n";
    const std::size_t width = grid.phi_b.size();
    for (std::size_t row = 0; row < grid.delta.size(); ++row) {
        for (std::size_t i = 0; i < width; ++i) {
            double v = grid.s2_db[row * width + i];
            if (std::isnan(v)) v = kMapCeilingDb;
            v = std::clamp(v, -15.0, 15.0);
            os.put(static_cast<char>(std::lround((v + 15.0) / 30.0 * 255.0)));
        }
    }
    return os.str();
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t n_threads =
        threads > 0 ? static_cast<std::size_t>(threads)
                    : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dualsu11

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "dualsu11/sweep.hpp"

namespace fs = std::filesystem;

namespace {

using namespace dualsu11;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

AxisSpec default_phi_axis() {
    return {"sample_phase_phi_b", -std::numbers::pi, std::numbers::pi, 181};
}

AxisSpec default_delta_axis() {
    return {"sample_axis_delta", 0.0, std::numbers::pi, 91};
}

int do_sweep(const std::string& config_path, const std::string& out_dir, int threads,
             const std::string& format, bool optimize_flag) {
    const LoadedConfig loaded = load_config_file(config_path);
    if (!loaded.axis1)
        throw ConfigError("sweep needs axis1 over sample_phase_phi_b in the config");

    SweepRequest req;
    req.base = loaded.config;
    req.axis1 = *loaded.axis1;
    req.axis2 = loaded.axis2;
    req.optimize_phi_su = loaded.optimize_phi_su || optimize_flag;
    req.threads = threads;
    req.output_dir = out_dir;

    const SweepTable table = run_phase_sweep(req);

    fs::create_directories(out_dir);
    if (format != "json")
        write_file(fs::path(out_dir) / "sweep.csv", sweep_to_csv(table));
    if (format != "csv")
        write_file(fs::path(out_dir) / "sweep.json",
                   sweep_to_json(table, req.base, req.optimize_phi_su));

    double best = std::numeric_limits<double>::infinity();
    double best_phi = 0.0;
    for (const SweepRow& r : table.rows) {
        if (!r.insensitive && r.S2_db < best) {
            best = r.S2_db;
            best_phi = r.phi_b;
        }
    }
    std::cout << "sweep: " << table.rows.size() << " points written to " << out_dir
              << '\n';
    if (std::isfinite(best))
        std::cout << "min S2_db = " << format_double(best) << " at phi_b = "
                  << format_double(best_phi) << '\n';
    else
        std::cout << "all points insensitive\n";
    return 0;
}

int do_map(const std::string& config_path, const std::string& out_dir, int threads,
           const std::string& format, bool pgm, bool optimize_flag) {
    const LoadedConfig loaded = load_config_file(config_path);

    SweepRequest req;
    req.base = loaded.config;
    req.axis1 = loaded.axis1 ? *loaded.axis1 : default_phi_axis();
    req.axis2 = loaded.axis2 ? *loaded.axis2 : default_delta_axis();
    req.optimize_phi_su = loaded.optimize_phi_su || optimize_flag;
    req.threads = threads;
    req.output_dir = out_dir;

    const MapGrid grid = run_map(req);

    fs::create_directories(out_dir);
    if (format != "json")
        write_file(fs::path(out_dir) / "map.csv", map_to_csv(grid));
    if (format != "csv")
        write_file(fs::path(out_dir) / "map.json",
                   map_to_json(grid, req.base, req.axis1, *req.axis2,
                               req.optimize_phi_su));
    if (pgm) write_file(fs::path(out_dir) / "map.pgm", map_to_pgm(grid));

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < grid.s2_db.size(); ++i) {
        if (grid.s2_db[i] < best) {
            best = grid.s2_db[i];
            best_idx = i;
        }
    }
    const std::size_t width = grid.phi_b.size();
    std::cout << "map: " << width << " x " << grid.delta.size() << " grid written to "
              << out_dir << '\n'
              << "min S2_db = " << format_double(best) << " at phi_b = "
              << format_double(grid.phi_b[best_idx % width]) << ", delta = "
              << format_double(grid.delta[best_idx / width]) << '\n';
    return 0;
}

int do_validate(const std::string& config_path, const std::string& out_dir,
                int cutoff) {
    const LoadedConfig loaded = load_config_file(config_path);
    const ValidationReport report = run_validation(loaded.config, cutoff);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "validation.json",
               validation_to_json(report, loaded.config));

    std::cout << std::left << std::setw(11) << "subset" << std::setw(17)
              << "engine_mean" << std::setw(17) << "fock_mean" << std::setw(11)
              << "rel_mean" << std::setw(17) << "engine_var" << std::setw(17)
              << "fock_var" << std::setw(11) << "rel_var" << '\n';
    std::cout << std::scientific << std::setprecision(6);
    for (const ValidationRow& r : report.rows) {
        std::cout << std::left << std::setw(11) << r.subset << std::setw(17)
                  << r.engine_mean << std::setw(17) << r.fock_mean;
        std::cout << std::setprecision(1) << std::setw(11) << r.rel_mean
                  << std::setprecision(6);
        std::cout << std::setw(17) << r.engine_variance << std::setw(17)
                  << r.fock_variance << std::setprecision(1) << std::setw(11)
                  << r.rel_variance << std::setprecision(6) << '\n';
    }
    std::cout << std::setprecision(3);
    std::cout << "fock converged: " << (report.fock_converged ? "yes" : "no")
              << "  (max leakage " << report.max_leakage << ", max norm drift "
              << report.max_norm_drift << ")\n";
    std::cout << "certificate |f(" << report.cutoff << ") - f(" << 2 * report.cutoff
              << ")| = " << report.certificate_max_delta << '\n';
    std::cout << "max relative error = " << report.max_relative_error << '\n';

    if (!report.fock_converged ||
        report.certificate_max_delta > kValidationCertificateLimit) {
        std::cout << "validation UNCONVERGED\n";
        return 4;
    }
    if (report.max_relative_error > kValidationRelErrLimit) {
        std::cout << "validation FAILED\n";
        return 3;
    }
    std::cout << "validation PASSED\n";
    return 0;
}

int do_optimize(const std::string& config_path, const std::string& out_dir,
                int grid_points) {
    const LoadedConfig loaded = load_config_file(config_path);
    const PhiSuOptimum opt = optimize_phi_su(loaded.config, grid_points);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "optimize.json",
               optimize_to_json(opt, loaded.config, grid_points));

    std::cout << "phi_su_best = " << format_double(opt.phi_su_best) << '\n'
              << "S2_db = " << format_double(opt.result.S2_db) << '\n'
              << "delta_phi_sq = " << format_double(opt.result.delta_phi_sq) << '\n'
              << "mean_N = " << format_double(opt.result.mean_N) << '\n'
              << "snl_sq = " << format_double(opt.result.snl_sq) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-polarization SU(1,1) interferometer simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::string format = "both";
    bool optimize_flag = false;
    bool pgm = true;
    int cutoff = 16;
    int grid_points = 32;

    auto add_common = [&](CLI::App* cmd, bool with_format) {
        cmd->add_option("--config", config_path, "JSON experiment config")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory (default .)");
        cmd->add_option("--threads", threads,
                        "worker threads; 0 = hardware concurrency");
        if (with_format) {
            cmd->add_option("--format", format, "csv, json, or both (default both)")
                ->check(CLI::IsMember({"csv", "json", "both"}));
            cmd->add_flag("--optimize-phi-su", optimize_flag,
                          "optimize phi_su at every grid point");
        }
    };

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "sensitivity vs phi_b along axis1");
    add_common(sweep_cmd, true);

    CLI::App* map_cmd =
        app.add_subcommand("map", "sensitivity over the (phi_b, delta) grid");
    add_common(map_cmd, true);
    map_cmd->add_flag("--pgm,!--no-pgm", pgm, "write map.pgm heatmap (default on)");

    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "compare the Gaussian engine against the Fock oracle");
    add_common(validate_cmd, false);
    validate_cmd->add_option("--cutoff", cutoff,
                             "Fock occupation cutoff (default 16)");

    CLI::App* optimize_cmd =
        app.add_subcommand("optimize-phi", "find the best phi_su for one config");
    add_common(optimize_cmd, false);
    optimize_cmd->add_option("--grid-points", grid_points,
                             "coarse scan resolution (default 32)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sweep_cmd)
            return do_sweep(config_path, out_dir, threads, format, optimize_flag);
        if (*map_cmd)
            return do_map(config_path, out_dir, threads, format, pgm, optimize_flag);
        if (*validate_cmd) return do_validate(config_path, out_dir, cutoff);
        if (*optimize_cmd) return do_optimize(config_path, out_dir, grid_points);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NoSensitivePointError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

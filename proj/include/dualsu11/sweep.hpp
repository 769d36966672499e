#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualsu11/fock_oracle.hpp"
#include "dualsu11/metrology.hpp"

namespace dualsu11 {

// Configuration or schema problem in user input; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AxisSpec {
    std::string parameter;  // "sample_phase_phi_b" or "sample_axis_delta"
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

enum class OutputFormat { Csv, Json, Both };

struct SweepRequest {
    InterferometerConfig base;
    AxisSpec axis1;
    std::optional<AxisSpec> axis2;
    bool optimize_phi_su = false;
    int threads = 1;
    std::string output_dir;  // used by the CLI; the run_* functions are pure
};

struct SweepRow {
    double phi_b = 0.0;
    double mean_N = 0.0;
    double delta_N = 0.0;
    double dN_dphi = 0.0;
    double delta_phi_sq = 0.0;
    double snl_sq = 0.0;
    double S2_db = 0.0;
    double phi_su = 0.0;
    bool insensitive = false;
};

struct SweepTable {
    AxisSpec axis1;
    std::vector<SweepRow> rows;
};

// Dense sensitivity grid.  s2_db holds rendered values: insensitive points
// and anything above the ceiling appear as +60 dB so heatmaps never hold
// infinities.  Layout is delta-major: cell (i, j) = [j * phi_b.size() + i].
struct MapGrid {
    std::vector<double> phi_b;
    std::vector<double> delta;
    std::vector<double> s2_db;
    std::vector<double> phi_su;
};

inline constexpr double kMapCeilingDb = 60.0;

inline constexpr double kValidationRelErrLimit = 1e-6;
inline constexpr double kValidationCertificateLimit = 1e-8;

std::vector<double> axis_values(const AxisSpec& axis);

// One sensitivity row per axis1 grid point; axis1 must sweep sample_phase_phi_b.
SweepTable run_phase_sweep(const SweepRequest& req);

// axis1 must sweep sample_phase_phi_b and axis2 sample_axis_delta.
MapGrid run_map(const SweepRequest& req);

struct ValidationRow {
    std::string subset;
    double engine_mean = 0.0;
    double engine_variance = 0.0;
    double fock_mean = 0.0;
    double fock_variance = 0.0;
    double rel_mean = 0.0;
    double rel_variance = 0.0;
};

struct ValidationReport {
    int cutoff = 0;
    bool fock_converged = false;
    double max_leakage = 0.0;
    double max_norm_drift = 0.0;
    double certificate_max_delta = 0.0;  // worst |stat(cutoff) - stat(2*cutoff)|
    double max_relative_error = 0.0;
    bool passed = false;
    std::vector<ValidationRow> rows;
};

// Gaussian engine vs Fock oracle on one config: per-mode subsets, the
// configured detection subset, and all four modes.  The oracle runs at
// cutoff and 2*cutoff; the difference is the convergence certificate.
// gain_g above 0.5 is rejected.
ValidationReport run_validation(const InterferometerConfig& cfg, int cutoff);

struct LoadedConfig {
    InterferometerConfig config;
    std::optional<AxisSpec> axis1;
    std::optional<AxisSpec> axis2;
    bool optimize_phi_su = false;
};

// Parses a JSON config file.  Unknown keys anywhere are ConfigErrors naming
// the offending path, so typos in physics parameters cannot pass silently.
LoadedConfig load_config_file(const std::string& path);
LoadedConfig load_config_string(const std::string& text, const std::string& origin);

// Shortest round-trip decimal; infinities print as "inf"/"-inf".
std::string format_double(double v);

std::string sweep_to_csv(const SweepTable& table);
std::string map_to_csv(const MapGrid& grid);
std::string sweep_to_json(const SweepTable& table, const InterferometerConfig& cfg,
                          bool optimized);
std::string map_to_json(const MapGrid& grid, const InterferometerConfig& cfg,
                        const AxisSpec& axis1, const AxisSpec& axis2, bool optimized);
std::string validation_to_json(const ValidationReport& report,
                               const InterferometerConfig& cfg);
std::string optimize_to_json(const PhiSuOptimum& opt, const InterferometerConfig& cfg,
                             int grid_points);
std::string config_to_json_string(const InterferometerConfig& cfg);

// 8-bit binary portable graymap; -15 dB maps to 0 and +15 dB to 255 with
// clamping, stated in the header comment.  Row 0 is the first delta value.
std::string map_to_pgm(const MapGrid& grid);

// Runs fn(0..count-1) on the given number of threads; any exception is
// rethrown on the caller thread.  Results must be written to preallocated
// slots so the output is identical regardless of thread count.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace dualsu11

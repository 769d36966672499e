#include "dualsu11/metrology.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dualsu11 {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double detected_mean(const InterferometerConfig& cfg, double phi_b) {
    InterferometerConfig c = cfg;
    c.sample_phase_phi_b = phi_b;
    const PipelineResult r = build_and_run(c);
    return photon_statistics(r.output, c.detection.modes).mean;
}

}  // namespace

SensitivityResult sensitivity_at(const InterferometerConfig& cfg, double step_h) {
    if (!(step_h > 0.0)) throw std::invalid_argument("sensitivity_at: step_h must be positive");

    SensitivityResult out;
    out.phi_su_used = cfg.phi_su;

    const PipelineResult center = build_and_run(cfg);
    const PhotonStatistics stats = photon_statistics(center.output, cfg.detection.modes);
    out.mean_N = stats.mean;
    out.delta_N = std::sqrt(stats.variance);

    const double n3 = total_intensity_at_plane3(center.plane3);
    if (!(n3 > 0.0))
        throw std::domain_error("sensitivity_at: no photons at the reference plane");
    out.snl_sq = 1.0 / n3;

    const double p = cfg.sample_phase_phi_b;
    const double h = step_h;
    const double d1 = (detected_mean(cfg, p + h) - detected_mean(cfg, p - h)) / (2.0 * h);
    const double d2 = (detected_mean(cfg, p + h / 2.0) - detected_mean(cfg, p - h / 2.0)) / h;
    out.dNdphi = (4.0 * d2 - d1) / 3.0;
    out.derivative_residual = std::abs(d2 - d1);

    if (std::abs(out.dNdphi) <= 1e-12 * out.mean_N) {
        out.insensitive = true;
        out.delta_phi_sq = kInf;
        out.S2_db = kInf;
        return out;
    }

    out.delta_phi_sq = stats.variance / (out.dNdphi * out.dNdphi);
    out.S2_db = 10.0 * std::log10(out.delta_phi_sq / out.snl_sq);
    return out;
}

PhiSuOptimum optimize_phi_su(const InterferometerConfig& cfg, int grid_points) {
    if (grid_points < 8)
        throw std::invalid_argument("optimize_phi_su: need at least 8 grid points");

    auto objective = [&cfg](double phi_su) {
        InterferometerConfig c = cfg;
        c.phi_su = phi_su;
        return sensitivity_at(c).delta_phi_sq;
    };

    double best_x = 0.0;
    double best_f = kInf;
    bool found = false;
    for (int k = 0; k < grid_points; ++k) {
        const double x = kTwoPi * k / grid_points;
        const double f = objective(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
            found = true;
        }
    }
    if (!found || !std::isfinite(best_f)) throw NoSensitivePointError();

    double a = best_x - kTwoPi / grid_points;
    double b = best_x + kTwoPi / grid_points;
    constexpr double gr = 0.6180339887498949;  // (sqrt(5) - 1) / 2
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }

    double x = (f1 < f2) ? x1 : x2;
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;

    PhiSuOptimum out;
    out.phi_su_best = x;
    InterferometerConfig c = cfg;
    c.phi_su = x;
    out.result = sensitivity_at(c);
    return out;
}

double heisenberg_reference(double mean_photons) {
    if (!(mean_photons > 0.0))
        throw std::domain_error("heisenberg_reference: mean photon number must be positive");
    return 1.0 / mean_photons;
}

}  // namespace dualsu11

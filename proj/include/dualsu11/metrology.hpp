#pragma once

#include <stdexcept>

#include "dualsu11/pipeline.hpp"

namespace dualsu11 {

// Thrown by optimize_phi_su when every scanned phi_su is an insensitive
// working point.
struct NoSensitivePointError : std::runtime_error {
    NoSensitivePointError() : std::runtime_error("no sensitive working point") {}
};

struct SensitivityResult {
    double mean_N = 0.0;         // detected mean photon number at the working point
    double delta_N = 0.0;        // detected photon-number standard deviation
    double dNdphi = 0.0;         // slope of the mean versus the sample phase
    double delta_phi_sq = 0.0;   // phase variance delta_N^2 / (dN/dphi)^2
    double snl_sq = 0.0;         // shot-noise reference 1 / N(plane 3)
    double S2_db = 0.0;          // 10 log10(delta_phi_sq / snl_sq)
    double phi_su_used = 0.0;
    bool insensitive = false;    // slope below threshold; variance fields are +inf
    double derivative_residual = 0.0;  // spread between the two finite-difference stencils
};

// Phase sensitivity at the configured working point, using central
// differences of the detected mean with steps h and h/2 combined by
// Richardson extrapolation.
SensitivityResult sensitivity_at(const InterferometerConfig& cfg, double step_h = 1e-5);

struct PhiSuOptimum {
    double phi_su_best = 0.0;
    SensitivityResult result;
};

// Minimizes delta_phi_sq over the internal phase phi_su: coarse scan on a
// uniform grid, then golden-section refinement around the best cell.
PhiSuOptimum optimize_phi_su(const InterferometerConfig& cfg, int grid_points = 32);

// Phase variance 1/n of an ideal probe with mean photon number n.
double heisenberg_reference(double mean_photons);

}  // namespace dualsu11

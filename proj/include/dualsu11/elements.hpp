#pragma once

#include "dualsu11/gaussian_state.hpp"

namespace dualsu11 {

// Parametric amplifier coupling the signal and idler of one polarization.
struct OpaParams {
    double gain_g = 0.0;
    Polarization polarization = Polarization::H;
    int sign = +1;  // pump phase: +1 amplifies, -1 deamplifies
};

// Linear retarder with retardance psi and fast-axis angle gamma, applied
// identically to the signal and idler polarization pairs.
struct WaveplateParams {
    double phase_psi = 0.0;
    double axis_gamma = 0.0;
};

// Diagonal phases: idlers pick up e^{i phi_su}, V modes e^{-i alpha/2},
// signal-V additionally e^{-i beta}.
struct PhasePlateParams {
    double phi_su = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

struct BellSettings {
    double alpha;
    double beta;
    double theta;  // shared quarter-wave plate angle
};

struct BogoliubovPair {
    Matrix4c U;
    Matrix4c V;
};

BogoliubovPair make_opa(const OpaParams& p);
Matrix4c make_waveplate(const WaveplateParams& p);
Matrix4c make_phase_plate(const PhasePlateParams& p);
BellSettings bell_config(BellState b);

}  // namespace dualsu11

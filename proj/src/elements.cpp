#include "dualsu11/elements.hpp"

#include <cmath>
#include <numbers>

namespace dualsu11 {

BogoliubovPair make_opa(const OpaParams& p) {
    if (!std::isfinite(p.gain_g) || p.gain_g < 0.0)
        throw std::invalid_argument("make_opa: gain_g must be finite and non-negative");
    if (p.sign != 1 && p.sign != -1)
        throw std::invalid_argument("make_opa: sign must be +1 or -1");

    const int s = flat_index(ModeIndex{Frequency::Signal, p.polarization});
    const int i = flat_index(ModeIndex{Frequency::Idler, p.polarization});

    BogoliubovPair out;
    out.U = Matrix4c::Identity();
    out.V = Matrix4c::Zero();
    out.U(s, s) = out.U(i, i) = std::cosh(p.gain_g);
    out.V(s, i) = out.V(i, s) = static_cast<double>(p.sign) * std::sinh(p.gain_g);
    return out;
}

Matrix4c make_waveplate(const WaveplateParams& p) {
    const double c = std::cos(p.phase_psi / 2.0);
    const double s = std::sin(p.phase_psi / 2.0);
    const Complex mi(0.0, -1.0);

    Matrix2c j;
    j << c + mi * std::cos(2.0 * p.axis_gamma) * s, mi * std::sin(2.0 * p.axis_gamma) * s,
         mi * std::sin(2.0 * p.axis_gamma) * s, c - mi * std::cos(2.0 * p.axis_gamma) * s;

    Matrix4c out = Matrix4c::Identity();
    out.block<2, 2>(0, 0) = j;  // signal pair (sH, sV)
    out.block<2, 2>(2, 2) = j;  // idler pair (iH, iV)
    return out;
}

Matrix4c make_phase_plate(const PhasePlateParams& p) {
    const Complex i1(0.0, 1.0);
    const Complex phi = std::exp(i1 * p.phi_su);
    const Complex half_alpha = std::exp(-i1 * p.alpha / 2.0);
    const Complex beta = std::exp(-i1 * p.beta);

    Matrix4c out = Matrix4c::Zero();
    out(0, 0) = 1.0;               // sH
    out(1, 1) = beta * half_alpha; // sV
    out(2, 2) = phi;               // iH
    out(3, 3) = phi * half_alpha;  // iV
    return out;
}

BellSettings bell_config(BellState b) {
    constexpr double pi = std::numbers::pi;
    switch (b) {
        case BellState::PhiPlus: return {0.0, 0.0, 0.0};
        case BellState::PhiMinus: return {pi, 0.0, 0.0};
        case BellState::PsiPlus: return {pi, 0.0, pi / 8.0};
        case BellState::PsiMinus: return {pi, pi, pi / 8.0};
    }
    throw std::invalid_argument("bell_config: unknown Bell state");
}

}  // namespace dualsu11

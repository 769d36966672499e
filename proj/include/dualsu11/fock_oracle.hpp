#pragma once

#include <vector>

#include "dualsu11/pipeline.hpp"

namespace dualsu11 {

// Truncated number-basis state vector used to cross-check the Gaussian
// engine.  Each mode holds occupations 0..cutoff; the amplitude of
// |n_0, n_1, ...> lives at index sum_k n_k * (cutoff+1)^k, so mode 0 is
// the fastest-varying axis.  Loss ancillas are appended as extra modes.
struct FockState {
    int n_modes = 0;
    int cutoff = 0;
    std::vector<Complex> amplitudes;
    bool converged = true;
    double max_leakage = 0.0;     // worst probability mass within 2 levels of the cutoff
    double max_norm_drift = 0.0;  // worst |norm - 1| seen after a gate
};

// Throws std::length_error when (cutoff+1)^n_modes exceeds the 2^26
// amplitude budget.  cutoff must be at least 2.
FockState fock_vacuum(int n_modes, int cutoff);

double fock_norm(const FockState& s);

// exp(amplitude a^dag - conj(amplitude) a) on one mode via the matrix
// exponential of the truncated generator.
FockState apply_displacement_fock(const FockState& s, int mode, Complex amplitude);

// exp(sign * g * (a_p^dag a_q^dag - a_p a_q)), evolving
// a_p -> cosh(g) a_p + sign sinh(g) a_q^dag.  Applied per photon-number
// difference sector through the exponential of the truncated generator.
FockState apply_two_mode_squeezer(const FockState& s, int mode_p, int mode_q,
                                  double gain_g, int sign);

// Passive unitary J on the four physical modes, with a_k -> sum_j J(k,j) a_j
// matching the Gaussian engine.  Factored into two-mode rotations and
// diagonal phases; each two-mode rotation is applied exactly per
// total-photon-number sector.
FockState apply_passive_fock(const FockState& s, const Matrix4c& J);

// Beam splitter of amplitude transmission t coupling the mode to a fresh
// vacuum ancilla mode, which is appended and kept; statistics over the
// physical modes sum over the ancilla automatically.
FockState apply_loss_fock(const FockState& s, int mode, double transmission_t);

// Mean and variance of the total photon number over the given physical modes.
PhotonStatistics fock_photon_statistics(const FockState& s,
                                        const std::vector<ModeIndex>& subset);

// Runs the same element sequence as build_and_run in the truncated number
// basis and returns the output state.
FockState run_pipeline_fock(const InterferometerConfig& cfg, int cutoff);

}  // namespace dualsu11

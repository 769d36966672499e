#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dualsu11/modes.hpp"

namespace dualsu11 {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;
using Vector4c = Eigen::Vector4cd;

// Multimode Gaussian state stored as the transfer from vacuum inputs:
//   a_j = sum_k A(j,k) v_k + B(j,k) v_k^dag + d_j
// with v_k the vacuum input operators.  Rows are the four physical modes;
// columns grow by one for every loss ancilla that gets appended.
struct GaussianState {
    MatrixXc A;
    MatrixXc B;
    Vector4c d;
};

// Centered second moments: Nmat(i,j) = <da_i^dag da_j>, Mmat(i,j) = <da_i da_j>.
struct SecondMoments {
    Matrix4c Nmat;
    Matrix4c Mmat;
};

struct PhotonStatistics {
    double mean;
    double variance;
};

struct ValidationSettings {
    double invariant_tolerance = 1e-10;     // state residuals checked after each element
    double precondition_tolerance = 1e-12;  // symplectic/unitarity residual of incoming matrices
    bool check_invariants = true;
};

// Mutable per-thread validation settings used by all element applications.
ValidationSettings& validation_settings();

GaussianState vacuum_state(int n_modes);

GaussianState displace(const GaussianState& s, ModeIndex mode, Complex amplitude);

// A' = U A + V conj(B), B' = U B + V conj(A), d' = U d + V conj(d).
// Requires U U^dag - V V^dag = I and U V^T symmetric.
GaussianState apply_bogoliubov(const GaussianState& s, const Matrix4c& U, const Matrix4c& V);

// A' = J A, B' = J B, d' = J d for unitary J.
GaussianState apply_passive(const GaussianState& s, const Matrix4c& J);

// Beam-splitter coupling of one mode to a fresh vacuum ancilla with
// amplitude transmission t; the ancilla column is appended and kept.
GaussianState apply_loss(const GaussianState& s, ModeIndex mode, double transmission_t);

// max |A A^dag - B B^dag - I| over entries
double commutator_residual(const GaussianState& s);
// max |A B^T - (A B^T)^T| over entries
double symmetry_residual(const GaussianState& s);

SecondMoments second_moments(const GaussianState& s);

// Mean and variance of the total photon number summed over the given modes.
PhotonStatistics photon_statistics(const GaussianState& s, const std::vector<ModeIndex>& subset);

// Smallest symplectic eigenvalue of the quadrature covariance assembled from
// the moments, with vacuum variance normalized to 1.  Physical states give >= 1.
double min_symplectic_eigenvalue(const SecondMoments& m);

}  // namespace dualsu11

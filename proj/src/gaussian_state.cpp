#include "dualsu11/gaussian_state.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace dualsu11 {

ValidationSettings& validation_settings() {
    thread_local ValidationSettings settings;
    return settings;
}

namespace {

[[noreturn]] void fail(const std::string& what, double residual) {
    std::ostringstream os;
    os << what << " (residual " << residual << ")";
    throw std::runtime_error(os.str());
}

void check_state(const GaussianState& s, const char* op) {
    const auto& vs = validation_settings();
    if (!vs.check_invariants) return;
    if (double r = commutator_residual(s); r > vs.invariant_tolerance)
        fail(std::string(op) + ": commutator invariant A A^dag - B B^dag = I violated", r);
    if (double r = symmetry_residual(s); r > vs.invariant_tolerance)
        fail(std::string(op) + ": symmetry invariant A B^T = (A B^T)^T violated", r);
}

}  // namespace

GaussianState vacuum_state(int n_modes) {
    if (n_modes == 0) throw std::invalid_argument("vacuum_state: zero modes");
    if (n_modes != kPhysicalModes)
        throw std::invalid_argument("vacuum_state: this engine is fixed at 4 physical modes");
    GaussianState s;
    s.A = MatrixXc::Identity(kPhysicalModes, kPhysicalModes);
    s.B = MatrixXc::Zero(kPhysicalModes, kPhysicalModes);
    s.d = Vector4c::Zero();
    return s;
}

GaussianState displace(const GaussianState& s, ModeIndex mode, Complex amplitude) {
    GaussianState out = s;
    out.d(flat_index(mode)) += amplitude;
    return out;
}

GaussianState apply_bogoliubov(const GaussianState& s, const Matrix4c& U, const Matrix4c& V) {
    const auto& vs = validation_settings();
    const Matrix4c comm = U * U.adjoint() - V * V.adjoint() - Matrix4c::Identity();
    if (double r = comm.cwiseAbs().maxCoeff(); r > vs.precondition_tolerance)
        fail("apply_bogoliubov: U U^dag - V V^dag = I violated", r);
    const Matrix4c sym = U * V.transpose() - (U * V.transpose()).transpose();
    if (double r = sym.cwiseAbs().maxCoeff(); r > vs.precondition_tolerance)
        fail("apply_bogoliubov: U V^T must be symmetric", r);

    GaussianState out;
    out.A = U * s.A + V * s.B.conjugate();
    out.B = U * s.B + V * s.A.conjugate();
    out.d = U * s.d + V * s.d.conjugate();
    check_state(out, "apply_bogoliubov");
    return out;
}

GaussianState apply_passive(const GaussianState& s, const Matrix4c& J) {
    const auto& vs = validation_settings();
    const Matrix4c res = J * J.adjoint() - Matrix4c::Identity();
    if (double r = res.cwiseAbs().maxCoeff(); r > vs.precondition_tolerance)
        fail("apply_passive: J must be unitary", r);

    GaussianState out;
    out.A = J * s.A;
    out.B = J * s.B;
    out.d = J * s.d;
    check_state(out, "apply_passive");
    return out;
}

GaussianState apply_loss(const GaussianState& s, ModeIndex mode, double transmission_t) {
    if (!(transmission_t >= 0.0 && transmission_t <= 1.0))
        throw std::invalid_argument("apply_loss: transmission must lie in [0, 1]");
    const int m = flat_index(mode);
    const Eigen::Index n = s.A.cols();

    GaussianState out;
    out.A = MatrixXc::Zero(kPhysicalModes, n + 1);
    out.B = MatrixXc::Zero(kPhysicalModes, n + 1);
    out.A.leftCols(n) = s.A;
    out.B.leftCols(n) = s.B;
    out.A.row(m) *= transmission_t;
    out.B.row(m) *= transmission_t;
    out.d = s.d;
    out.d(m) *= transmission_t;
    out.A(m, n) = std::sqrt(1.0 - transmission_t * transmission_t);
    check_state(out, "apply_loss");
    return out;
}

double commutator_residual(const GaussianState& s) {
    const Matrix4c r = s.A * s.A.adjoint() - s.B * s.B.adjoint() - Matrix4c::Identity();
    return r.cwiseAbs().maxCoeff();
}

double symmetry_residual(const GaussianState& s) {
    const Matrix4c p = s.A * s.B.transpose();
    return (p - p.transpose()).cwiseAbs().maxCoeff();
}

SecondMoments second_moments(const GaussianState& s) {
    SecondMoments m;
    m.Nmat = s.B.conjugate() * s.B.transpose();
    m.Mmat = s.A * s.B.transpose();
    return m;
}

PhotonStatistics photon_statistics(const GaussianState& s, const std::vector<ModeIndex>& subset) {
    bool present[kPhysicalModes] = {false, false, false, false};
    for (ModeIndex m : subset) present[flat_index(m)] = true;
    std::vector<int> modes;
    for (int i = 0; i < kPhysicalModes; ++i)
        if (present[i]) modes.push_back(i);
    if (modes.empty())
        throw std::invalid_argument("photon_statistics: empty detection subset");

    const SecondMoments mom = second_moments(s);
    const auto& N = mom.Nmat;
    const auto& M = mom.Mmat;
    const auto& d = s.d;

    double mean = 0.0;
    for (int i : modes) mean += N(i, i).real() + std::norm(d(i));

    double var = 0.0;
    for (int i : modes) {
        for (int j : modes) {
            var += std::norm(N(i, j)) + std::norm(M(i, j));
            var += 2.0 * (d(i) * std::conj(d(j)) * N(i, j)).real();
            var += 2.0 * (std::conj(d(i)) * std::conj(d(j)) * M(i, j)).real();
        }
    }
    var += mean;

    if (var < 0.0) {
        std::cerr << "photon_statistics: variance " << var << " clamped to 0\n";
        var = 0.0;
    }
    return {mean, var};
}

double min_symplectic_eigenvalue(const SecondMoments& m) {
    using Eigen::Matrix4d;
    const Matrix4d nr = m.Nmat.real();
    const Matrix4d ni = m.Nmat.imag();
    const Matrix4d mr = m.Mmat.real();
    const Matrix4d mi = m.Mmat.imag();

    // Quadratures x = a + a^dag, p = -i (a - a^dag), vacuum variance 1.
    Eigen::Matrix<double, 8, 8> sigma;
    sigma.block<4, 4>(0, 0) = Matrix4d::Identity() + 2.0 * (nr + mr);
    sigma.block<4, 4>(4, 4) = Matrix4d::Identity() + 2.0 * (nr - mr);
    const Matrix4d xp = 2.0 * (ni + mi);
    sigma.block<4, 4>(0, 4) = xp;
    sigma.block<4, 4>(4, 0) = xp.transpose();

    Eigen::Matrix<double, 8, 8> omega = Eigen::Matrix<double, 8, 8>::Zero();
    omega.block<4, 4>(0, 4) = Matrix4d::Identity();
    omega.block<4, 4>(4, 0) = -Matrix4d::Identity();

    const Eigen::MatrixXcd k = Complex(0.0, 1.0) * (omega * sigma);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(k, false);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        best = std::min(best, std::abs(es.eigenvalues()(i)));
    return best;
}

}  // namespace dualsu11

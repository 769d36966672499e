#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dualsu11/elements.hpp"

using namespace dualsu11;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

Matrix2c signal_block(const Matrix4c& J) { return J.block<2, 2>(0, 0); }
Matrix2c idler_block(const Matrix4c& J) { return J.block<2, 2>(2, 2); }

}  // namespace

TEST_SUITE("elements") {

TEST_CASE("amplifier couples signal and idler of one polarization") {
    OpaParams p;
    p.gain_g = 0.7;
    p.polarization = Polarization::H;
    p.sign = +1;
    const BogoliubovPair b = make_opa(p);

    const double ch = std::cosh(0.7);
    const double sh = std::sinh(0.7);
    CHECK(std::abs(b.U(0, 0) - ch) < 1e-14);
    CHECK(std::abs(b.U(2, 2) - ch) < 1e-14);
    CHECK(b.U(1, 1) == Complex(1.0, 0.0));
    CHECK(b.U(3, 3) == Complex(1.0, 0.0));
    CHECK(std::abs(b.V(0, 2) - sh) < 1e-14);
    CHECK(std::abs(b.V(2, 0) - sh) < 1e-14);
    CHECK(b.V.cwiseAbs().sum() == doctest::Approx(2.0 * sh).epsilon(1e-12));

    p.polarization = Polarization::V;
    p.sign = -1;
    const BogoliubovPair bv = make_opa(p);
    CHECK(std::abs(bv.U(1, 1) - ch) < 1e-14);
    CHECK(std::abs(bv.V(1, 3) + sh) < 1e-14);
    CHECK(std::abs(bv.V(3, 1) + sh) < 1e-14);
    CHECK(bv.U(0, 0) == Complex(1.0, 0.0));

    const Matrix4c comm =
        b.U * b.U.adjoint() - b.V * b.V.adjoint() - Matrix4c::Identity();
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amplifier parameters are validated") {
    OpaParams p;
    p.gain_g = -0.1;
    CHECK_THROWS_AS(make_opa(p), std::invalid_argument);
    p.gain_g = 0.5;
    p.sign = 2;
    CHECK_THROWS_AS(make_opa(p), std::invalid_argument);
    p.sign = -1;
    CHECK_NOTHROW(make_opa(p));
}

TEST_CASE("waveplate at zero retardance is the identity") {
    const Matrix4c J = make_waveplate({0.0, 0.3});
    CHECK(J.isApprox(Matrix4c::Identity(), 1e-15));
}

TEST_CASE("half-wave at 45 degrees swaps the polarizations") {
    const Matrix4c J = make_waveplate({kPi, kPi / 4.0});
    Matrix2c expected;
    expected << 0.0, -kI, -kI, 0.0;
    CHECK(signal_block(J).isApprox(expected, 1e-14));
    CHECK(idler_block(J).isApprox(expected, 1e-14));
    CHECK(J.block<2, 2>(0, 2).norm() == doctest::Approx(0.0));
}

TEST_CASE("quarter-wave on axis retards V against H") {
    const Matrix4c J = make_waveplate({kPi / 2.0, 0.0});
    const double r = 1.0 / std::sqrt(2.0);
    Matrix2c expected;
    expected << Complex(r, -r), 0.0, 0.0, Complex(r, r);
    CHECK(signal_block(J).isApprox(expected, 1e-14));
    CHECK(idler_block(J).isApprox(expected, 1e-14));
}

TEST_CASE("rotating the axis by 90 degrees flips the retardance sign") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int k = 0; k < 20; ++k) {
        const double psi = angle(rng);
        const double gamma = angle(rng);
        const Matrix4c a = make_waveplate({psi, gamma + kPi / 2.0});
        const Matrix4c b = make_waveplate({-psi, gamma});
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("waveplates are unitary for any parameters") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    for (int k = 0; k < 50; ++k) {
        const Matrix4c J = make_waveplate({angle(rng), angle(rng)});
        const Matrix4c res = J * J.adjoint() - Matrix4c::Identity();
        CHECK(res.cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("phase plate applies the three diagonal phases") {
    const double phi = 0.8;
    const double alpha = 1.1;
    const double beta = 0.5;
    const Matrix4c J = make_phase_plate({phi, alpha, beta});

    CHECK(J(0, 0) == Complex(1.0, 0.0));
    CHECK(std::abs(J(1, 1) - std::exp(-kI * beta) * std::exp(-kI * alpha / 2.0)) <
          1e-15);
    CHECK(std::abs(J(2, 2) - std::exp(kI * phi)) < 1e-15);
    CHECK(std::abs(J(3, 3) - std::exp(kI * phi) * std::exp(-kI * alpha / 2.0)) <
          1e-15);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(J(i, j)) == 0.0);
}

TEST_CASE("phase plate special angles") {
    const Matrix4c half_alpha = make_phase_plate({0.0, kPi, 0.0});
    CHECK(std::abs(half_alpha(1, 1) - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(half_alpha(3, 3) - Complex(0.0, -1.0)) < 1e-15);
    CHECK(half_alpha(0, 0) == Complex(1.0, 0.0));
    CHECK(std::abs(half_alpha(2, 2) - Complex(1.0, 0.0)) < 1e-15);

    const Matrix4c idler_flip = make_phase_plate({kPi, 0.0, 0.0});
    CHECK(std::abs(idler_flip(2, 2) + 1.0) < 1e-15);
    CHECK(std::abs(idler_flip(3, 3) + 1.0) < 1e-15);
    CHECK(idler_flip(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("phase plate angles are used verbatim") {
    const Matrix4c a = make_phase_plate({2.0 * kPi + 0.4, 0.0, 0.0});
    const Matrix4c b = make_phase_plate({0.4, 0.0, 0.0});
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bell presets pin the plate angles") {
    const BellSettings pp = bell_config(BellState::PhiPlus);
    CHECK(pp.alpha == 0.0);
    CHECK(pp.beta == 0.0);
    CHECK(pp.theta == 0.0);

    const BellSettings pm = bell_config(BellState::PhiMinus);
    CHECK(pm.alpha == kPi);
    CHECK(pm.beta == 0.0);
    CHECK(pm.theta == 0.0);

    const BellSettings sp = bell_config(BellState::PsiPlus);
    CHECK(sp.alpha == kPi);
    CHECK(sp.beta == 0.0);
    CHECK(sp.theta == kPi / 8.0);

    const BellSettings sm = bell_config(BellState::PsiMinus);
    CHECK(sm.alpha == kPi);
    CHECK(sm.beta == kPi);
    CHECK(sm.theta == kPi / 8.0);
}

}  // TEST_SUITE

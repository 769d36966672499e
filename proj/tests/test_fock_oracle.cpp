#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dualsu11/elements.hpp"
#include "dualsu11/fock_oracle.hpp"

using namespace dualsu11;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

std::size_t stride_of(const FockState& s, int mode) {
    std::size_t r = 1;
    for (int k = 0; k < mode; ++k) r *= static_cast<std::size_t>(s.cutoff + 1);
    return r;
}

Matrix4c random_unitary(unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix4c R;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) R(i, j) = Complex(dist(rng), dist(rng));
    return Eigen::HouseholderQR<Matrix4c>(R).householderQ();
}

}  // namespace

TEST_SUITE("fock_oracle") {

TEST_CASE("vacuum construction and guard rails") {
    const FockState s = fock_vacuum(4, 6);
    CHECK(s.n_modes == 4);
    CHECK(s.cutoff == 6);
    CHECK(s.amplitudes.size() == 2401);
    CHECK(s.amplitudes[0] == Complex(1.0, 0.0));
    CHECK(fock_norm(s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.converged);

    CHECK_THROWS_AS(fock_vacuum(0, 6), std::invalid_argument);
    CHECK_THROWS_AS(fock_vacuum(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(fock_vacuum(4, 90), std::length_error);
}

TEST_CASE("displacement produces a Poisson number distribution") {
    const Complex alpha(0.6, 0.0);
    const FockState s = apply_displacement_fock(fock_vacuum(4, 14), 0, alpha);
    const double n2 = std::norm(alpha);
    for (int n = 0; n <= 4; ++n) {
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        const double expected = std::exp(-n2) * std::pow(n2, n) / fact;
        const double prob = std::norm(s.amplitudes[n * stride_of(s, 0)]);
        CHECK(prob == doctest::Approx(expected).epsilon(1e-10));
    }
    const PhotonStatistics ps = fock_photon_statistics(s, {kSignalH});
    CHECK(ps.mean == doctest::Approx(n2).epsilon(1e-10));
    CHECK(ps.variance == doctest::Approx(n2).epsilon(1e-10));
}

TEST_CASE("two-mode squeezing gives the geometric pair distribution") {
    const double g = 0.4;
    const FockState s = apply_two_mode_squeezer(fock_vacuum(4, 12), 0, 2, g, +1);
    const double sech2 = 1.0 / (std::cosh(g) * std::cosh(g));
    const double th2 = std::tanh(g) * std::tanh(g);
    for (int n = 0; n <= 3; ++n) {
        const std::size_t idx = n * stride_of(s, 0) + n * stride_of(s, 2);
        const double expected = sech2 * std::pow(th2, n);
        CHECK(std::norm(s.amplitudes[idx]) ==
              doctest::Approx(expected).epsilon(1e-8));
    }
    // photons always arrive in signal-idler pairs
    const std::size_t lone = 1 * stride_of(s, 0);
    CHECK(std::norm(s.amplitudes[lone]) < 1e-20);
    CHECK(s.converged);
}

TEST_CASE("squeezing then antisqueezing returns to vacuum") {
    FockState s = fock_vacuum(4, 12);
    s = apply_two_mode_squeezer(s, 1, 3, 0.5, +1);
    s = apply_two_mode_squeezer(s, 1, 3, 0.5, -1);
    CHECK(std::norm(s.amplitudes[0]) >= 1.0 - 1e-9);
}

TEST_CASE("squeezer arguments are validated") {
    const FockState s = fock_vacuum(4, 4);
    CHECK_THROWS_AS(apply_two_mode_squeezer(s, 1, 1, 0.3, +1),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_two_mode_squeezer(s, 0, 2, -0.3, +1),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_two_mode_squeezer(s, 0, 2, 0.3, 0),
                    std::invalid_argument);
}

TEST_CASE("half-wave plate moves a single photon across polarizations") {
    FockState s = fock_vacuum(4, 4);
    s.amplitudes[0] = 0.0;
    s.amplitudes[stride_of(s, 0)] = 1.0;  // |1> in sH

    const Matrix4c J = make_waveplate({kPi, kPi / 4.0});
    const FockState out = apply_passive_fock(s, J);
    const Complex amp = out.amplitudes[stride_of(out, 1)];
    CHECK(std::abs(amp - (-kI)) < 1e-12);
    CHECK(fock_norm(out) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("passive unitaries act as the matrix on the single-photon subspace") {
    const Matrix4c J = random_unitary(21);
    std::mt19937 rng(22);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::Vector4cd c;
    for (int k = 0; k < 4; ++k) c(k) = Complex(dist(rng), dist(rng));
    c.normalize();

    FockState s = fock_vacuum(4, 4);
    s.amplitudes[0] = 0.0;
    for (int k = 0; k < 4; ++k) s.amplitudes[stride_of(s, k)] = c(k);

    const FockState out = apply_passive_fock(s, J);
    const Eigen::Vector4cd expected = J * c;
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(out.amplitudes[stride_of(out, j)] - expected(j)) < 1e-10);

    Matrix4c bad = J;
    bad(0, 0) += 0.01;
    CHECK_THROWS_AS(apply_passive_fock(s, bad), std::invalid_argument);
}

TEST_CASE("passive application composes as the matrix product") {
    const Matrix4c j1 = random_unitary(31);
    const Matrix4c j2 = random_unitary(32);

    // Occupations small enough that sectors above the cutoff carry less
    // than 1e-12 amplitude; clipped sectors would otherwise dominate the
    // difference between the two factorizations.
    FockState s = fock_vacuum(4, 12);
    s = apply_displacement_fock(s, 0, Complex(0.2, 0.1));
    s = apply_displacement_fock(s, 3, Complex(-0.1, 0.15));

    FockState stepwise = apply_passive_fock(apply_passive_fock(s, j1), j2);
    FockState fused = apply_passive_fock(s, Matrix4c(j2 * j1));
    REQUIRE(stepwise.amplitudes.size() == fused.amplitudes.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fused.amplitudes.size(); ++i)
        worst = std::max(worst,
                         std::abs(stepwise.amplitudes[i] - fused.amplitudes[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("passive unitaries conserve the total photon number") {
    FockState s = fock_vacuum(4, 12);
    s = apply_two_mode_squeezer(s, 0, 2, 0.2, +1);
    s = apply_displacement_fock(s, 1, Complex(0.3, -0.2));
    const std::vector<ModeIndex> all = {kSignalH, kSignalV, kIdlerH, kIdlerV};
    const double before = fock_photon_statistics(s, all).mean;
    const FockState out = apply_passive_fock(s, random_unitary(41));
    CHECK(fock_photon_statistics(out, all).mean ==
          doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("loss at unit transmission only appends an ancilla") {
    FockState s = fock_vacuum(4, 5);
    s = apply_displacement_fock(s, 2, Complex(0.5, 0.2));
    const FockState out = apply_loss_fock(s, 2, 1.0);
    CHECK(out.n_modes == 5);
    const PhotonStatistics a = fock_photon_statistics(s, {kIdlerH});
    const PhotonStatistics b = fock_photon_statistics(out, {kIdlerH});
    CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-12));
}

TEST_CASE("loss scales a coherent intensity") {
    FockState s = fock_vacuum(4, 14);
    s = apply_displacement_fock(s, 0, Complex(1.0, 0.0));
    s = apply_loss_fock(s, 0, std::sqrt(0.8));
    const PhotonStatistics ps = fock_photon_statistics(s, {kSignalH});
    CHECK(ps.mean == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(ps.variance == doctest::Approx(0.8).epsilon(1e-8));
}

TEST_CASE("loss on a thermal mode matches the Gaussian engine") {
    const double g = 0.4;
    const double t = std::sqrt(0.9);

    FockState f = fock_vacuum(4, 12);
    f = apply_two_mode_squeezer(f, 0, 2, g, +1);
    f = apply_loss_fock(f, 0, t);
    const PhotonStatistics fock = fock_photon_statistics(f, {kSignalH});

    OpaParams p;
    p.gain_g = g;
    const BogoliubovPair b = make_opa(p);
    GaussianState eng = apply_bogoliubov(vacuum_state(kPhysicalModes), b.U, b.V);
    eng = apply_loss(eng, kSignalH, t);
    const PhotonStatistics gauss = photon_statistics(eng, {kSignalH});

    CHECK(fock.mean == doctest::Approx(gauss.mean).epsilon(1e-7));
    CHECK(fock.variance == doctest::Approx(gauss.variance).epsilon(1e-7));
}

TEST_CASE("loss respects the amplitude budget") {
    const FockState s = fock_vacuum(4, 38);
    CHECK_THROWS_AS(apply_loss_fock(s, 0, 0.9), std::length_error);
}

TEST_CASE("a hot thermal state trips the convergence flag but stays close") {
    FockState s = fock_vacuum(4, 24);
    s = apply_two_mode_squeezer(s, 0, 2, 1.0, +1);
    CHECK_FALSE(s.converged);
    CHECK(s.max_leakage > 1e-8);
    const double nbar = std::sinh(1.0) * std::sinh(1.0);
    CHECK(fock_photon_statistics(s, {kSignalH}).mean ==
          doctest::Approx(nbar).epsilon(1e-3));
}

TEST_CASE("full pipeline agrees with the Gaussian engine at moderate gain") {
    InterferometerConfig cfg;
    cfg.gain_g = 0.3;
    cfg.bell = BellState::PhiMinus;
    cfg.placement = Placement::BetweenPlates;
    cfg.sample_phase_phi_b = 0.8;
    cfg.sample_axis_delta = 0.5;
    cfg.phi_su = 0.9;
    cfg.seed[kSignalH] = Complex(0.4, 0.2);
    cfg.detection.modes = {kIdlerH};

    const FockState f = run_pipeline_fock(cfg, 16);
    CHECK(f.converged);
    const PipelineResult r = build_and_run(cfg);

    for (const auto& subset :
         std::vector<std::vector<ModeIndex>>{{kIdlerH},
                                             {kSignalH, kSignalV},
                                             {kSignalH, kSignalV, kIdlerH, kIdlerV}}) {
        const PhotonStatistics fock = fock_photon_statistics(f, subset);
        const PhotonStatistics gauss = photon_statistics(r.output, subset);
        CHECK(fock.mean == doctest::Approx(gauss.mean).epsilon(1e-8));
        CHECK(fock.variance == doctest::Approx(gauss.variance).epsilon(1e-8));
    }
}

TEST_CASE("statistics validate their inputs") {
    const FockState s = fock_vacuum(4, 4);
    CHECK_THROWS_AS(fock_photon_statistics(s, {}), std::invalid_argument);
}

}  // TEST_SUITE

#include "dualsu11/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualsu11 {
namespace {

constexpr double kPi = std::numbers::pi;

double transmission_for(const InterferometerConfig& cfg, Frequency f) {
    const auto& override_t = (f == Frequency::Signal) ? cfg.transmission_signal
                                                      : cfg.transmission_idler;
    if (override_t) {
        return *override_t;
    }
    return std::sqrt(1.0 - cfg.loss_intensity_l);
}

void validate_config(const InterferometerConfig& cfg) {
    if (!std::isfinite(cfg.gain_g) || cfg.gain_g < 0.0) {
        throw std::invalid_argument("gain_g must be finite and non-negative");
    }
    if (!(cfg.loss_intensity_l >= 0.0 && cfg.loss_intensity_l < 1.0)) {
        throw std::invalid_argument("loss_intensity_l must lie in [0, 1)");
    }
    for (Frequency f : {Frequency::Signal, Frequency::Idler}) {
        const double t = transmission_for(cfg, f);
        if (!(t >= 0.0 && t <= 1.0)) {
            throw std::invalid_argument("transmission must lie in [0, 1]");
        }
    }
    if (cfg.detection.modes.empty()) {
        throw std::invalid_argument("detection.modes must not be empty");
    }
}

void push_opa_pair(std::vector<PipelineOp>& ops, double g) {
    ops.push_back(OpaOp{OpaParams{g, Polarization::H, +1}});
    ops.push_back(OpaOp{OpaParams{g, Polarization::V, +1}});
}

}  // namespace

PipelineProgram compile_pipeline(const InterferometerConfig& cfg) {
    validate_config(cfg);

    PipelineProgram program;
    auto& ops = program.ops;

    for (const auto& [mode, amplitude] : cfg.seed) {
        ops.push_back(SeedOp{mode, amplitude});
    }

    push_opa_pair(ops, cfg.gain_g);

    const BellSettings bell = bell_config(cfg.bell);
    ops.push_back(PassiveOp{
        make_phase_plate(PhasePlateParams{cfg.phi_su, bell.alpha, bell.beta})});

    const Matrix4c quarter =
        make_waveplate(WaveplateParams{kPi / 2.0, bell.theta});
    const Matrix4c target = make_waveplate(
        WaveplateParams{cfg.sample_phase_phi_b, cfg.sample_axis_delta});
    switch (cfg.placement) {
        case Placement::BeforePlates:
            ops.push_back(PassiveOp{target});
            ops.push_back(PassiveOp{quarter});
            ops.push_back(PassiveOp{quarter});
            break;
        case Placement::BetweenPlates:
            ops.push_back(PassiveOp{quarter});
            ops.push_back(PassiveOp{target});
            ops.push_back(PassiveOp{quarter});
            break;
        case Placement::AfterPlates:
            ops.push_back(PassiveOp{quarter});
            ops.push_back(PassiveOp{quarter});
            ops.push_back(PassiveOp{target});
            break;
    }

    for (int k = 0; k < kPhysicalModes; ++k) {
        const ModeIndex mode = mode_from_flat(k);
        const double t = transmission_for(cfg, mode.frequency);
        if (t < 1.0) {
            ops.push_back(LossOp{mode, t});
        }
    }

    program.plane3_index = ops.size();

    push_opa_pair(ops, cfg.gain_g);

    if (cfg.detection.basis == DetectionBasis::AD) {
        ops.push_back(
            PassiveOp{make_waveplate(WaveplateParams{kPi, kPi / 8.0})});
    }

    return program;
}

PipelineResult build_and_run(const InterferometerConfig& cfg) {
    const PipelineProgram program = compile_pipeline(cfg);

    PipelineResult result;
    result.output = vacuum_state(kPhysicalModes);

    auto track = [&result](const GaussianState& st) {
        result.max_commutator_residual =
            std::max(result.max_commutator_residual, commutator_residual(st));
        result.max_symmetry_residual =
            std::max(result.max_symmetry_residual, symmetry_residual(st));
    };
    track(result.output);

    for (std::size_t k = 0; k < program.ops.size(); ++k) {
        if (k == program.plane3_index) {
            result.plane3 = result.output;
        }
        std::visit(
            [&result](const auto& op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, SeedOp>) {
                    result.output = displace(result.output, op.mode, op.amplitude);
                } else if constexpr (std::is_same_v<T, OpaOp>) {
                    const BogoliubovPair bogo = make_opa(op.params);
                    result.output = apply_bogoliubov(result.output, bogo.U, bogo.V);
                } else if constexpr (std::is_same_v<T, PassiveOp>) {
                    result.output = apply_passive(result.output, op.matrix);
                } else {
                    result.output = apply_loss(result.output, op.mode, op.transmission);
                }
            },
            program.ops[k]);
        track(result.output);
    }
    if (program.plane3_index == program.ops.size()) {
        result.plane3 = result.output;
    }

    return result;
}

double total_intensity_at_plane3(const GaussianState& plane3) {
    std::vector<ModeIndex> all;
    all.reserve(kPhysicalModes);
    for (int k = 0; k < kPhysicalModes; ++k) {
        all.push_back(mode_from_flat(k));
    }
    return photon_statistics(plane3, all).mean;
}

}  // namespace dualsu11

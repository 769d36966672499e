#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "dualsu11/elements.hpp"

namespace dualsu11 {

// Position of the birefringent target relative to the two quarter-wave plates.
enum class Placement { BeforePlates, BetweenPlates, AfterPlates };

// HV reads the bare modes; AD rotates by a half-wave at pi/8 in front of the
// detectors so that the listed modes measure the diagonal basis.
enum class DetectionBasis { HV, AD };

struct DetectionSpec {
    std::vector<ModeIndex> modes = {kIdlerH};
    DetectionBasis basis = DetectionBasis::HV;
};

struct InterferometerConfig {
    double gain_g = 1.0;
    double loss_intensity_l = 0.0;  // intensity loss per mode between the amplifier stages
    std::map<ModeIndex, Complex> seed;
    BellState bell = BellState::PhiPlus;
    Placement placement = Placement::BetweenPlates;
    double sample_phase_phi_b = 0.0;
    double sample_axis_delta = 0.0;
    double phi_su = 0.0;
    DetectionSpec detection;
    // Amplitude transmissions; default sqrt(1 - loss_intensity_l) per frequency.
    std::optional<double> transmission_signal;
    std::optional<double> transmission_idler;
};

struct SeedOp {
    ModeIndex mode;
    Complex amplitude;
};
struct OpaOp {
    OpaParams params;
};
struct PassiveOp {
    Matrix4c matrix;
};
struct LossOp {
    ModeIndex mode;
    double transmission;
};
using PipelineOp = std::variant<SeedOp, OpaOp, PassiveOp, LossOp>;

// Element sequence of one experiment.  Ops before plane3_index take the state
// up to the reference plane used for shot-noise normalization; the remainder
// is the measurement amplifier pair plus any detection-basis rotation.
struct PipelineProgram {
    std::vector<PipelineOp> ops;
    std::size_t plane3_index = 0;
};

PipelineProgram compile_pipeline(const InterferometerConfig& cfg);

struct PipelineResult {
    GaussianState output;
    GaussianState plane3;
    double max_commutator_residual = 0.0;
    double max_symmetry_residual = 0.0;
};

PipelineResult build_and_run(const InterferometerConfig& cfg);

// Mean photon number over all four physical modes at the reference plane.
double total_intensity_at_plane3(const GaussianState& plane3);

}  // namespace dualsu11

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dualsu11/sweep.hpp"

namespace py = pybind11;
using namespace dualsu11;

PYBIND11_MODULE(dualsu11, m) {
    m.doc() = "Gaussian-state simulator of a dual-polarization SU(1,1) "
              "interferometer for birefringence sensing";

    py::enum_<Frequency>(m, "Frequency")
        .value("Signal", Frequency::Signal)
        .value("Idler", Frequency::Idler);

    py::enum_<Polarization>(m, "Polarization")
        .value("H", Polarization::H)
        .value("V", Polarization::V);

    py::enum_<BellState>(m, "BellState")
        .value("PhiPlus", BellState::PhiPlus)
        .value("PhiMinus", BellState::PhiMinus)
        .value("PsiPlus", BellState::PsiPlus)
        .value("PsiMinus", BellState::PsiMinus);

    py::enum_<Placement>(m, "Placement")
        .value("BeforePlates", Placement::BeforePlates)
        .value("BetweenPlates", Placement::BetweenPlates)
        .value("AfterPlates", Placement::AfterPlates);

    py::enum_<DetectionBasis>(m, "DetectionBasis")
        .value("HV", DetectionBasis::HV)
        .value("AD", DetectionBasis::AD);

    py::class_<ModeIndex>(m, "ModeIndex")
        .def(py::init<Frequency, Polarization>(), py::arg("frequency"),
             py::arg("polarization"))
        .def_readwrite("frequency", &ModeIndex::frequency)
        .def_readwrite("polarization", &ModeIndex::polarization)
        .def("__eq__",
             [](const ModeIndex& a, const ModeIndex& b) { return a == b; })
        .def("__hash__", [](const ModeIndex& mi) { return flat_index(mi); })
        .def("__repr__", [](const ModeIndex& mi) {
            return std::string("ModeIndex(") + std::string(mode_name(mi)) + ")";
        });

    m.attr("SIGNAL_H") = kSignalH;
    m.attr("SIGNAL_V") = kSignalV;
    m.attr("IDLER_H") = kIdlerH;
    m.attr("IDLER_V") = kIdlerV;
    m.def("flat_index", &flat_index, py::arg("mode"));
    m.def("mode_from_flat", &mode_from_flat, py::arg("index"));
    m.def("parse_mode", &parse_mode, py::arg("name"));
    m.def("mode_name",
          [](ModeIndex mi) { return std::string(mode_name(mi)); },
          py::arg("mode"));

    py::class_<GaussianState>(m, "GaussianState")
        .def_property_readonly(
            "A", [](const GaussianState& s) { return MatrixXc(s.A); })
        .def_property_readonly(
            "B", [](const GaussianState& s) { return MatrixXc(s.B); })
        .def_property_readonly(
            "d", [](const GaussianState& s) { return Vector4c(s.d); })
        .def_property_readonly(
            "n_columns",
            [](const GaussianState& s) { return static_cast<int>(s.A.cols()); });

    py::class_<SecondMoments>(m, "SecondMoments")
        .def_property_readonly(
            "Nmat", [](const SecondMoments& sm) { return Matrix4c(sm.Nmat); })
        .def_property_readonly(
            "Mmat", [](const SecondMoments& sm) { return Matrix4c(sm.Mmat); });

    py::class_<PhotonStatistics>(m, "PhotonStatistics")
        .def_readonly("mean", &PhotonStatistics::mean)
        .def_readonly("variance", &PhotonStatistics::variance)
        .def("__repr__", [](const PhotonStatistics& p) {
            std::ostringstream os;
            os << "PhotonStatistics(mean=" << p.mean
               << ", variance=" << p.variance << ")";
            return os.str();
        });

    m.def("vacuum_state", &vacuum_state, py::arg("n_modes") = 4);
    m.def("displace", &displace, py::arg("state"), py::arg("mode"),
          py::arg("amplitude"));
    m.def("apply_bogoliubov", &apply_bogoliubov, py::arg("state"), py::arg("U"),
          py::arg("V"));
    m.def("apply_passive", &apply_passive, py::arg("state"), py::arg("J"));
    m.def("apply_loss", &apply_loss, py::arg("state"), py::arg("mode"),
          py::arg("transmission_t"));
    m.def("commutator_residual", &commutator_residual, py::arg("state"));
    m.def("symmetry_residual", &symmetry_residual, py::arg("state"));
    m.def("second_moments", &second_moments, py::arg("state"));
    m.def("photon_statistics", &photon_statistics, py::arg("state"),
          py::arg("subset"));
    m.def("min_symplectic_eigenvalue", &min_symplectic_eigenvalue,
          py::arg("moments"));

    py::class_<BogoliubovPair>(m, "BogoliubovPair")
        .def_property_readonly(
            "U", [](const BogoliubovPair& p) { return Matrix4c(p.U); })
        .def_property_readonly(
            "V", [](const BogoliubovPair& p) { return Matrix4c(p.V); });

    py::class_<BellSettings>(m, "BellSettings")
        .def_readonly("alpha", &BellSettings::alpha)
        .def_readonly("beta", &BellSettings::beta)
        .def_readonly("theta", &BellSettings::theta);

    m.def(
        "make_opa",
        [](double gain_g, Polarization polarization, int sign) {
            return make_opa({gain_g, polarization, sign});
        },
        py::arg("gain_g"), py::arg("polarization") = Polarization::H,
        py::arg("sign") = +1);
    m.def(
        "make_waveplate",
        [](double phase_psi, double axis_gamma) {
            return make_waveplate({phase_psi, axis_gamma});
        },
        py::arg("phase_psi"), py::arg("axis_gamma"));
    m.def(
        "make_phase_plate",
        [](double phi_su, double alpha, double beta) {
            return make_phase_plate({phi_su, alpha, beta});
        },
        py::arg("phi_su") = 0.0, py::arg("alpha") = 0.0, py::arg("beta") = 0.0);
    m.def("bell_config", &bell_config, py::arg("bell"));

    py::class_<DetectionSpec>(m, "DetectionSpec")
        .def(py::init<>())
        .def_readwrite("modes", &DetectionSpec::modes)
        .def_readwrite("basis", &DetectionSpec::basis);

    py::class_<InterferometerConfig>(m, "InterferometerConfig")
        .def(py::init<>())
        .def_readwrite("gain_g", &InterferometerConfig::gain_g)
        .def_readwrite("loss_intensity_l", &InterferometerConfig::loss_intensity_l)
        .def_readwrite("seed", &InterferometerConfig::seed,
                       "dict mapping ModeIndex to a complex seed amplitude; "
                       "assign a whole dict, item assignment mutates a copy")
        .def_readwrite("bell", &InterferometerConfig::bell)
        .def_readwrite("placement", &InterferometerConfig::placement)
        .def_readwrite("sample_phase_phi_b",
                       &InterferometerConfig::sample_phase_phi_b)
        .def_readwrite("sample_axis_delta",
                       &InterferometerConfig::sample_axis_delta)
        .def_readwrite("phi_su", &InterferometerConfig::phi_su)
        .def_readwrite("detection", &InterferometerConfig::detection)
        .def_readwrite("transmission_signal",
                       &InterferometerConfig::transmission_signal)
        .def_readwrite("transmission_idler",
                       &InterferometerConfig::transmission_idler);

    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("output", &PipelineResult::output)
        .def_readonly("plane3", &PipelineResult::plane3)
        .def_readonly("max_commutator_residual",
                      &PipelineResult::max_commutator_residual)
        .def_readonly("max_symmetry_residual",
                      &PipelineResult::max_symmetry_residual);

    m.def("build_and_run", &build_and_run, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("total_intensity_at_plane3", &total_intensity_at_plane3,
          py::arg("plane3"));

    py::class_<SensitivityResult>(m, "SensitivityResult")
        .def_readonly("mean_N", &SensitivityResult::mean_N)
        .def_readonly("delta_N", &SensitivityResult::delta_N)
        .def_readonly("dNdphi", &SensitivityResult::dNdphi)
        .def_readonly("delta_phi_sq", &SensitivityResult::delta_phi_sq)
        .def_readonly("snl_sq", &SensitivityResult::snl_sq)
        .def_readonly("S2_db", &SensitivityResult::S2_db)
        .def_readonly("phi_su_used", &SensitivityResult::phi_su_used)
        .def_readonly("insensitive", &SensitivityResult::insensitive)
        .def_readonly("derivative_residual",
                      &SensitivityResult::derivative_residual)
        .def("__repr__", [](const SensitivityResult& r) {
            std::ostringstream os;
            os << "SensitivityResult(S2_db=" << r.S2_db
               << ", insensitive=" << (r.insensitive ? "True" : "False") << ")";
            return os.str();
        });

    py::class_<PhiSuOptimum>(m, "PhiSuOptimum")
        .def_readonly("phi_su_best", &PhiSuOptimum::phi_su_best)
        .def_readonly("result", &PhiSuOptimum::result);

    m.def("sensitivity_at", &sensitivity_at, py::arg("config"),
          py::arg("step_h") = 1e-5, py::call_guard<py::gil_scoped_release>());
    m.def("optimize_phi_su", &optimize_phi_su, py::arg("config"),
          py::arg("grid_points") = 32, py::call_guard<py::gil_scoped_release>());
    m.def("heisenberg_reference", &heisenberg_reference,
          py::arg("mean_photons"));

    py::class_<FockState>(m, "FockState")
        .def_readonly("n_modes", &FockState::n_modes)
        .def_readonly("cutoff", &FockState::cutoff)
        .def_readonly("converged", &FockState::converged)
        .def_readonly("max_leakage", &FockState::max_leakage)
        .def_readonly("max_norm_drift", &FockState::max_norm_drift)
        .def_property_readonly("amplitudes", [](const FockState& s) {
            return py::array_t<std::complex<double>>(
                static_cast<py::ssize_t>(s.amplitudes.size()),
                s.amplitudes.data());
        });

    m.def("fock_vacuum", &fock_vacuum, py::arg("n_modes"), py::arg("cutoff"));
    m.def("fock_norm", &fock_norm, py::arg("state"));
    m.def("apply_displacement_fock", &apply_displacement_fock, py::arg("state"),
          py::arg("mode"), py::arg("amplitude"));
    m.def("apply_two_mode_squeezer", &apply_two_mode_squeezer, py::arg("state"),
          py::arg("mode_p"), py::arg("mode_q"), py::arg("gain_g"),
          py::arg("sign") = +1, py::call_guard<py::gil_scoped_release>());
    m.def("apply_passive_fock", &apply_passive_fock, py::arg("state"),
          py::arg("J"), py::call_guard<py::gil_scoped_release>());
    m.def("apply_loss_fock", &apply_loss_fock, py::arg("state"), py::arg("mode"),
          py::arg("transmission_t"), py::call_guard<py::gil_scoped_release>());
    m.def("fock_photon_statistics", &fock_photon_statistics, py::arg("state"),
          py::arg("subset"));
    m.def("run_pipeline_fock", &run_pipeline_fock, py::arg("config"),
          py::arg("cutoff"), py::call_guard<py::gil_scoped_release>());

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NoSensitivePointError>(m, "NoSensitivePointError");

    py::class_<AxisSpec>(m, "AxisSpec")
        .def(py::init<>())
        .def(py::init([](const std::string& parameter, double start, double stop,
                         int count) {
                 return AxisSpec{parameter, start, stop, count};
             }),
             py::arg("parameter"), py::arg("start"), py::arg("stop"),
             py::arg("count"))
        .def_readwrite("parameter", &AxisSpec::parameter)
        .def_readwrite("start", &AxisSpec::start)
        .def_readwrite("stop", &AxisSpec::stop)
        .def_readwrite("count", &AxisSpec::count);

    py::class_<SweepRequest>(m, "SweepRequest")
        .def(py::init<>())
        .def_readwrite("base", &SweepRequest::base)
        .def_readwrite("axis1", &SweepRequest::axis1)
        .def_readwrite("axis2", &SweepRequest::axis2)
        .def_readwrite("optimize_phi_su", &SweepRequest::optimize_phi_su)
        .def_readwrite("threads", &SweepRequest::threads);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("phi_b", &SweepRow::phi_b)
        .def_readonly("mean_N", &SweepRow::mean_N)
        .def_readonly("delta_N", &SweepRow::delta_N)
        .def_readonly("dN_dphi", &SweepRow::dN_dphi)
        .def_readonly("delta_phi_sq", &SweepRow::delta_phi_sq)
        .def_readonly("snl_sq", &SweepRow::snl_sq)
        .def_readonly("S2_db", &SweepRow::S2_db)
        .def_readonly("phi_su", &SweepRow::phi_su)
        .def_readonly("insensitive", &SweepRow::insensitive);

    py::class_<SweepTable>(m, "SweepTable")
        .def_readonly("axis1", &SweepTable::axis1)
        .def_readonly("rows", &SweepTable::rows);

    py::class_<MapGrid>(m, "MapGrid")
        .def_readonly("phi_b", &MapGrid::phi_b)
        .def_readonly("delta", &MapGrid::delta)
        .def_readonly("s2_db", &MapGrid::s2_db)
        .def_readonly("phi_su", &MapGrid::phi_su);

    py::class_<ValidationRow>(m, "ValidationRow")
        .def_readonly("subset", &ValidationRow::subset)
        .def_readonly("engine_mean", &ValidationRow::engine_mean)
        .def_readonly("engine_variance", &ValidationRow::engine_variance)
        .def_readonly("fock_mean", &ValidationRow::fock_mean)
        .def_readonly("fock_variance", &ValidationRow::fock_variance)
        .def_readonly("rel_mean", &ValidationRow::rel_mean)
        .def_readonly("rel_variance", &ValidationRow::rel_variance);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("cutoff", &ValidationReport::cutoff)
        .def_readonly("fock_converged", &ValidationReport::fock_converged)
        .def_readonly("max_leakage", &ValidationReport::max_leakage)
        .def_readonly("max_norm_drift", &ValidationReport::max_norm_drift)
        .def_readonly("certificate_max_delta",
                      &ValidationReport::certificate_max_delta)
        .def_readonly("max_relative_error",
                      &ValidationReport::max_relative_error)
        .def_readonly("passed", &ValidationReport::passed)
        .def_readonly("rows", &ValidationReport::rows);

    py::class_<LoadedConfig>(m, "LoadedConfig")
        .def_readonly("config", &LoadedConfig::config)
        .def_readonly("axis1", &LoadedConfig::axis1)
        .def_readonly("axis2", &LoadedConfig::axis2)
        .def_readonly("optimize_phi_su", &LoadedConfig::optimize_phi_su);

    m.attr("MAP_CEILING_DB") = kMapCeilingDb;
    m.attr("VALIDATION_REL_ERR_LIMIT") = kValidationRelErrLimit;
    m.attr("VALIDATION_CERTIFICATE_LIMIT") = kValidationCertificateLimit;

    m.def("axis_values", &axis_values, py::arg("axis"));
    m.def("run_phase_sweep", &run_phase_sweep, py::arg("request"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_map", &run_map, py::arg("request"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_validation", &run_validation, py::arg("config"),
          py::arg("cutoff") = 16, py::call_guard<py::gil_scoped_release>());
    m.def("load_config_file", &load_config_file, py::arg("path"));
    m.def("load_config_string", &load_config_string, py::arg("text"),
          py::arg("origin") = std::string("<string>"));
    m.def("format_double", &format_double, py::arg("value"));
    m.def("sweep_to_csv", &sweep_to_csv, py::arg("table"));
    m.def("map_to_csv", &map_to_csv, py::arg("grid"));
    m.def("sweep_to_json", &sweep_to_json, py::arg("table"), py::arg("config"),
          py::arg("optimized") = false);
    m.def("map_to_json", &map_to_json, py::arg("grid"), py::arg("config"),
          py::arg("axis1"), py::arg("axis2"), py::arg("optimized") = false);
    m.def("validation_to_json", &validation_to_json, py::arg("report"),
          py::arg("config"));
    m.def("config_to_json_string", &config_to_json_string, py::arg("config"));
    m.def(
        "map_to_pgm",
        [](const MapGrid& grid) { return py::bytes(map_to_pgm(grid)); },
        py::arg("grid"));
}

// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/config.hpp"
#include "surfflow/harness.hpp"
#include "surfflow/surface.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace surfflow;

namespace {

/// Mesh with its DEC operators and Hodge solver at stable addresses.
class Surface {
public:
    explicit Surface(TriangleMesh mesh)
        : mesh_(std::make_unique<TriangleMesh>(std::move(mesh)))
        , dec_(std::make_unique<Dec>(*mesh_))
        , hodge_(std::make_unique<HodgeSolver>(*dec_))
    {
    }

    const TriangleMesh& mesh() const { return *mesh_; }
    const Dec& dec() const { return *dec_; }
    const HodgeSolver& hodge() const { return *hodge_; }

    CohomologyClass cohomology(const std::optional<Eigen::VectorXd>& cls) const
    {
        return cls ? CohomologyClass{*cls} : CohomologyClass::zero(hodge_->cohomology_dimension());
    }

private:
    std::unique_ptr<TriangleMesh> mesh_;
    std::unique_ptr<Dec> dec_;
    std::unique_ptr<HodgeSolver> hodge_;
};

class Basis {
public:
    Basis(const Surface& surface, int modes)
        : basis_(std::make_unique<SpectralBasis>(compute_spectral_basis(surface.dec(), modes)))
        , para_(std::make_unique<Paracalculus>(*basis_))
    {
    }

    const SpectralBasis& basis() const { return *basis_; }
    const Paracalculus& para() const { return *para_; }

private:
    std::unique_ptr<SpectralBasis> basis_;
    std::unique_ptr<Paracalculus> para_;
};

EulerConfig euler_config(double dt, const std::string& interpolation)
{
    EulerConfig cfg;
    cfg.dt = dt;
    if (interpolation == "linear")
        cfg.interpolation = Interpolation::linear;
    else if (interpolation != "cubic")
        throw std::invalid_argument("interpolation must be cubic or linear");
    return cfg;
}

py::dict diagnostics_dict(const std::vector<Diagnostics>& rows)
{
    auto column = [&](double Diagnostics::*field) {
        Eigen::VectorXd out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].*field;
        return out;
    };
    py::dict d;
    d["time"] = column(&Diagnostics::time);
    d["energy"] = column(&Diagnostics::energy);
    d["enstrophy"] = column(&Diagnostics::enstrophy);
    d["casimir3"] = column(&Diagnostics::casimir3);
    d["casimir4"] = column(&Diagnostics::casimir4);
    d["omega_min"] = column(&Diagnostics::omega_min);
    d["omega_max"] = column(&Diagnostics::omega_max);
    d["area_error"] = column(&Diagnostics::area_error);
    return d;
}

Report dispatch(const std::string& command, const RunConfig& config)
{
    if (command == "run") return run_command(config);
    if (command == "exp") return exp_command(config);
    if (command == "probe") return probe_command(config);
    if (command == "verify") return verify_command(config);
    if (command == "slopes") return slopes_command(config);
    throw std::invalid_argument("unknown command '" + command + "'");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Ideal fluid flow on triangulated surfaces";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FlowError>(m, "FlowError", PyExc_RuntimeError);
    py::register_exception<HodgeError>(m, "HodgeError", PyExc_ValueError);
    py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
    py::register_exception<SpectralError>(m, "SpectralError", PyExc_RuntimeError);
    py::register_exception<ParacalculusError>(m, "ParacalculusError", PyExc_RuntimeError);
    py::register_exception<ProbeError>(m, "ProbeError", PyExc_ValueError);

    py::class_<Surface>(m, "Surface")
        .def_static("flat_torus", [](int n) { return Surface(make_flat_torus(n)); }, py::arg("n"))
        .def_static("icosphere", [](int level) { return Surface(make_icosphere(level)); }, py::arg("level"))
        .def_static("load", [](const std::filesystem::path& p) { return Surface(load_mesh(p)); }, py::arg("path"))
        .def_static("from_string", [](const std::string& text) { return Surface(generate_mesh(parse_config("mesh = " + text).mesh)); },
                    py::arg("text"), "flat_torus:N, icosphere:L or file:PATH")
        .def_property_readonly("num_vertices", [](const Surface& s) { return s.mesh().num_vertices(); })
        .def_property_readonly("num_edges", [](const Surface& s) { return s.mesh().num_edges(); })
        .def_property_readonly("num_faces", [](const Surface& s) { return s.mesh().num_faces(); })
        .def_property_readonly("genus", [](const Surface& s) { return s.mesh().genus(); })
        .def_property_readonly("euler_characteristic", [](const Surface& s) { return s.mesh().euler_characteristic(); })
        .def_property_readonly("positions", [](const Surface& s) { return s.mesh().positions(); })
        .def_property_readonly("faces", [](const Surface& s) { return s.mesh().faces(); })
        .def_property_readonly("vertex_areas", [](const Surface& s) { return s.dec().star0(); })
        .def_property_readonly("harmonic_dimension", [](const Surface& s) { return s.hodge().cohomology_dimension(); })
        .def("coordinates", [](const Surface& s) {
            Eigen::MatrixXd out(s.mesh().num_vertices(), 3);
            for (int v = 0; v < s.mesh().num_vertices(); ++v) out.row(v) = vertex_coordinates(s.mesh(), v);
            return out;
        }, "Per-vertex surface coordinates: chart (x, y, 0) on the torus, positions otherwise.")
        .def("mean", [](const Surface& s, const Eigen::VectorXd& f) { return s.dec().mean(Cochain0{f}); })
        .def("d0", [](const Surface& s, const Eigen::VectorXd& f) { return s.dec().d(Cochain0{f}).values; })
        .def("d1", [](const Surface& s, const Eigen::VectorXd& a) { return s.dec().d(Cochain1{a}).values; })
        .def("codifferential", [](const Surface& s, const Eigen::VectorXd& a) { return s.dec().codifferential(Cochain1{a}).values; })
        .def("biot_savart",
             [](const Surface& s, const Eigen::VectorXd& omega, const std::optional<Eigen::VectorXd>& cls) {
                 return s.hodge().biot_savart(Cochain0{omega}, s.cohomology(cls)).flux.values;
             },
             py::arg("omega"), py::arg("cls") = py::none(), "Flux of the divergence-free velocity with vorticity omega.")
        .def("curl",
             [](const Surface& s, const Eigen::VectorXd& flux) {
                 return s.hodge().curl(DivFreeVelocity{Cochain1{flux}, {}, {}}).values;
             })
        .def("harmonic_forms", [](const Surface& s) {
            std::vector<Eigen::VectorXd> out;
            for (const Cochain1& h : s.hodge().harmonic().forms) out.push_back(h.values);
            return out;
        })
        .def("vertex_velocity",
             [](const Surface& s, const Eigen::VectorXd& flux) {
                 return vertex_vectors(s.mesh(), s.hodge().velocity(s.hodge().from_flux(Cochain1{flux})));
             },
             py::arg("flux"))
        .def("exp_map",
             [](const Surface& s, const Eigen::VectorXd& omega, double dt, const std::string& interpolation) {
                 const DivFreeVelocity v = s.hodge().biot_savart(Cochain0{omega}, s.cohomology(std::nullopt));
                 const FlowMap phi = exp_map(s.hodge(), v, euler_config(dt, interpolation));
                 Eigen::MatrixXd out(phi.size(), 3);
                 for (int i = 0; i < phi.size(); ++i) out.row(i) = point_coordinates(s.mesh(), phi.image[i]);
                 return py::make_tuple(out, pushforward_area_error(s.mesh(), phi), folded_faces(s.mesh(), phi).size());
             },
             py::arg("omega"), py::arg("dt") = 1.0 / 128, py::arg("interpolation") = "cubic",
             "Time-one map of the flow started from S(omega): (image coordinates, area error, folded faces).")
        .def("run",
             [](const Surface& s, const Eigen::VectorXd& omega, double T, double dt, const std::string& interpolation) {
                 const EulerRun run = run_euler(s.hodge(), Cochain0{omega}, s.cohomology(std::nullopt), T,
                                                euler_config(dt, interpolation));
                 return py::make_tuple(run.final_state().omega.values, diagnostics_dict(run.diagnostics));
             },
             py::arg("omega"), py::arg("T"), py::arg("dt") = 1.0 / 128, py::arg("interpolation") = "cubic",
             "Euler run in the zero class: (final vorticity, diagnostics columns).");

    py::class_<Basis>(m, "SpectralBasis")
        .def(py::init<const Surface&, int>(), py::arg("surface"), py::arg("modes"), py::keep_alive<1, 2>())
        .def_property_readonly("eigenvalues", [](const Basis& b) { return b.basis().eigenvalues; })
        .def_property_readonly("eigenvectors", [](const Basis& b) { return b.basis().eigenvectors; })
        .def("coefficients", [](const Basis& b, const Eigen::VectorXd& f) { return b.basis().coefficients(f); })
        .def("synthetic_field",
             [](const Basis& b, double s, int first, int last, std::uint64_t seed) {
                 return synthetic_field(b.basis(), s, first, last, seed).values;
             },
             py::arg("s"), py::arg("first"), py::arg("last"), py::arg("seed"))
        .def("slope",
             [](const Basis& b, const Eigen::VectorXd& f, std::optional<int> first, std::optional<int> last) {
                 const auto [a, z] = standard_slope_window(b.basis().size());
                 const RegularitySlope r = sobolev_slope(Cochain0{f}, b.basis(), first.value_or(a), last.value_or(z));
                 return py::make_tuple(r.slope, r.residual);
             },
             py::arg("f"), py::arg("first") = py::none(), py::arg("last") = py::none(),
             "Decay slope s with |<f, u_k>| ~ lambda_k^(-s/2), and the fit residual.")
        .def("paraproduct", [](const Basis& b, const Eigen::VectorXd& h, const Eigen::VectorXd& f) {
            return b.para().paraproduct(Cochain0{h}, Cochain0{f}).values;
        })
        .def("bony_remainder", [](const Basis& b, const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
            return b.para().bony_remainder(Cochain0{f}, Cochain0{h}).values;
        });

    m.def("symbol_biot_savart", &symbol_biot_savart, py::arg("xi"));
    m.def("symbol_main", &symbol_main, py::arg("xi"), py::arg("dphi"));

    m.def("format_config", [](const std::string& text) { return format_config(parse_config(text)); },
          "Canonical form of a key = value configuration.");
    m.def("command",
          [](const std::string& name, const std::string& config_text, const std::filesystem::path& out,
             std::optional<std::uint64_t> seed) {
              RunConfig config = parse_config(config_text);
              config.out = out;
              if (seed) config.seed = seed;
              Report report;
              {
                  py::gil_scoped_release release;
                  report = dispatch(name, config);
              }
              py::list checks;
              for (const Check& c : report.checks) checks.append(py::make_tuple(c.name, c.pass, c.detail));
              return py::make_tuple(report.ok(), checks, report.files);
          },
          py::arg("name"), py::arg("config"), py::arg("out"), py::arg("seed") = py::none(),
          "Run a subcommand: (all checks passed, [(name, pass, detail)], files written).");
}

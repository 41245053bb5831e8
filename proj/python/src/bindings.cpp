// Python bindings for the pfs core.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <string>
#include <vector>

#include "pfs/closures.hpp"
#include "pfs/config.hpp"
#include "pfs/diagnostics.hpp"
#include "pfs/geometry.hpp"
#include "pfs/output.hpp"
#include "pfs/simulation.hpp"
#include "pfs/solver.hpp"
#include "pfs/sources.hpp"

namespace py = pybind11;
using namespace pfs;

namespace {

using Array = py::array_t<double>;

template <class F>
Array column(const std::vector<FlowState>& states, F f) {
    Array out(static_cast<py::ssize_t>(states.size()));
    auto v = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < states.size(); ++i) {
        v(static_cast<py::ssize_t>(i)) = f(states[i]);
    }
    return out;
}

py::dict state_arrays(const std::vector<FlowState>& s) {
    py::dict d;
    d["A"] = column(s, [](const FlowState& x) { return x.A; });
    d["Q"] = column(s, [](const FlowState& x) { return x.Q; });
    d["E"] = column(s, [](const FlowState& x) { return static_cast<double>(indicator(x.E)); });
    return d;
}

std::vector<FlowState> states_from(const Array& A, const Array& Q, const py::array_t<int>& E) {
    if (A.ndim() != 1 || Q.ndim() != 1 || E.ndim() != 1 || A.size() != Q.size() || A.size() != E.size()) {
        throw std::invalid_argument("A, Q and E must be 1-D arrays of equal length");
    }
    auto a = A.unchecked<1>();
    auto q = Q.unchecked<1>();
    auto e = E.unchecked<1>();
    std::vector<FlowState> out(static_cast<std::size_t>(A.size()));
    for (py::ssize_t i = 0; i < A.size(); ++i) {
        if (e(i) != 0 && e(i) != 1) {
            throw std::invalid_argument("E must contain only 0 and 1");
        }
        out[static_cast<std::size_t>(i)] = {a(i), q(i), e(i) ? Regime::Pressurized : Regime::FreeSurface};
    }
    return out;
}

std::vector<double> snapshot_times(const Trajectory& t) {
    std::vector<double> out;
    for (const auto& s : t.snapshots) {
        out.push_back(s.t);
    }
    return out;
}

py::array_t<double> stacked(const Trajectory& t, double FlowState::*field) {
    const auto rows = static_cast<py::ssize_t>(t.snapshots.size());
    const auto cols = static_cast<py::ssize_t>(t.mesh.size());
    py::array_t<double> out({rows, cols});
    auto v = out.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < rows; ++r) {
        const auto& st = t.snapshots[static_cast<std::size_t>(r)].states;
        for (py::ssize_t c = 0; c < cols; ++c) {
            v(r, c) = st[static_cast<std::size_t>(c)].*field;
        }
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixed free-surface / pressurized pipe flow solver";
    m.attr("__version__") = version_string();

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<GeometryError> geometry_error(m, "GeometryError", PyExc_ValueError);
    static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const ConfigError& e) {
            PyErr_SetString(config_error.ptr(), e.what());
        } catch (const GeometryError& e) {
            PyErr_SetString(geometry_error.ptr(), e.what());
        } catch (const SolverError& e) {
            PyErr_SetString(solver_error.ptr(), e.what());
        }
    });

    // --- geometry ----------------------------------------------------------
    py::class_<CircularSection>(m, "CircularSection")
        .def(py::init<double, double>(), py::arg("radius"), py::arg("radius_rate") = 0.0)
        .def_property_readonly("radius", &CircularSection::radius)
        .def("full_area", &CircularSection::full_area)
        .def("wet_area", &CircularSection::wet_area, py::arg("level"))
        .def("level_from_area", &CircularSection::level_from_area, py::arg("area"))
        .def("top_width", &CircularSection::top_width, py::arg("area"))
        .def("wetted_perimeter", &CircularSection::wetted_perimeter, py::arg("level"))
        .def("i1", &CircularSection::i1, py::arg("level"))
        .def("i2", &CircularSection::i2, py::arg("level"))
        .def("sigma", &CircularSection::sigma, py::arg("z"));

    py::class_<ProfileSample>(m, "ProfileSample")
        .def(py::init([](double x, double b, double R) { return ProfileSample{x, b, R}; }), py::arg("x"),
             py::arg("b"), py::arg("R"))
        .def_readwrite("x", &ProfileSample::x)
        .def_readwrite("b", &ProfileSample::b)
        .def_readwrite("R", &ProfileSample::R)
        .def("__repr__", [](const ProfileSample& s) {
            return "ProfileSample(" + std::to_string(s.x) + ", " + std::to_string(s.b) + ", " +
                   std::to_string(s.R) + ")";
        });

    py::class_<CellGeometry>(m, "CellGeometry")
        .def_readonly("S", &CellGeometry::S)
        .def_readonly("dSdX", &CellGeometry::dSdX)
        .def_readonly("sin_theta", &CellGeometry::sin_theta)
        .def_readonly("cos_theta", &CellGeometry::cos_theta)
        .def_readonly("R", &CellGeometry::R)
        .def_readonly("Z", &CellGeometry::Z)
        .def_readonly("X_center", &CellGeometry::X_center);
    m.def("uniform_cell", &uniform_cell, py::arg("radius"), py::arg("X_center") = 0.0,
          "Geometry of a horizontal cell of constant radius.");

    py::class_<PipeProfile>(m, "PipeProfile")
        .def_property_readonly("length", &PipeProfile::length)
        .def_property_readonly("samples", &PipeProfile::samples)
        .def("X_of_x", &PipeProfile::X_of_x)
        .def("x_of_X", &PipeProfile::x_of_X)
        .def("section", &PipeProfile::section, py::arg("X"))
        .def("cell", [](const PipeProfile& p, double X) { return cell_geometry(p.station(X)); }, py::arg("X"));
    m.def("build_profile", &build_profile, py::arg("samples"), py::arg("resolution") = 0);
    m.def("load_profile_table", &load_profile_table, py::arg("path"));

    py::class_<Mesh>(m, "Mesh")
        .def_readonly("dX", &Mesh::dX)
        .def_readonly("cells", &Mesh::cells)
        .def_readonly("interfaces", &Mesh::interfaces)
        .def("__len__", &Mesh::size)
        .def_property_readonly("length", &Mesh::length)
        .def_property_readonly("S", [](const Mesh& mesh) {
            std::vector<double> s;
            for (const auto& c : mesh.cells) {
                s.push_back(c.S);
            }
            return s;
        });
    m.def("make_mesh", &make_mesh, py::arg("profile"), py::arg("cells"));

    // --- closures and sources ---------------------------------------------
    py::class_<FluidConstants>(m, "FluidConstants")
        .def(py::init([](double rho0, double beta0, double g, double Ks) {
                 FluidConstants f{rho0, beta0, g, Ks};
                 f.validate();
                 return f;
             }),
             py::arg("rho0") = 1000.0, py::arg("beta0") = 5e-10, py::arg("g") = 9.81,
             py::arg("Ks") = std::numeric_limits<double>::infinity())
        .def_readwrite("rho0", &FluidConstants::rho0)
        .def_readwrite("beta0", &FluidConstants::beta0)
        .def_readwrite("g", &FluidConstants::g)
        .def_readwrite("Ks", &FluidConstants::Ks)
        .def_property_readonly("sound_speed", &FluidConstants::sound_speed);

    py::enum_<Regime>(m, "Regime")
        .value("FreeSurface", Regime::FreeSurface)
        .value("Pressurized", Regime::Pressurized);

    py::class_<FlowState>(m, "FlowState")
        .def(py::init([](double A, double Q, Regime E) { return FlowState{A, Q, E}; }), py::arg("A"),
             py::arg("Q") = 0.0, py::arg("E") = Regime::FreeSurface)
        .def_readwrite("A", &FlowState::A)
        .def_readwrite("Q", &FlowState::Q)
        .def_readwrite("E", &FlowState::E)
        .def_property_readonly("velocity", &FlowState::velocity)
        .def("__eq__", [](const FlowState& a, const FlowState& b) { return a == b; })
        .def("__repr__", [](const FlowState& s) {
            return "FlowState(A=" + std::to_string(s.A) + ", Q=" + std::to_string(s.Q) +
                   ", E=" + std::to_string(indicator(s.E)) + ")";
        });

    m.def("pressure", [](const FlowState& s, const CellGeometry& c, const FluidConstants& f) {
        return pressure(s.A, s.E, c, f);
    });
    m.def("sound_speed", [](const FlowState& s, const CellGeometry& c, const FluidConstants& f) {
        return sound_speed(s.A, s.E, c, f);
    });
    m.def("density_ratio", [](const FlowState& s, const CellGeometry& c) { return density_ratio(s.A, s.E, c.S); });
    m.def("water_level", [](const FlowState& s, const CellGeometry& c) { return water_level(s.A, s.E, c); });
    m.def("eigenvalues", [](const FlowState& s, const CellGeometry& c, const FluidConstants& f) {
        const auto e = eigenvalues(s, c, f);
        return py::make_tuple(e.minus, e.plus);
    });
    m.def("total_head", &total_head);
    m.def("entropy", &entropy);
    m.def("entropy_flux", &entropy_flux);
    m.def("source_terms", [](const FlowState& s, const CellGeometry& c, const FluidConstants& f) {
        const auto b = source_terms(s, c, f);
        py::dict d;
        d["slope"] = b.slope;
        d["pressure_source"] = b.pressure_source;
        d["curvature"] = b.curvature;
        d["friction"] = b.friction;
        d["total"] = b.total;
        return d;
    });

    // --- boundaries and solver --------------------------------------------
    py::enum_<BoundaryKind>(m, "BoundaryKind")
        .value("Wall", BoundaryKind::Wall)
        .value("Reservoir", BoundaryKind::Reservoir)
        .value("Discharge", BoundaryKind::Discharge)
        .value("Valve", BoundaryKind::Valve);

    py::class_<BoundaryCondition>(m, "BoundaryCondition")
        .def_readonly("kind", &BoundaryCondition::kind)
        .def_readonly("level", &BoundaryCondition::level)
        .def_readonly("ratio", &BoundaryCondition::ratio)
        .def_readonly("discharge", &BoundaryCondition::discharge)
        .def_readonly("close_time", &BoundaryCondition::close_time)
        .def_static("wall", &BoundaryCondition::wall)
        .def_static("reservoir_level", &BoundaryCondition::reservoir_level, py::arg("level"))
        .def_static("reservoir_ratio", &BoundaryCondition::reservoir_ratio, py::arg("ratio"))
        .def_static("inflow", &BoundaryCondition::inflow, py::arg("discharge"))
        .def_static("valve", &BoundaryCondition::valve, py::arg("discharge"), py::arg("close_time"))
        .def("__eq__", [](const BoundaryCondition& a, const BoundaryCondition& b) { return a == b; })
        .def("__repr__", [](const BoundaryCondition& b) { return "BoundaryCondition(" + to_string(b.kind) + ")"; });

    m.def(
        "interface_flux",
        [](const FlowState& l, const FlowState& r, const CellGeometry& lg, const CellGeometry& rg,
           const FluidConstants& f) {
            const auto fl = interface_flux(l, r, lg, rg, f);
            return py::make_tuple(fl.mass, fl.momentum);
        },
        py::arg("left"), py::arg("right"), py::arg("left_geometry"), py::arg("right_geometry"), py::arg("fluid"));

    // --- configuration -----------------------------------------------------
    py::enum_<InitialKind>(m, "InitialKind")
        .value("Level", InitialKind::Level)
        .value("Elevation", InitialKind::Elevation)
        .value("Ratio", InitialKind::Ratio)
        .value("Head", InitialKind::Head);

    py::class_<InitialRegion>(m, "InitialRegion")
        .def(py::init([](std::string name, InitialKind kind, double value, double from, double to,
                         std::optional<double> velocity, std::optional<double> discharge) {
                 return InitialRegion{std::move(name), from, to, kind, value, velocity, discharge};
             }),
             py::arg("name"), py::arg("kind"), py::arg("value"), py::arg("from_") = 0.0,
             py::arg("to") = std::numeric_limits<double>::infinity(), py::arg("velocity") = py::none(),
             py::arg("discharge") = py::none())
        .def_readwrite("name", &InitialRegion::name)
        .def_readwrite("kind", &InitialRegion::kind)
        .def_readwrite("value", &InitialRegion::value)
        .def_readwrite("from_", &InitialRegion::from)
        .def_readwrite("to", &InitialRegion::to)
        .def_readwrite("velocity", &InitialRegion::velocity)
        .def_readwrite("discharge", &InitialRegion::discharge);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("pipe_samples", &SimConfig::pipe_samples)
        .def_readwrite("pipe_file", &SimConfig::pipe_file)
        .def_readwrite("cells", &SimConfig::cells)
        .def_readwrite("cfl", &SimConfig::cfl)
        .def_readwrite("end_time", &SimConfig::end_time)
        .def_readwrite("output_interval", &SimConfig::output_interval)
        .def_readwrite("fluid", &SimConfig::fluid)
        .def_readwrite("left", &SimConfig::left)
        .def_readwrite("right", &SimConfig::right)
        .def_readwrite("initial", &SimConfig::initial)
        .def_readwrite("probes", &SimConfig::probes)
        .def("validate", &SimConfig::validate)
        .def("__eq__", [](const SimConfig& a, const SimConfig& b) { return a == b; })
        .def("to_text", &serialize_config);

    m.def("parse_config", &parse_config, py::arg("text"), py::arg("base_dir") = "");
    m.def("load_config", &load_config, py::arg("path"));
    m.def("serialize_config", &serialize_config, py::arg("config"));
    m.def("preset_names", &preset_names);
    m.def("preset", &preset, py::arg("name"));

    // --- running -----------------------------------------------------------
    py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
        .def_readonly("t", &DiagnosticsRecord::t)
        .def_readonly("total_A", &DiagnosticsRecord::total_A)
        .def_readonly("total_entropy", &DiagnosticsRecord::total_entropy)
        .def_readonly("entropy_flux_boundary", &DiagnosticsRecord::entropy_flux_boundary)
        .def_readonly("max_abs_u", &DiagnosticsRecord::max_abs_u)
        .def_readonly("max_density_ratio", &DiagnosticsRecord::max_density_ratio)
        .def_readonly("head_spread", &DiagnosticsRecord::head_spread)
        .def_readonly("E_front_positions", &DiagnosticsRecord::E_front_positions);

    py::class_<Snapshot>(m, "Snapshot")
        .def_readonly("t", &Snapshot::t)
        .def_readonly("step", &Snapshot::step)
        .def_readonly("diagnostics", &Snapshot::diagnostics)
        .def_readonly("ghost_left", &Snapshot::ghost_left)
        .def_readonly("ghost_right", &Snapshot::ghost_right)
        .def_property_readonly("states", [](const Snapshot& s) { return s.states; })
        .def("arrays", [](const Snapshot& s) { return state_arrays(s.states); },
             "Dict of NumPy arrays A, Q, E.");

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("mesh", &Trajectory::mesh)
        .def_readonly("fluid", &Trajectory::fluid)
        .def_readonly("snapshots", &Trajectory::snapshots)
        .def("__len__", [](const Trajectory& t) { return t.snapshots.size(); })
        .def_property_readonly("t", &snapshot_times)
        .def_property_readonly("A", [](const Trajectory& t) { return stacked(t, &FlowState::A); },
                               "(snapshots, cells) array")
        .def_property_readonly("Q", [](const Trajectory& t) { return stacked(t, &FlowState::Q); },
                               "(snapshots, cells) array")
        .def_property_readonly("E", [](const Trajectory& t) {
            const auto rows = static_cast<py::ssize_t>(t.snapshots.size());
            const auto cols = static_cast<py::ssize_t>(t.mesh.size());
            py::array_t<int> out({rows, cols});
            auto v = out.mutable_unchecked<2>();
            for (py::ssize_t r = 0; r < rows; ++r) {
                for (py::ssize_t c = 0; c < cols; ++c) {
                    v(r, c) = indicator(t.snapshots[static_cast<std::size_t>(r)].states[static_cast<std::size_t>(c)].E);
                }
            }
            return out;
        });

    py::class_<Simulation>(m, "Simulation")
        .def(py::init<const SimConfig&>(), py::arg("config"))
        .def(py::init([](const Mesh& mesh, const FluidConstants& fluid, const BoundaryCondition& left,
                         const BoundaryCondition& right, const Array& A, const Array& Q,
                         const py::array_t<int>& E, double cfl) {
                 return Simulation(mesh, fluid, Boundaries{left, right}, states_from(A, Q, E), cfl);
             }),
             py::arg("mesh"), py::arg("fluid"), py::arg("left"), py::arg("right"), py::arg("A"), py::arg("Q"),
             py::arg("E"), py::arg("cfl") = 0.9)
        .def_property_readonly("time", &Simulation::time)
        .def_property_readonly("steps", &Simulation::steps)
        .def_property_readonly("mesh", &Simulation::mesh)
        .def_property_readonly("states", &Simulation::states)
        .def("arrays", [](const Simulation& s) { return state_arrays(s.states()); })
        .def("stable_dt", &Simulation::stable_dt)
        .def("advance", &Simulation::advance, py::arg("dt"), py::arg("land_on") = py::none())
        .def("snapshot", &Simulation::snapshot);

    m.def(
        "run",
        [](const SimConfig& c, std::size_t max_steps) {
            RunOptions o;
            o.max_steps = max_steps;
            py::gil_scoped_release nogil;
            return run(c, o);
        },
        py::arg("config"), py::arg("max_steps") = RunOptions{}.max_steps);
    m.def(
        "run_simulation",
        [](Simulation& sim, double end_time, double output_interval) {
            py::gil_scoped_release nogil;
            return run(sim, end_time, output_interval);
        },
        py::arg("sim"), py::arg("end_time"), py::arg("output_interval") = 0.0);

    // --- diagnostics -------------------------------------------------------
    m.def("mass_total", [](const std::vector<FlowState>& s, const Mesh& mesh) { return mass_total(s, mesh); });
    m.def(
        "entropy_budget",
        [](const Trajectory& t, std::size_t first, std::optional<std::size_t> last) {
            return entropy_budget(t, CellWindow{first, last});
        },
        py::arg("trajectory"), py::arg("first") = 0, py::arg("last") = py::none());
    m.def("still_water_residual", [](const std::vector<FlowState>& s, const Mesh& mesh, const FluidConstants& f) {
        const auto r = still_water_residual(s, mesh, f);
        return py::make_tuple(r.max_velocity, r.max_head_jump);
    });
    m.def(
        "surge_metrics",
        [](const Trajectory& t, std::size_t probe) {
            const auto r = surge_metrics(t, probe);
            return py::make_tuple(r.peak_density_ratio, r.period);
        },
        py::arg("trajectory"), py::arg("probe"));
    m.def(
        "convergence",
        [](const SimConfig& c, std::vector<std::size_t> levels) {
            const auto table = convergence_harness(c, std::move(levels));
            py::list rows;
            for (const auto& r : table.rows) {
                py::dict d;
                d["cells"] = r.cells;
                d["error_A"] = r.error_A;
                d["error_Q"] = r.error_Q;
                d["order_A"] = r.order_A;
                d["order_Q"] = r.order_Q;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config"), py::arg("levels"));
    m.def(
        "write_outputs",
        [](const Trajectory& t, const SimConfig& c, const std::string& out_dir, double wall_seconds) {
            return emit_outputs(t, t.mesh, c, out_dir, wall_seconds).files;
        },
        py::arg("trajectory"), py::arg("config"), py::arg("out_dir"), py::arg("wall_seconds") = 0.0);
}

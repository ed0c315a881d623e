#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "r2ch/experiments.hpp"
#include "r2ch/grid_ops.hpp"
#include "r2ch/invariants.hpp"

namespace py = pybind11;
using namespace py::literals;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Structure-preserving solver for rotating two-component shallow-water waves";

    py::class_<r2ch::GridSpec>(m, "GridSpec")
        .def_static("with_count", &r2ch::GridSpec::with_count, "x_left"_a, "L"_a, "M"_a)
        .def_static("with_spacing", &r2ch::GridSpec::with_spacing, "x_left"_a, "L"_a, "h"_a)
        .def_readonly("x_left", &r2ch::GridSpec::x_left)
        .def_readonly("L", &r2ch::GridSpec::L)
        .def_readonly("M", &r2ch::GridSpec::M)
        .def_readonly("h", &r2ch::GridSpec::h)
        .def("node", &r2ch::GridSpec::node, "i"_a)
        .def(py::self == py::self)
        .def("__repr__", [](const r2ch::GridSpec& g) {
            return "GridSpec(x_left=" + std::to_string(g.x_left) + ", L=" + std::to_string(g.L) +
                   ", M=" + std::to_string(g.M) + ")";
        });

    py::class_<r2ch::GridFn>(m, "GridFn")
        .def(py::init<const r2ch::GridSpec&, double>(), "grid"_a, "fill"_a = 0.0)
        .def(py::init([](const r2ch::GridSpec& g, std::vector<double> values) {
                 return r2ch::GridFn(g, std::move(values));
             }),
             "grid"_a, "values"_a)
        .def_readonly("grid", &r2ch::GridFn::grid)
        .def_property_readonly("values", [](const r2ch::GridFn& f) { return f.v; })
        .def("__len__", &r2ch::GridFn::size)
        .def("__getitem__", [](const r2ch::GridFn& f, int i) {
            if (i < 0) i += f.size();
            if (i < 0 || i >= f.size()) throw py::index_error();
            return f[i];
        });

    py::class_<r2ch::PhysParams>(m, "PhysParams")
        .def(py::init<double, double, double, double>(), "kappa"_a = 0.0, "sigma"_a = 1.0,
             "mu"_a = 0.0, "omega"_a = 0.0)
        .def_readonly("kappa", &r2ch::PhysParams::kappa)
        .def_readonly("sigma", &r2ch::PhysParams::sigma)
        .def_readonly("mu", &r2ch::PhysParams::mu)
        .def_readonly("omega", &r2ch::PhysParams::omega)
        .def("rho_weight", &r2ch::PhysParams::rho_weight);

    py::class_<r2ch::TimeGrid>(m, "TimeGrid")
        .def_static("with_steps", &r2ch::TimeGrid::with_steps, "T"_a, "N"_a)
        .def_static("with_tau", &r2ch::TimeGrid::with_tau, "T"_a, "tau"_a)
        .def_readonly("T", &r2ch::TimeGrid::T)
        .def_readonly("N", &r2ch::TimeGrid::N)
        .def_readonly("tau", &r2ch::TimeGrid::tau);

    py::class_<r2ch::State>(m, "State")
        .def(py::init<r2ch::GridFn, r2ch::GridFn, double>(), "u"_a, "rho"_a, "t"_a = 0.0)
        .def_readonly("u", &r2ch::State::u)
        .def_readonly("rho", &r2ch::State::rho)
        .def_readonly("t", &r2ch::State::t);

    py::class_<r2ch::SolverCfg>(m, "SolverCfg")
        .def(py::init<>())
        .def_readwrite("picard_tol", &r2ch::SolverCfg::picard_tol)
        .def_readwrite("max_picard_iters", &r2ch::SolverCfg::max_picard_iters)
        .def_readwrite("newton_tol", &r2ch::SolverCfg::newton_tol)
        .def_readwrite("max_newton_iters", &r2ch::SolverCfg::max_newton_iters);

    py::class_<r2ch::Norms>(m, "Norms")
        .def_readonly("l2", &r2ch::Norms::l2)
        .def_readonly("h1_semi", &r2ch::Norms::h1_semi)
        .def_readonly("linf", &r2ch::Norms::linf);

    m.def("centered_diff", &r2ch::centered_diff, "v"_a);
    m.def("second_diff", &r2ch::second_diff, "v"_a);
    m.def("psi", &r2ch::psi, "u"_a, "v"_a);
    m.def("inner", &r2ch::inner, "u"_a, "v"_a);
    m.def("inner_grad", &r2ch::inner_grad, "v"_a, "w"_a);
    m.def("norms", &r2ch::norms, "v"_a);

    m.def("energy", &r2ch::energy, "s"_a, "p"_a);
    m.def("energy_shifted", &r2ch::energy_shifted, "s"_a, "p"_a);
    m.def("momentum", &r2ch::momentum, "s"_a, "p"_a);
    m.def("momentum_shifted", &r2ch::momentum_shifted, "s"_a, "p"_a);
    m.def("mass", &r2ch::mass, "s"_a);

    py::class_<r2ch::InvariantSample>(m, "InvariantSample")
        .def_readonly("t", &r2ch::InvariantSample::t)
        .def_readonly("E", &r2ch::InvariantSample::E)
        .def_readonly("H", &r2ch::InvariantSample::H)
        .def_readonly("I", &r2ch::InvariantSample::I)
        .def_readonly("E_shift", &r2ch::InvariantSample::E_shift)
        .def_readonly("H_shift", &r2ch::InvariantSample::H_shift)
        .def_readonly("picard_iters", &r2ch::InvariantSample::picard_iters);
    m.def("sample_invariants", &r2ch::sample_invariants, "s"_a, "p"_a, "picard_iters"_a = 0);

    py::class_<r2ch::UniquenessWarning>(m, "UniquenessWarning")
        .def_readonly("t", &r2ch::UniquenessWarning::t)
        .def_readonly("ratio", &r2ch::UniquenessWarning::ratio);

    m.def(
        "picard_step",
        [](const r2ch::State& prev, const r2ch::PhysParams& p, double tau,
           const r2ch::SolverCfg& cfg) {
            r2ch::PicardResult r = r2ch::picard_step(prev, p, tau, cfg);
            return py::make_tuple(std::move(r.next), r.iters);
        },
        "prev"_a, "p"_a, "tau"_a, "cfg"_a = r2ch::SolverCfg{},
        "One implicit midpoint step; returns (next_state, picard_iters).");
    m.def("newton_step", &r2ch::newton_step, "prev"_a, "p"_a, "tau"_a,
          "cfg"_a = r2ch::SolverCfg{});

    py::class_<r2ch::Trajectory>(m, "Trajectory")
        .def_readonly("invariants", &r2ch::Trajectory::invariants)
        .def_readonly("history", &r2ch::Trajectory::history)
        .def_readonly("snapshots", &r2ch::Trajectory::snapshots)
        .def_readonly("warnings", &r2ch::Trajectory::warnings)
        .def_readonly("final_state", &r2ch::Trajectory::final_state)
        .def_readonly("max_picard_iters", &r2ch::Trajectory::max_picard_iters)
        .def_readonly("total_picard_iters", &r2ch::Trajectory::total_picard_iters);

    m.def(
        "run",
        [](const r2ch::State& init, const r2ch::PhysParams& p, const r2ch::TimeGrid& tg,
           const r2ch::SolverCfg& cfg, bool record_history, std::vector<double> snapshot_times,
           bool warn_uniqueness) {
            r2ch::RunOptions opts;
            opts.record_history = record_history;
            opts.snapshot_times = std::move(snapshot_times);
            opts.warn_uniqueness = warn_uniqueness;
            return r2ch::run(init, p, tg, cfg, opts);
        },
        "init"_a, "p"_a, "time"_a, "cfg"_a = r2ch::SolverCfg{}, "record_history"_a = false,
        "snapshot_times"_a = std::vector<double>{}, "warn_uniqueness"_a = true);

    py::enum_<r2ch::InitKind>(m, "InitKind")
        .value("dam_break", r2ch::InitKind::dam_break)
        .value("peakon_pair", r2ch::InitKind::peakon_pair);

    py::class_<r2ch::CasePreset>(m, "CasePreset")
        .def_readonly("name", &r2ch::CasePreset::name)
        .def_readonly("init", &r2ch::CasePreset::init)
        .def_readonly("a", &r2ch::CasePreset::a)
        .def_readonly("x_left", &r2ch::CasePreset::x_left)
        .def_readonly("L", &r2ch::CasePreset::L)
        .def_readonly("T", &r2ch::CasePreset::T)
        .def_readonly("params", &r2ch::CasePreset::params)
        .def_readonly("default_h", &r2ch::CasePreset::default_h)
        .def_readonly("default_tau", &r2ch::CasePreset::default_tau)
        .def_readonly("snapshot_times", &r2ch::CasePreset::snapshot_times);

    m.def("case_catalog", &r2ch::case_catalog, py::return_value_policy::reference);
    m.def(
        "find_case",
        [](const std::string& name) {
            const r2ch::CasePreset* c = r2ch::find_case(name);
            if (!c) throw py::key_error("unknown case '" + name + "'");
            return *c;
        },
        "name"_a);
    m.def("init_dam_break", &r2ch::init_dam_break, "a"_a, "grid"_a);
    m.def("init_peakon_antipeakon", &r2ch::init_peakon_antipeakon, "grid"_a);
    m.def("initial_state", &r2ch::initial_state, "preset"_a, "grid"_a);

    py::enum_<r2ch::Axis>(m, "Axis")
        .value("space", r2ch::Axis::space)
        .value("time", r2ch::Axis::time);

    py::class_<r2ch::ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("step", &r2ch::ConvergenceRow::step)
        .def_readonly("err_u_inf", &r2ch::ConvergenceRow::err_u_inf)
        .def_readonly("ord_u", &r2ch::ConvergenceRow::ord_u)
        .def_readonly("err_rho_l2", &r2ch::ConvergenceRow::err_rho_l2)
        .def_readonly("ord_rho", &r2ch::ConvergenceRow::ord_rho)
        .def_readonly("degenerate", &r2ch::ConvergenceRow::degenerate);

    m.def("run_convergence_study", &r2ch::run_convergence_study, "preset"_a, "axis"_a, "levels"_a,
          "base_h"_a, "base_tau"_a, "cfg"_a = r2ch::SolverCfg{}, "jobs"_a = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("convergence_order", &r2ch::convergence_order, "err_coarse"_a, "err_fine"_a);
    m.def("symmetry_probe", &r2ch::symmetry_probe, "trajectory"_a);
}

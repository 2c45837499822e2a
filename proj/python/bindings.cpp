#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "rbsde/analysis.hpp"
#include "rbsde/scenario_json.hpp"

namespace py = pybind11;
using namespace rbsde;

namespace {

std::vector<double> slice_to_vector(const AdaptedField& f, int i) {
    auto s = f.slice(i);
    return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reflected backward SDE laboratory on binomial lattices";

    py::class_<BinomialLattice>(m, "BinomialLattice")
        .def_property_readonly("steps", &BinomialLattice::steps)
        .def_property_readonly("horizon", &BinomialLattice::horizon)
        .def_property_readonly("dt", &BinomialLattice::dt)
        .def_property_readonly("sqrt_dt", &BinomialLattice::sqrt_dt)
        .def("t", &BinomialLattice::t, py::arg("i"))
        .def("state", &BinomialLattice::state, py::arg("i"), py::arg("j"))
        .def("node_weight", &BinomialLattice::node_weight, py::arg("i"), py::arg("j"))
        .def("__repr__", [](const BinomialLattice& lat) {
            return "BinomialLattice(T=" + std::to_string(lat.horizon()) +
                   ", N=" + std::to_string(lat.steps()) + ")";
        });

    m.def("build_lattice", &build_lattice, py::arg("horizon"), py::arg("steps"));
    m.def("node_weights", &node_weights, py::arg("lattice"), py::arg("i"));

    py::class_<AdaptedField>(m, "AdaptedField")
        .def(py::init<int, double>(), py::arg("steps"), py::arg("init") = 0.0)
        .def_property_readonly("steps", &AdaptedField::steps)
        .def("at", [](const AdaptedField& f, int i, int j) { return f(i, j); }, py::arg("i"),
             py::arg("j"))
        .def("set", [](AdaptedField& f, int i, int j, double v) { f(i, j) = v; }, py::arg("i"),
             py::arg("j"), py::arg("value"))
        .def("slice", &slice_to_vector, py::arg("i"))
        .def("max_abs", &AdaptedField::max_abs);

    m.def("make_field", py::overload_cast<const BinomialLattice&, double>(&make_field),
          py::arg("lattice"), py::arg("init") = 0.0);
    m.def("make_state_field", &make_state_field, py::arg("lattice"), py::arg("fn"));

    m.def(
        "conditional_expectation",
        [](const BinomialLattice& lat, int i, const std::vector<double>& next) {
            return conditional_expectation(lat, i, next);
        },
        py::arg("lattice"), py::arg("i"), py::arg("next"));
    m.def(
        "martingale_coefficient",
        [](const BinomialLattice& lat, int i, const std::vector<double>& next) {
            return martingale_coefficient(lat, i, next);
        },
        py::arg("lattice"), py::arg("i"), py::arg("next"));
    m.def(
        "expectation_at_root",
        [](const BinomialLattice& lat, int i, const std::vector<double>& slice) {
            return expectation_at_root(lat, i, slice);
        },
        py::arg("lattice"), py::arg("i"), py::arg("slice"));

    py::class_<LatticePath>(m, "LatticePath")
        .def_readonly("up", &LatticePath::up)
        .def_readonly("node", &LatticePath::node)
        .def_readonly("state", &LatticePath::state);
    m.def("sample_path", &sample_path, py::arg("lattice"), py::arg("seed"));

    py::enum_<GrowthClass>(m, "GrowthClass")
        .value("QUADRATIC_Z", GrowthClass::QuadraticZ)
        .value("LINEAR_Z", GrowthClass::LinearZ)
        .value("SUPERLINEAR_Y", GrowthClass::SuperlinearY);

    py::class_<Generator>(m, "Generator")
        .def_readonly("name", &Generator::name)
        .def_readonly("mu", &Generator::mu)
        .def_readonly("growth_class", &Generator::growth_class)
        .def("__call__", &Generator::operator(), py::arg("t"), py::arg("y"), py::arg("z"));

    m.def("make_f0", &make_f0);
    m.def("make_fmono", &make_fmono, py::arg("c0"), py::arg("beta"));
    m.def("make_fquad", &make_fquad, py::arg("a"));
    m.def("make_fdrift", &make_fdrift, py::arg("mu"));
    m.def("offset_generator", &offset_generator, py::arg("generator"), py::arg("c"));

    py::class_<ProbeBox>(m, "ProbeBox")
        .def(py::init<>())
        .def_readwrite("t_max", &ProbeBox::t_max)
        .def_readwrite("y_lo", &ProbeBox::y_lo)
        .def_readwrite("y_hi", &ProbeBox::y_hi)
        .def_readwrite("z_max", &ProbeBox::z_max);

    py::class_<GeneratorProbeReport>(m, "GeneratorProbeReport")
        .def_readonly("monotonicity_ok", &GeneratorProbeReport::monotonicity_ok)
        .def_readonly("worst_monotonicity", &GeneratorProbeReport::worst_monotonicity)
        .def_readonly("growth_ok", &GeneratorProbeReport::growth_ok)
        .def_readonly("worst_growth", &GeneratorProbeReport::worst_growth)
        .def_readonly("phi_at_zero_ok", &GeneratorProbeReport::phi_at_zero_ok)
        .def("ok", &GeneratorProbeReport::ok);

    m.def("validate_generator", &validate_generator, py::arg("generator"),
          py::arg("box") = ProbeBox{}, py::arg("points") = 1000);

    m.def("truncate", &rbsde::truncate, py::arg("generator"), py::arg("cutoff"));
    m.def("lipschitz_approx", &lipschitz_approx, py::arg("generator"), py::arg("n"),
          py::arg("q_radius") = 0.0, py::arg("q_step") = 0.0);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("lattice", &Scenario::lattice)
        .def_readonly("barrier", &Scenario::barrier)
        .def_readonly("generator", &Scenario::generator)
        .def("terminal", [](const Scenario& s, double x) { return s.terminal(x); }, py::arg("x"));

    m.def("make_scenario", &make_scenario, py::arg("lattice"), py::arg("terminal"),
          py::arg("barrier"), py::arg("generator"));
    m.def("validate_scenario", &validate_scenario, py::arg("scenario"));
    m.def("terminal_sup_norm", &terminal_sup_norm, py::arg("scenario"));
    m.def("barrier_bound", &barrier_bound, py::arg("scenario"));

    m.def("monotone_shift", &monotone_shift, py::arg("scenario"), py::arg("lam"));
    m.def("exp_quadratic_transform", &exp_quadratic_transform, py::arg("scenario"), py::arg("a"));
    m.def("clip", &clip, py::arg("scenario"), py::arg("m"), py::arg("p"));
    m.def("barrier_shift", &barrier_shift, py::arg("scenario"), py::arg("b"));

    py::enum_<YEvaluation>(m, "YEvaluation")
        .value("IMPLICIT", YEvaluation::Implicit)
        .value("EXPLICIT", YEvaluation::Explicit);

    py::class_<SchemeOptions>(m, "SchemeOptions")
        .def(py::init<>())
        .def_readwrite("y_evaluation", &SchemeOptions::y_evaluation)
        .def_readwrite("root_tol", &SchemeOptions::root_tol)
        .def_readwrite("max_root_iters", &SchemeOptions::max_root_iters)
        .def_readwrite("contraction_guard", &SchemeOptions::contraction_guard);

    py::class_<ClauseResidual>(m, "ClauseResidual")
        .def_readonly("value", &ClauseResidual::value)
        .def_readonly("step", &ClauseResidual::step)
        .def_readonly("node", &ClauseResidual::node);

    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("barrier_violation", &ResidualReport::barrier_violation)
        .def_readonly("skorokhod_product", &ResidualReport::skorokhod_product)
        .def_readonly("backward_identity", &ResidualReport::backward_identity)
        .def_readonly("dk_negative", &ResidualReport::dk_negative)
        .def("max_of_all", &ResidualReport::max_of_all);

    py::class_<DiscreteSolution>(m, "DiscreteSolution")
        .def_readonly("y", &DiscreteSolution::y)
        .def_readonly("z", &DiscreteSolution::z)
        .def_readonly("dk", &DiscreteSolution::dk)
        .def_readonly("residual_report", &DiscreteSolution::residual_report)
        .def_property_readonly("y0", &DiscreteSolution::y0);

    m.def("solve_rbsde", &solve_rbsde, py::arg("scenario"), py::arg("options") = SchemeOptions{});
    m.def("implicit_y_step", &implicit_y_step, py::arg("a"), py::arg("t"), py::arg("z"),
          py::arg("generator"), py::arg("dt"), py::arg("options") = SchemeOptions{});
    m.def("residuals", &residuals, py::arg("solution"), py::arg("scenario"));
    m.def("cumulative_k_along", &cumulative_k_along, py::arg("solution"), py::arg("path"));
    m.def("expected_terminal_k", &expected_terminal_k, py::arg("solution"));

    py::class_<SnellDecomposition>(m, "SnellDecomposition")
        .def_readonly("envelope", &SnellDecomposition::envelope)
        .def_readonly("zbar", &SnellDecomposition::zbar)
        .def_readonly("dkbar", &SnellDecomposition::dkbar)
        .def_property_readonly("root_value", &SnellDecomposition::root_value);

    m.def("snell_envelope", &snell_envelope, py::arg("lattice"), py::arg("payoff"));
    m.def("brute_force_snell", &brute_force_snell, py::arg("lattice"), py::arg("payoff"));
    m.def("explicit_quadratic", &explicit_quadratic, py::arg("lattice"), py::arg("terminal"),
          py::arg("barrier"));

    py::class_<IntegrabilityDiagnostic>(m, "IntegrabilityDiagnostic")
        .def_readonly("e_exp_2xi", &IntegrabilityDiagnostic::e_exp_2xi)
        .def_readonly("barrier_proxy", &IntegrabilityDiagnostic::barrier_proxy);
    m.def(
        "check_integrability",
        [](const BinomialLattice& lat, const std::function<double(double)>& terminal,
           const AdaptedField* barrier) { return check_integrability(lat, terminal, barrier); },
        py::arg("lattice"), py::arg("terminal"), py::arg("barrier") = nullptr);

    py::class_<IntegrabilityGrowthProbe>(m, "IntegrabilityGrowthProbe")
        .def_readonly("steps", &IntegrabilityGrowthProbe::steps)
        .def_readonly("values", &IntegrabilityGrowthProbe::values)
        .def_readonly("growing", &IntegrabilityGrowthProbe::growing)
        .def_readonly("diverging", &IntegrabilityGrowthProbe::diverging);
    m.def(
        "integrability_growth_probe",
        [](double horizon, const std::vector<int>& steps,
           const std::function<double(double)>& terminal) {
            return integrability_growth_probe(horizon, steps, terminal);
        },
        py::arg("horizon"), py::arg("step_counts"), py::arg("terminal"));

    py::class_<ComparisonHypotheses>(m, "ComparisonHypotheses")
        .def(py::init<>())
        .def_readwrite("terminal_ordered", &ComparisonHypotheses::terminal_ordered)
        .def_readwrite("generator_ordered", &ComparisonHypotheses::generator_ordered)
        .def_readwrite("barrier_ordered", &ComparisonHypotheses::barrier_ordered)
        .def_readwrite("barriers_equal", &ComparisonHypotheses::barriers_equal);

    py::class_<ClauseCheck>(m, "ClauseCheck")
        .def_readonly("checked", &ClauseCheck::checked)
        .def_readonly("ok", &ClauseCheck::ok)
        .def_readonly("worst", &ClauseCheck::worst)
        .def_readonly("step", &ClauseCheck::step)
        .def_readonly("node", &ClauseCheck::node);

    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("y_ordered", &ComparisonReport::y_ordered)
        .def_readonly("dk_ordered", &ComparisonReport::dk_ordered)
        .def_readonly("k_ordered", &ComparisonReport::k_ordered)
        .def("all_ok", &ComparisonReport::all_ok);

    m.def("check_comparison", &check_comparison, py::arg("sol1"), py::arg("sol2"),
          py::arg("hypotheses"), py::arg("tol") = 1e-10);

    py::class_<AprioriBoundReport>(m, "AprioriBoundReport")
        .def_readonly("bound", &AprioriBoundReport::bound)
        .def_readonly("max_abs_y", &AprioriBoundReport::max_abs_y)
        .def_readonly("satisfied", &AprioriBoundReport::satisfied);
    m.def("apriori_bound", &apriori_bound, py::arg("scenario"),
          py::arg("options") = SchemeOptions{});

    py::class_<NormEstimates>(m, "NormEstimates")
        .def_readonly("e_sup_y2", &NormEstimates::e_sup_y2)
        .def_readonly("sup_exact", &NormEstimates::sup_exact)
        .def_readonly("sup_std_error", &NormEstimates::sup_std_error)
        .def_readonly("e_int_z2", &NormEstimates::e_int_z2)
        .def_readonly("e_int_abs_z", &NormEstimates::e_int_abs_z)
        .def_readonly("e_kt", &NormEstimates::e_kt)
        .def_readonly("e_kt2", &NormEstimates::e_kt2);
    m.def("norm_estimates", &norm_estimates, py::arg("solution"), py::arg("lattice"),
          py::arg("seed") = 0);

    m.def("pointwise_bound_field", &pointwise_bound_field, py::arg("scenario"),
          py::arg("c_beta") = 1.0);

    py::enum_<SweepKind>(m, "SweepKind")
        .value("LIPSCHITZ_N", SweepKind::LipschitzN)
        .value("TRUNCATION_C", SweepKind::TruncationC);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("labels", &SweepResult::labels)
        .def_readonly("y0", &SweepResult::y0)
        .def_readonly("diffs", &SweepResult::diffs)
        .def_readonly("monotone", &SweepResult::monotone)
        .def_readonly("stabilized", &SweepResult::stabilized);

    m.def(
        "approximation_sweep",
        [](const Scenario& s, SweepKind kind, const std::vector<double>& values,
           const SchemeOptions& options, double stab_tol) {
            return approximation_sweep(s, kind, values, options, stab_tol);
        },
        py::arg("scenario"), py::arg("kind"), py::arg("values"),
        py::arg("options") = SchemeOptions{}, py::arg("stab_tol") = 1e-10);
    m.def(
        "clip_sweep",
        [](const Scenario& s, const std::vector<std::pair<int, int>>& values,
           const SchemeOptions& options, double stab_tol) {
            return approximation_sweep(s, values, options, stab_tol);
        },
        py::arg("scenario"), py::arg("values"), py::arg("options") = SchemeOptions{},
        py::arg("stab_tol") = 1e-10);

    py::enum_<ComparisonRegime>(m, "ComparisonRegime")
        .value("ORDERED_GENERATORS", ComparisonRegime::OrderedGenerators)
        .value("ORDERED_GENERATORS_QUADRATIC", ComparisonRegime::OrderedGeneratorsQuadratic)
        .value("ORDERED_BARRIERS", ComparisonRegime::OrderedBarriers);

    py::class_<ScenarioPair>(m, "ScenarioPair")
        .def_readonly("first", &ScenarioPair::first)
        .def_readonly("second", &ScenarioPair::second)
        .def_readonly("hypotheses", &ScenarioPair::hypotheses);

    m.def("random_comparison_pair", &random_comparison_pair, py::arg("regime"), py::arg("seed"),
          py::arg("horizon") = 1.0, py::arg("steps") = 12);

    // Scenario files: parse from a JSON string; returns (scenario, options, hash-hex).
    m.def(
        "parse_scenario",
        [](const std::string& text) {
            const ParsedScenario parsed = parse_scenario_json(nlohmann::json::parse(text));
            return py::make_tuple(parsed.scenario, parsed.scheme, hash_hex(parsed.hash));
        },
        py::arg("json_text"));
    m.def(
        "load_scenario_file",
        [](const std::string& path) {
            const ParsedScenario parsed = load_scenario_file(path);
            return py::make_tuple(parsed.scenario, parsed.scheme, hash_hex(parsed.hash));
        },
        py::arg("path"));
}

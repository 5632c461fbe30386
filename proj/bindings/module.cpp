#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "riskdyn/errors.hpp"
#include "riskdyn/fit.hpp"
#include "riskdyn/io.hpp"
#include "riskdyn/meanfield.hpp"
#include "riskdyn/model.hpp"
#include "riskdyn/netstats.hpp"
#include "riskdyn/rng.hpp"
#include "riskdyn/simulate.hpp"
#include "riskdyn/stats.hpp"

namespace py = pybind11;
using namespace riskdyn;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows[0].size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c)
            throw ValidationError("matrix rows must all have the same length");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

PairwiseConvention parse_convention(const std::string& text) {
    if (text == "eq3") return PairwiseConvention::eq3;
    if (text == "synchronous") return PairwiseConvention::synchronous;
    throw ValidationError("unknown pairwise convention '" + text +
                          "' (expected eq3 or synchronous)");
}

using heavy = py::call_guard<py::gil_scoped_release>;

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Failure dynamics on expert-assessed risk networks";
    m.attr("__version__") = "0.1.0";
    m.attr("MONTHS_PER_DECADE") = kMonthsPerDecade;
    m.attr("TOOL_VERSION") = kToolVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    // -- basic containers ---------------------------------------------------

    py::class_<Matrix>(m, "Matrix")
        .def(py::init<std::size_t, std::size_t, double>(), py::arg("rows"), py::arg("cols"),
             py::arg("fill") = 0.0)
        .def_static("from_rows", &matrix_from_rows, py::arg("rows"))
        .def("get", [](const Matrix& a, std::size_t r, std::size_t c) { return a(r, c); })
        .def("set", [](Matrix& a, std::size_t r, std::size_t c, double v) { a(r, c) = v; })
        .def("rows", &Matrix::rows)
        .def("cols", &Matrix::cols)
        .def("tolist", &matrix_rows);

    py::class_<MonthLabel>(m, "MonthLabel")
        .def(py::init([](const std::string& text) { return MonthLabel::parse(text); }),
             py::arg("text"))
        .def_readwrite("year", &MonthLabel::year)
        .def_readwrite("month", &MonthLabel::month)
        .def("next", &MonthLabel::next)
        .def("__str__", &MonthLabel::str)
        .def("__repr__", [](const MonthLabel& l) { return "MonthLabel('" + l.str() + "')"; })
        .def("__eq__", [](const MonthLabel& a, const MonthLabel& b) { return a == b; });

    // -- catalog, graph, history, parameters --------------------------------

    py::class_<RiskRecord>(m, "RiskRecord")
        .def(py::init([](int id, const std::string& name, const std::string& group,
                         double likelihood, double stddev) {
                 return RiskRecord{id, name, parse_group(group), likelihood, stddev};
             }),
             py::arg("id"), py::arg("name"), py::arg("group"), py::arg("likelihood"),
             py::arg("stddev") = 0.0)
        .def_readwrite("id", &RiskRecord::id)
        .def_readwrite("name", &RiskRecord::name)
        .def_property(
            "group", [](const RiskRecord& r) { return group_name(r.group); },
            [](RiskRecord& r, const std::string& g) { r.group = parse_group(g); })
        .def_readwrite("likelihood", &RiskRecord::likelihood)
        .def_readwrite("stddev", &RiskRecord::stddev)
        .def("__repr__", [](const RiskRecord& r) {
            return "RiskRecord(" + std::to_string(r.id) + ", '" + r.name + "', '" +
                   group_name(r.group) + "', " + format_double(r.likelihood) + ", " +
                   format_double(r.stddev) + ")";
        });

    py::class_<RiskCatalog>(m, "RiskCatalog")
        .def(py::init<std::vector<RiskRecord>>(), py::arg("records"))
        .def("__len__", &RiskCatalog::size)
        .def("record", &RiskCatalog::record, py::arg("id"))
        .def("entries", &RiskCatalog::entries);

    py::class_<Edge>(m, "Edge")
        .def(py::init([](int source, int target, std::uint32_t weight) {
                 return Edge{source, target, weight};
             }),
             py::arg("source"), py::arg("target"), py::arg("weight") = 1)
        .def_readwrite("source", &Edge::source)
        .def_readwrite("target", &Edge::target)
        .def_readwrite("weight", &Edge::weight)
        .def("__repr__", [](const Edge& e) {
            return "Edge(" + std::to_string(e.source) + ", " + std::to_string(e.target) + ")";
        });

    py::class_<InfluenceGraph>(m, "InfluenceGraph")
        .def(py::init<int, const std::vector<Edge>&>(), py::arg("n"), py::arg("edges"))
        .def_static("complete", &InfluenceGraph::complete, py::arg("n"))
        .def("size", &InfluenceGraph::size)
        .def("has_edge", &InfluenceGraph::has_edge, py::arg("i"), py::arg("j"),
             "0-based node indices")
        .def("neighbors", &InfluenceGraph::neighbors, py::arg("i"))
        .def("degree", &InfluenceGraph::degree, py::arg("i"))
        .def("edge_count", &InfluenceGraph::edge_count)
        .def("mean_degree", &InfluenceGraph::mean_degree)
        .def("weight", &InfluenceGraph::weight, py::arg("i"), py::arg("j"))
        .def("edges", &InfluenceGraph::edges);

    py::class_<HistoricalSeries>(m, "HistoricalSeries")
        .def(py::init([](const std::vector<std::string>& months,
                         const std::vector<std::vector<int>>& rows) {
                 std::vector<MonthLabel> labels;
                 labels.reserve(months.size());
                 for (const std::string& s : months) labels.push_back(MonthLabel::parse(s));
                 const int n = rows.empty() ? 0 : static_cast<int>(rows[0].size());
                 std::vector<std::uint8_t> flat;
                 flat.reserve(rows.size() * static_cast<std::size_t>(n));
                 for (const auto& row : rows) {
                     if (static_cast<int>(row.size()) != n)
                         throw ValidationError("history rows must all have the same length");
                     for (int v : row) flat.push_back(static_cast<std::uint8_t>(v));
                 }
                 return HistoricalSeries(std::move(labels), std::move(flat), n);
             }),
             py::arg("months"), py::arg("rows"))
        .def("months_count", &HistoricalSeries::months_count)
        .def("risks_count", &HistoricalSeries::risks_count)
        .def("months",
             [](const HistoricalSeries& h) {
                 std::vector<std::string> out;
                 out.reserve(h.months().size());
                 for (const MonthLabel& l : h.months()) out.push_back(l.str());
                 return out;
             })
        .def("state", &HistoricalSeries::state, py::arg("t"), py::arg("i"))
        .def("row", &HistoricalSeries::row, py::arg("t"));

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double alpha, double beta, double gamma, const std::string& unit) {
                 return ModelParams{alpha, beta, gamma, parse_time_unit(unit)};
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("time_unit") = "month")
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_property(
            "time_unit", [](const ModelParams& p) { return time_unit_name(p.time_unit); },
            [](ModelParams& p, const std::string& u) { p.time_unit = parse_time_unit(u); })
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(" + format_double(p.alpha) + ", " + format_double(p.beta) + ", " +
                   format_double(p.gamma) + ", '" + time_unit_name(p.time_unit) + "')";
        });

    m.def("rescale_params", &rescale_params, py::arg("params"), py::arg("factor"));
    m.def("to_monthly", &to_monthly, py::arg("params"));
    m.def("to_decade", &to_decade, py::arg("params"));
    m.def("validate_params", &validate_params, py::arg("params"));
    m.def("cross_check",
          py::overload_cast<const RiskCatalog&, const InfluenceGraph&>(&cross_check),
          py::arg("catalog"), py::arg("graph"));
    m.def("cross_check",
          py::overload_cast<const RiskCatalog&, const HistoricalSeries&>(&cross_check),
          py::arg("catalog"), py::arg("history"));

    // -- probability mappings and derived rates ------------------------------

    m.def("normalize_likelihood", &normalize_likelihood, py::arg("score"));
    m.def("internal_probability", &internal_probability, py::arg("vulnerability"),
          py::arg("alpha_monthly"));
    m.def("continuation_probability", &continuation_probability, py::arg("vulnerability"),
          py::arg("gamma_monthly"));
    m.def("external_probability", &external_probability, py::arg("target_vulnerability"),
          py::arg("beta_monthly"), py::arg("connected"));

    py::class_<DerivedRates>(m, "DerivedRates")
        .def(py::init([](const std::vector<double>& lambda_int,
                         const std::vector<double>& lambda_rec,
                         const std::vector<std::vector<double>>& lambda_ext) {
                 return DerivedRates(lambda_int, lambda_rec, matrix_from_rows(lambda_ext));
             }),
             py::arg("lambda_int"), py::arg("lambda_rec"), py::arg("lambda_ext"))
        .def_static(
            "from_probabilities",
            [](const std::vector<double>& p_int, const std::vector<double>& p_con,
               const std::vector<std::vector<double>>& p_ext) {
                return DerivedRates::from_probabilities(p_int, p_con, matrix_from_rows(p_ext));
            },
            py::arg("p_int"), py::arg("p_con"), py::arg("p_ext"))
        .def("size", &DerivedRates::size)
        .def("p_int", &DerivedRates::p_int)
        .def("p_con", &DerivedRates::p_con)
        .def("lambda_int", &DerivedRates::lambda_int)
        .def("lambda_rec", &DerivedRates::lambda_rec)
        .def("lambda_ext", [](const DerivedRates& r) { return r.lambda_ext(); })
        .def("p_ext", &DerivedRates::p_ext, py::arg("source"), py::arg("target"),
             "0-based indices")
        .def("neighbors", &DerivedRates::neighbors, py::arg("i"))
        .def("degree", &DerivedRates::degree, py::arg("i"))
        .def("uniform_in_target", &DerivedRates::uniform_in_target)
        .def("incoming_intensity", &DerivedRates::incoming_intensity, py::arg("prev"),
             py::arg("i"))
        .def("activation_probability", &DerivedRates::activation_probability, py::arg("i"),
             py::arg("ext_sum"));

    m.def("derive_rates", &derive_rates, py::arg("catalog"), py::arg("graph"), py::arg("params"));

    py::class_<TransitionProbs>(m, "TransitionProbs")
        .def_readonly("activation", &TransitionProbs::activation)
        .def_readonly("continuation", &TransitionProbs::continuation);
    m.def("transition_probabilities", &transition_probabilities, py::arg("rates"),
          py::arg("prev"), py::arg("risk_id"));

    py::class_<SplitMix64>(m, "SplitMix64")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next", &SplitMix64::next)
        .def("uniform", &SplitMix64::uniform);
    m.def("substream", &substream, py::arg("master_seed"), py::arg("index"));
    m.def("step", &step, py::arg("prev"), py::arg("rates"), py::arg("rng"));

    // -- likelihood and fitting ----------------------------------------------

    py::class_<ImpossibleTransition>(m, "ImpossibleTransition")
        .def_readonly("t", &ImpossibleTransition::t)
        .def_readonly("risk", &ImpossibleTransition::risk);

    py::class_<LogLikelihoodResult>(m, "LogLikelihoodResult")
        .def_readonly("value", &LogLikelihoodResult::value)
        .def_readonly("impossible", &LogLikelihoodResult::impossible);
    m.def("log_likelihood", &log_likelihood, py::arg("rates"), py::arg("history"), heavy());

    py::class_<TransitionCounts>(m, "TransitionCounts")
        .def_static("build", &TransitionCounts::build, py::arg("history"), py::arg("graph"))
        .def_readonly("n11", &TransitionCounts::n11)
        .def_readonly("n10", &TransitionCounts::n10)
        .def_readonly("by_neighbors", &TransitionCounts::by_neighbors)
        .def("has_active_transitions", &TransitionCounts::has_active_transitions)
        .def("has_inactive_transitions", &TransitionCounts::has_inactive_transitions);

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("coarse_points", &SearchConfig::coarse_points)
        .def_readwrite("shrink", &SearchConfig::shrink)
        .def_readwrite("rel_precision", &SearchConfig::rel_precision)
        .def_readwrite("max_passes", &SearchConfig::max_passes)
        .def_readwrite("keep_trace", &SearchConfig::keep_trace)
        .def_readwrite("workers", &SearchConfig::workers)
        .def_readwrite("alpha_lo", &SearchConfig::alpha_lo)
        .def_readwrite("alpha_hi", &SearchConfig::alpha_hi)
        .def_readwrite("beta_lo", &SearchConfig::beta_lo)
        .def_readwrite("beta_hi", &SearchConfig::beta_hi)
        .def_readwrite("gamma_lo", &SearchConfig::gamma_lo)
        .def_readwrite("gamma_hi", &SearchConfig::gamma_hi);

    py::class_<FitResult>(m, "FitResult")
        .def_property_readonly("variant",
                               [](const FitResult& r) { return variant_name(r.variant); })
        .def_readonly("params_monthly", &FitResult::params_monthly)
        .def_readonly("params_decade", &FitResult::params_decade)
        .def_readonly("log_likelihood", &FitResult::log_likelihood)
        .def_readonly("boundary_hit", &FitResult::boundary_hit)
        .def_readonly("degenerate_fit", &FitResult::degenerate_fit)
        .def_readonly("passes", &FitResult::passes)
        .def_readonly("cells_evaluated", &FitResult::cells_evaluated)
        .def_readonly("trace", &FitResult::trace);

    m.def(
        "fit",
        [](const RiskCatalog& catalog, const InfluenceGraph& graph,
           const HistoricalSeries& history, const std::string& variant,
           const SearchConfig& search) {
            return fit(catalog, graph, history, parse_variant(variant), search);
        },
        py::arg("catalog"), py::arg("graph"), py::arg("history"), py::arg("variant") = "network",
        py::arg("search") = SearchConfig{}, heavy());
    m.def("free_parameter_count",
          [](const std::string& v) { return free_parameter_count(parse_variant(v)); });

    py::class_<GridAxis>(m, "GridAxis")
        .def(py::init([](double lo, double hi, int points, bool log_spaced) {
                 return GridAxis{lo, hi, points, log_spaced};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("points"), py::arg("log_spaced") = true)
        .def_readwrite("lo", &GridAxis::lo)
        .def_readwrite("hi", &GridAxis::hi)
        .def_readwrite("points", &GridAxis::points)
        .def_readwrite("log_spaced", &GridAxis::log_spaced);

    py::class_<SurfacePoint>(m, "SurfacePoint")
        .def_readonly("x", &SurfacePoint::x)
        .def_readonly("y", &SurfacePoint::y)
        .def_readonly("log_likelihood", &SurfacePoint::log_likelihood);

    m.def(
        "likelihood_surface",
        [](const RiskCatalog& catalog, const InfluenceGraph& graph,
           const HistoricalSeries& history, const std::string& variant,
           const ModelParams& pinned_monthly, const std::string& axis_x, const GridAxis& grid_x,
           const std::string& axis_y, const GridAxis& grid_y, int workers) {
            return likelihood_surface(catalog, graph, history, parse_variant(variant),
                                      pinned_monthly, axis_x, grid_x, axis_y, grid_y, workers);
        },
        py::arg("catalog"), py::arg("graph"), py::arg("history"), py::arg("variant"),
        py::arg("pinned_monthly"), py::arg("axis_x"), py::arg("grid_x"), py::arg("axis_y"),
        py::arg("grid_y"), py::arg("workers") = 0, heavy());

    py::class_<LRTestResult>(m, "LRTestResult")
        .def_readonly("statistic", &LRTestResult::statistic)
        .def_readonly("degrees_of_freedom", &LRTestResult::degrees_of_freedom)
        .def_readonly("p_value", &LRTestResult::p_value);
    m.def("lr_test", &lr_test, py::arg("full"), py::arg("restricted"));

    // -- simulation -----------------------------------------------------------

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("steps", &SimConfig::steps)
        .def_readwrite("burn_in", &SimConfig::burn_in)
        .def_readwrite("replicas", &SimConfig::replicas)
        .def_readwrite("master_seed", &SimConfig::master_seed)
        .def_readwrite("initial_state", &SimConfig::initial_state)
        .def_readwrite("percentiles", &SimConfig::percentiles)
        .def_readwrite("workers", &SimConfig::workers);

    py::class_<PersistenceReport>(m, "PersistenceReport")
        .def_readonly("fraction", &PersistenceReport::fraction)
        .def_readonly("mean_active", &PersistenceReport::mean_active)
        .def_readonly("std_active", &PersistenceReport::std_active)
        .def_readonly("percentiles", &PersistenceReport::percentiles)
        .def_readonly("activity_histogram", &PersistenceReport::activity_histogram)
        .def_readonly("samples", &PersistenceReport::samples)
        .def_readonly("replicas", &PersistenceReport::replicas);

    m.def("run_persistence",
          py::overload_cast<const DerivedRates&, const SimConfig&>(&run_persistence),
          py::arg("rates"), py::arg("config"), heavy());
    m.def("run_persistence",
          py::overload_cast<const RiskCatalog&, const InfluenceGraph&, const ModelParams&,
                            const SimConfig&>(&run_persistence),
          py::arg("catalog"), py::arg("graph"), py::arg("params"), py::arg("config"), heavy());

    py::class_<SurvivalCurve>(m, "SurvivalCurve")
        .def_readonly("survival", &SurvivalCurve::survival)
        .def_readonly("replicas", &SurvivalCurve::replicas);

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("rate", &DecayFit::rate)
        .def_readonly("r_squared", &DecayFit::r_squared)
        .def_readonly("degenerate", &DecayFit::degenerate);
    m.def("fit_exponential_decay", &fit_exponential_decay, py::arg("curve"),
          py::arg("window_lo"), py::arg("window_hi"));

    py::class_<CascadeReport>(m, "CascadeReport")
        .def_readonly("curve", &CascadeReport::curve)
        .def_readonly("lifetime_fraction", &CascadeReport::lifetime_fraction)
        .def_readonly("fit", &CascadeReport::fit)
        .def_readonly("extinct", &CascadeReport::extinct)
        .def_readonly("censored", &CascadeReport::censored)
        .def_readonly("mean_lifetime", &CascadeReport::mean_lifetime);

    m.def("run_cascade",
          py::overload_cast<const DerivedRates&, int, long, long, std::uint64_t, int>(
              &run_cascade),
          py::arg("rates"), py::arg("initiator"), py::arg("max_steps"), py::arg("replicas"),
          py::arg("seed"), py::arg("workers") = 0, heavy());
    m.def("run_cascade",
          py::overload_cast<const RiskCatalog&, const InfluenceGraph&, const ModelParams&, int,
                            long, long, std::uint64_t, int>(&run_cascade),
          py::arg("catalog"), py::arg("graph"), py::arg("params"), py::arg("initiator"),
          py::arg("max_steps"), py::arg("replicas"), py::arg("seed"), py::arg("workers") = 0,
          heavy());

    py::class_<TargetHitReport>(m, "TargetHitReport")
        .def_readonly("initiator", &TargetHitReport::initiator)
        .def_readonly("target", &TargetHitReport::target)
        .def_readonly("replicas", &TargetHitReport::replicas)
        .def_readonly("hits", &TargetHitReport::hits)
        .def_readonly("misses", &TargetHitReport::misses)
        .def_readonly("censored", &TargetHitReport::censored)
        .def_readonly("probability", &TargetHitReport::probability)
        .def_readonly("std_error", &TargetHitReport::std_error);

    m.def("run_target_hit",
          py::overload_cast<const DerivedRates&, int, int, long, std::uint64_t, long, int>(
              &run_target_hit),
          py::arg("rates"), py::arg("initiator"), py::arg("target"), py::arg("replicas"),
          py::arg("seed"), py::arg("max_steps") = 1000000, py::arg("workers") = 0, heavy());
    m.def("run_target_hit",
          py::overload_cast<const RiskCatalog&, const InfluenceGraph&, const ModelParams&, int,
                            int, long, std::uint64_t, long, int>(&run_target_hit),
          py::arg("catalog"), py::arg("graph"), py::arg("params"), py::arg("initiator"),
          py::arg("target"), py::arg("replicas"), py::arg("seed"),
          py::arg("max_steps") = 1000000, py::arg("workers") = 0, heavy());

    // -- perturbation study ----------------------------------------------------

    py::class_<PerturbationOptions>(m, "PerturbationOptions")
        .def(py::init<>())
        .def_readwrite("search", &PerturbationOptions::search)
        .def_readwrite("sim", &PerturbationOptions::sim);

    py::class_<PerturbationSet>(m, "PerturbationSet")
        .def_readonly("params_monthly", &PerturbationSet::params_monthly)
        .def_readonly("log_likelihood", &PerturbationSet::log_likelihood)
        .def_readonly("mean_active", &PerturbationSet::mean_active);

    py::class_<PerturbationReport>(m, "PerturbationReport")
        .def_readonly("k_sets", &PerturbationReport::k_sets)
        .def_readonly("baseline", &PerturbationReport::baseline)
        .def_readonly("baseline_mean_active", &PerturbationReport::baseline_mean_active)
        .def_readonly("sets", &PerturbationReport::sets)
        .def_readonly("max_rel_dev_alpha", &PerturbationReport::max_rel_dev_alpha)
        .def_readonly("max_rel_dev_beta", &PerturbationReport::max_rel_dev_beta)
        .def_readonly("max_rel_dev_gamma", &PerturbationReport::max_rel_dev_gamma)
        .def_readonly("max_rel_dev_log_likelihood",
                      &PerturbationReport::max_rel_dev_log_likelihood)
        .def_readonly("max_rel_dev_mean_active", &PerturbationReport::max_rel_dev_mean_active);

    m.def("perturbation_study", &perturbation_study, py::arg("catalog"), py::arg("graph"),
          py::arg("history"), py::arg("k_sets"), py::arg("seed"), py::arg("options"), heavy());

    // -- mean field -------------------------------------------------------------

    py::class_<MeanFieldState>(m, "MeanFieldState")
        .def(py::init([](double t, const std::vector<double>& s) {
                 MeanFieldState st;
                 st.t = t;
                 st.s = s;
                 return st;
             }),
             py::arg("t") = 0.0, py::arg("s") = std::vector<double>{})
        .def_readwrite("t", &MeanFieldState::t)
        .def_readwrite("s", &MeanFieldState::s);

    m.def("total_activity", &total_activity, py::arg("state"));
    m.def("integrate_ode", &integrate_ode, py::arg("rates"), py::arg("s0"), py::arg("dt"),
          py::arg("t_end"), heavy());
    m.def(
        "stationary_point",
        [](const DerivedRates& rates, double tol, const std::optional<std::vector<double>>& s0) {
            return stationary_point(rates, tol, s0 ? &*s0 : nullptr);
        },
        py::arg("rates"), py::arg("tol") = 1e-10, py::arg("s_init") = std::nullopt, heavy());

    py::class_<HomogeneousConfig>(m, "HomogeneousConfig")
        .def(py::init<>())
        .def_readwrite("lambda_s", &HomogeneousConfig::lambda_s)
        .def_readwrite("lambda_r", &HomogeneousConfig::lambda_r)
        .def_readwrite("lambda_e", &HomogeneousConfig::lambda_e)
        .def_readwrite("n", &HomogeneousConfig::n)
        .def_readwrite("s0", &HomogeneousConfig::s0)
        .def("lambda_E", &HomogeneousConfig::lambda_E);
    m.def("validate_homogeneous", &validate_homogeneous, py::arg("config"));
    m.def("homogeneous_closed_form", &homogeneous_closed_form, py::arg("config"), py::arg("t"));
    m.def("homogeneous_asymptote", &homogeneous_asymptote, py::arg("config"));

    py::class_<LevelResult>(m, "LevelResult")
        .def_readonly("value", &LevelResult::value)
        .def_readonly("degenerate", &LevelResult::degenerate);
    m.def("linear_ode_solution", &linear_ode_solution, py::arg("lambda_int"),
          py::arg("lambda_rec"), py::arg("t"), py::arg("s0") = 0.0);
    m.def("disconnected_stationary", &disconnected_stationary, py::arg("p_int"),
          py::arg("p_con"));

    // -- network statistics -------------------------------------------------------

    m.def(
        "pairwise_infection_probability",
        [](double q, double e, const std::string& convention) {
            return pairwise_infection_probability(q, e, parse_convention(convention));
        },
        py::arg("q"), py::arg("e"), py::arg("convention") = "eq3");

    py::class_<ContagionReport>(m, "ContagionReport")
        .def_readonly("potential", &ContagionReport::potential)
        .def_readonly("ranking", &ContagionReport::ranking)
        .def_readonly("pair_terms", &ContagionReport::pair_terms);
    m.def("contagion_potential",
          py::overload_cast<const DerivedRates&>(&contagion_potential), py::arg("rates"));
    m.def("contagion_potential",
          py::overload_cast<const RiskCatalog&, const InfluenceGraph&, const ModelParams&>(
              &contagion_potential),
          py::arg("catalog"), py::arg("graph"), py::arg("params"));

    py::class_<BlockMatrix>(m, "BlockMatrix")
        .def(py::init<>())
        .def(py::init([](const std::vector<int>& sizes,
                         const std::vector<std::vector<double>>& probabilities) {
                 BlockMatrix b;
                 b.group_sizes = sizes;
                 b.probabilities = matrix_from_rows(probabilities);
                 return b;
             }),
             py::arg("group_sizes"), py::arg("probabilities"))
        .def_readwrite("group_sizes", &BlockMatrix::group_sizes)
        .def_readwrite("probabilities", &BlockMatrix::probabilities)
        .def("groups", &BlockMatrix::groups)
        .def("nodes", &BlockMatrix::nodes);
    m.def("validate_blocks", &validate_blocks, py::arg("blocks"));
    m.def("sbm_generate", &sbm_generate, py::arg("blocks"), py::arg("seed"));
    m.def("estimate_block_probabilities", &estimate_block_probabilities, py::arg("graph"),
          py::arg("labels"));

    py::class_<DegreeStats>(m, "DegreeStats")
        .def_readonly("edge_count", &DegreeStats::edge_count)
        .def_readonly("mean_degree", &DegreeStats::mean_degree)
        .def_readonly("group_mean_degree", &DegreeStats::group_mean_degree);
    m.def("degree_stats", py::overload_cast<const InfluenceGraph&>(&degree_stats),
          py::arg("graph"));
    m.def("degree_stats",
          py::overload_cast<const InfluenceGraph&, const std::vector<int>&>(&degree_stats),
          py::arg("graph"), py::arg("labels"));
    m.def("group_labels", &group_labels, py::arg("catalog"));

    // -- io and synthetic data -------------------------------------------------

    m.def("format_double", &format_double, py::arg("value"));
    m.def("load_catalog", &load_catalog, py::arg("path"));
    m.def("load_graph", py::overload_cast<const std::string&, int>(&load_graph),
          py::arg("path"), py::arg("n"));
    m.def("load_graph", py::overload_cast<const std::string&>(&load_graph), py::arg("path"));
    m.def("load_history", &load_history, py::arg("path"));
    m.def("load_params", &load_params, py::arg("path"));
    m.def("save_catalog", &save_catalog, py::arg("catalog"), py::arg("path"));
    m.def("save_graph", &save_graph, py::arg("graph"), py::arg("path"));
    m.def("save_history", &save_history, py::arg("history"), py::arg("path"));
    m.def("save_params", &save_params, py::arg("params"), py::arg("path"));

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("group_sizes", &SynthConfig::group_sizes)
        .def_readwrite("blocks", &SynthConfig::blocks)
        .def_readwrite("ground_truth", &SynthConfig::ground_truth)
        .def_readwrite("months", &SynthConfig::months)
        .def_readwrite("start", &SynthConfig::start)
        .def_readwrite("burn_in", &SynthConfig::burn_in)
        .def_readwrite("likelihood_lo", &SynthConfig::likelihood_lo)
        .def_readwrite("likelihood_hi", &SynthConfig::likelihood_hi)
        .def_readwrite("stddev_lo", &SynthConfig::stddev_lo)
        .def_readwrite("stddev_hi", &SynthConfig::stddev_hi)
        .def_readwrite("seed", &SynthConfig::seed)
        .def("n", &SynthConfig::n);
    m.def("default_blocks", &default_blocks, py::arg("group_sizes"));
    m.def("validate_synth_config", &validate_synth_config, py::arg("config"));

    py::class_<SynthDataset>(m, "SynthDataset")
        .def_readonly("catalog", &SynthDataset::catalog)
        .def_readonly("graph", &SynthDataset::graph)
        .def_readonly("history", &SynthDataset::history)
        .def_readonly("ground_truth", &SynthDataset::ground_truth);
    m.def("synth_dataset", &synth_dataset, py::arg("config"), heavy());
    m.def("write_synth_dataset", &write_synth_dataset, py::arg("config"), py::arg("out_dir"),
          py::arg("command"), heavy());

    // -- statistics ---------------------------------------------------------------

    m.def("chi2_sf", &chi2_sf, py::arg("x"), py::arg("k"));
}

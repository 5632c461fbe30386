// riskdyn command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 invalid input or configuration,
// 3 numerical failure. Every file-producing command also writes a
// <output>.manifest.json (or manifest.json for synth) that records the
// canonical command line, input digests, and seeds; worker counts are
// left out so the manifest is identical however the run is parallelized.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskdyn/errors.hpp"
#include "riskdyn/fit.hpp"
#include "riskdyn/io.hpp"
#include "riskdyn/meanfield.hpp"
#include "riskdyn/netstats.hpp"
#include "riskdyn/simulate.hpp"

using nlohmann::json;
using namespace riskdyn;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

void emit_manifest(const std::string& out_path, const std::string& command,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::uint64_t>& seeds) {
    write_manifest(make_manifest(command, inputs, seeds), manifest_path_for(out_path));
}

std::string join_longs(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

json params_json(const ModelParams& p) {
    return json{{"alpha", p.alpha},
                {"beta", p.beta},
                {"gamma", p.gamma},
                {"time_unit", time_unit_name(p.time_unit)}};
}

// ---------------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------------

struct DataArgs {
    std::string risks, edges, history;
};

void add_data_flags(CLI::App* cmd, DataArgs& da, bool with_history) {
    cmd->add_option("--risks", da.risks, "risk catalog CSV")->required();
    cmd->add_option("--edges", da.edges, "influence edge list CSV")->required();
    if (with_history)
        cmd->add_option("--history", da.history, "monthly activity history CSV")->required();
}

struct ParamArgs {
    std::string file;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    std::string unit = "decade";
    CLI::Option* opt_file = nullptr;
    CLI::Option* opt_alpha = nullptr;
    CLI::Option* opt_beta = nullptr;
    CLI::Option* opt_gamma = nullptr;
};

void add_param_flags(CLI::App* cmd, ParamArgs& pa) {
    pa.opt_file = cmd->add_option("--params", pa.file, "params.json produced by fit or synth");
    pa.opt_alpha = cmd->add_option("--alpha", pa.alpha, "internal activation exponent");
    pa.opt_beta = cmd->add_option("--beta", pa.beta, "external influence exponent");
    pa.opt_gamma = cmd->add_option("--gamma", pa.gamma, "recovery exponent");
    cmd->add_option("--time-unit", pa.unit, "scale of the direct flags (month|decade)")
        ->capture_default_str();
    pa.opt_file->excludes(pa.opt_alpha)->excludes(pa.opt_beta)->excludes(pa.opt_gamma);
}

ModelParams resolve_params(const ParamArgs& pa, std::vector<std::string>& inputs) {
    if (!pa.file.empty()) {
        inputs.push_back(pa.file);
        return load_params(pa.file);
    }
    if (!pa.opt_alpha->count() || !pa.opt_beta->count() || !pa.opt_gamma->count())
        throw ValidationError("provide --params or all of --alpha, --beta, --gamma");
    ModelParams p{pa.alpha, pa.beta, pa.gamma, parse_time_unit(pa.unit)};
    validate_params(p);
    return p;
}

std::string canonical_params(const ParamArgs& pa, const ModelParams& resolved) {
    if (!pa.file.empty()) return " --params " + pa.file;
    return " --alpha " + format_double(resolved.alpha) + " --beta " +
           format_double(resolved.beta) + " --gamma " + format_double(resolved.gamma) +
           " --time-unit " + time_unit_name(resolved.time_unit);
}

struct SearchArgs {
    int points = 25;
    double shrink = 4.0;
    double precision = 1e-3;
    int max_passes = 60;
};

void add_search_flags(CLI::App* cmd, SearchArgs& sa) {
    cmd->add_option("--points", sa.points, "grid points per free axis")->capture_default_str();
    cmd->add_option("--shrink", sa.shrink, "box shrink factor per refinement pass")
        ->capture_default_str();
    cmd->add_option("--precision", sa.precision, "relative box width at convergence")
        ->capture_default_str();
    cmd->add_option("--max-passes", sa.max_passes, "refinement pass limit")->capture_default_str();
}

SearchConfig make_search(const SearchArgs& sa, int workers) {
    SearchConfig s;
    s.coarse_points = sa.points;
    s.shrink = sa.shrink;
    s.rel_precision = sa.precision;
    s.max_passes = sa.max_passes;
    s.workers = workers;
    return s;
}

std::string canonical_search(const SearchArgs& sa) {
    return " --points " + std::to_string(sa.points) + " --shrink " + format_double(sa.shrink) +
           " --precision " + format_double(sa.precision) + " --max-passes " +
           std::to_string(sa.max_passes);
}

json fit_json(const FitResult& r) {
    json j;
    j["variant"] = variant_name(r.variant);
    j["params_monthly"] = params_json(r.params_monthly);
    j["params_decade"] = params_json(r.params_decade);
    j["log_likelihood"] = r.log_likelihood;
    j["boundary_hit"] = r.boundary_hit;
    j["degenerate_fit"] = r.degenerate_fit;
    j["passes"] = r.passes;
    j["cells_evaluated"] = r.cells_evaluated;
    return j;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_fit(const DataArgs& da, const std::string& variant_text, const SearchArgs& sa,
            int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    const HistoricalSeries history = load_history(da.history);
    cross_check(catalog, graph);
    cross_check(catalog, history);

    const ModelVariant variant = parse_variant(variant_text);
    const FitResult r = fit(catalog, graph, history, variant, make_search(sa, workers));

    open_out(out) << fit_json(r).dump(2) << '\n';
    const std::string command = "riskdyn fit --risks " + da.risks + " --edges " + da.edges +
                                " --history " + da.history + " --variant " +
                                variant_name(variant) + canonical_search(sa) + " --out " + out;
    emit_manifest(out, command, {da.risks, da.edges, da.history}, {});

    std::cout << variant_name(variant) << ": log-likelihood " << format_double(r.log_likelihood)
              << ", decade-scale alpha " << format_double(r.params_decade.alpha) << " beta "
              << format_double(r.params_decade.beta) << " gamma "
              << format_double(r.params_decade.gamma)
              << (r.boundary_hit ? " [boundary]" : "")
              << (r.degenerate_fit ? " [degenerate]" : "") << '\n';
    return 0;
}

int cmd_surface(const DataArgs& da, const std::string& variant_text, const ParamArgs& pa,
                const std::string& ax, const std::string& ay, GridAxis gx, GridAxis gy,
                int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    const HistoricalSeries history = load_history(da.history);
    cross_check(catalog, graph);
    cross_check(catalog, history);

    std::vector<std::string> inputs = {da.risks, da.edges, da.history};
    const ModelParams pinned = resolve_params(pa, inputs);
    const ModelVariant variant = parse_variant(variant_text);
    const auto points = likelihood_surface(catalog, graph, history, variant, to_monthly(pinned),
                                           ax, gx, ay, gy, workers);

    auto os = open_out(out);
    os << ax << ',' << ay << ",log_likelihood\n";
    for (const SurfacePoint& p : points)
        os << format_double(p.x) << ',' << format_double(p.y) << ','
           << format_double(p.log_likelihood) << '\n';

    const std::string command =
        "riskdyn surface --risks " + da.risks + " --edges " + da.edges + " --history " +
        da.history + " --variant " + variant_name(variant) + canonical_params(pa, pinned) +
        " --axis-x " + ax + " --x-lo " + format_double(gx.lo) + " --x-hi " +
        format_double(gx.hi) + " --x-points " + std::to_string(gx.points) +
        (gx.log_spaced ? "" : " --x-linear") + " --axis-y " + ay + " --y-lo " +
        format_double(gy.lo) + " --y-hi " + format_double(gy.hi) + " --y-points " +
        std::to_string(gy.points) + (gy.log_spaced ? "" : " --y-linear") + " --out " + out;
    emit_manifest(out, command, inputs, {});

    std::cout << points.size() << " grid cells written to " << out << '\n';
    return 0;
}

int cmd_compare(const DataArgs& da, std::vector<std::string> variant_texts, const SearchArgs& sa,
                int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    const HistoricalSeries history = load_history(da.history);
    cross_check(catalog, graph);
    cross_check(catalog, history);

    std::vector<ModelVariant> variants;
    for (const std::string& v : variant_texts) variants.push_back(parse_variant(v));
    if (variants.size() < 2) throw ValidationError("compare needs at least two variants");

    std::vector<FitResult> fits;
    for (ModelVariant v : variants) {
        fits.push_back(fit(catalog, graph, history, v, make_search(sa, workers)));
        const FitResult& r = fits.back();
        std::cout << variant_name(v) << ": log-likelihood " << format_double(r.log_likelihood)
                  << ", decade-scale alpha " << format_double(r.params_decade.alpha) << " beta "
                  << format_double(r.params_decade.beta) << " gamma "
                  << format_double(r.params_decade.gamma) << '\n';
    }

    auto is_nested = [](ModelVariant full, ModelVariant restricted) {
        return (full == ModelVariant::network && restricted == ModelVariant::disconnected) ||
               (full == ModelVariant::network && restricted == ModelVariant::expert_based) ||
               (full == ModelVariant::disconnected && restricted == ModelVariant::expert_based);
    };

    auto os = open_out(out);
    os << "full,restricted,ll_full,ll_restricted,statistic,df,p_value,nested\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        for (std::size_t j = i + 1; j < fits.size(); ++j) {
            std::size_t a = i, b = j;
            if (free_parameter_count(fits[b].variant) > free_parameter_count(fits[a].variant))
                std::swap(a, b);
            const FitResult& full = fits[a];
            const FitResult& restricted = fits[b];
            os << variant_name(full.variant) << ',' << variant_name(restricted.variant) << ','
               << format_double(full.log_likelihood) << ','
               << format_double(restricted.log_likelihood) << ',';
            if (is_nested(full.variant, restricted.variant)) {
                const LRTestResult lr = lr_test(full, restricted);
                os << format_double(lr.statistic) << ',' << lr.degrees_of_freedom << ','
                   << format_double(lr.p_value) << ",1\n";
            } else {
                const double d = 2.0 * (full.log_likelihood - restricted.log_likelihood);
                os << format_double(d) << ",,,0\n";
            }
        }
    }

    std::string command = "riskdyn compare --risks " + da.risks + " --edges " + da.edges +
                          " --history " + da.history + " --variants ";
    for (std::size_t i = 0; i < variants.size(); ++i)
        command += std::string(i ? "," : "") + variant_name(variants[i]);
    command += canonical_search(sa) + " --out " + out;
    emit_manifest(out, command, {da.risks, da.edges, da.history}, {});
    return 0;
}

int cmd_perturb(const DataArgs& da, int k, std::uint64_t seed, const SearchArgs& sa, long replicas,
                long steps, long burn_in, int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    const HistoricalSeries history = load_history(da.history);
    cross_check(catalog, graph);
    cross_check(catalog, history);

    PerturbationOptions opts;
    opts.search = make_search(sa, workers);
    opts.sim.replicas = replicas;
    opts.sim.steps = steps;
    opts.sim.burn_in = burn_in;
    opts.sim.workers = workers;
    const PerturbationReport r = perturbation_study(catalog, graph, history, k, seed, opts);

    json j;
    j["k_sets"] = r.k_sets;
    j["baseline"] = fit_json(r.baseline);
    j["baseline_mean_active"] = r.baseline_mean_active;
    j["sets"] = json::array();
    for (const PerturbationSet& s : r.sets)
        j["sets"].push_back({{"params_monthly", params_json(s.params_monthly)},
                             {"log_likelihood", s.log_likelihood},
                             {"mean_active", s.mean_active}});
    j["max_rel_dev_alpha"] = r.max_rel_dev_alpha;
    j["max_rel_dev_beta"] = r.max_rel_dev_beta;
    j["max_rel_dev_gamma"] = r.max_rel_dev_gamma;
    j["max_rel_dev_log_likelihood"] = r.max_rel_dev_log_likelihood;
    j["max_rel_dev_mean_active"] = r.max_rel_dev_mean_active;
    open_out(out) << j.dump(2) << '\n';

    const std::string command = "riskdyn perturb --risks " + da.risks + " --edges " + da.edges +
                                " --history " + da.history + " --k " + std::to_string(k) +
                                " --seed " + std::to_string(seed) + canonical_search(sa) +
                                " --replicas " + std::to_string(replicas) + " --steps " +
                                std::to_string(steps) + " --burn-in " + std::to_string(burn_in) +
                                " --out " + out;
    emit_manifest(out, command, {da.risks, da.edges, da.history}, {seed});

    std::cout << k << " perturbation sets: max relative deviation alpha "
              << format_double(r.max_rel_dev_alpha) << ", gamma "
              << format_double(r.max_rel_dev_gamma) << ", mean activity "
              << format_double(r.max_rel_dev_mean_active) << '\n';
    return 0;
}

int cmd_simulate(const DataArgs& da, const ParamArgs& pa, long steps, long burn_in, long replicas,
                 std::uint64_t seed, const std::vector<int>& percentiles,
                 const std::vector<int>& init_active, int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::vector<std::string> inputs = {da.risks, da.edges};
    const ModelParams params = resolve_params(pa, inputs);

    SimConfig cfg;
    cfg.steps = steps;
    cfg.burn_in = burn_in;
    cfg.replicas = replicas;
    cfg.master_seed = seed;
    if (!percentiles.empty()) cfg.percentiles = percentiles;
    if (!init_active.empty()) {
        StateVector s(static_cast<std::size_t>(catalog.size()), 0);
        for (int id : init_active) {
            if (id < 1 || id > catalog.size())
                throw ValidationError("--init-active id " + std::to_string(id) +
                                      " outside 1.." + std::to_string(catalog.size()));
            s[static_cast<std::size_t>(id - 1)] = 1;
        }
        cfg.initial_state = std::move(s);
    }
    cfg.workers = workers;
    const PersistenceReport r = run_persistence(catalog, graph, params, cfg);

    auto os = open_out(out);
    os << "id,name,fraction\n";
    for (int i = 0; i < catalog.size(); ++i)
        os << (i + 1) << ',' << catalog.entries()[static_cast<std::size_t>(i)].name << ','
           << format_double(r.fraction[static_cast<std::size_t>(i)]) << '\n';

    json j;
    j["mean_active"] = r.mean_active;
    j["std_active"] = r.std_active;
    j["percentiles"] = json::object();
    for (const auto& [pct, count] : r.percentiles) j["percentiles"][std::to_string(pct)] = count;
    j["activity_histogram"] = r.activity_histogram;
    j["samples"] = r.samples;
    j["replicas"] = r.replicas;
    const std::string summary_path = manifest_path_for(out).substr(0, manifest_path_for(out).size() -
                                                                       std::string("manifest.json").size()) +
                                     "summary.json";
    open_out(summary_path) << j.dump(2) << '\n';

    std::string command = "riskdyn simulate --risks " + da.risks + " --edges " + da.edges +
                          canonical_params(pa, params) + " --steps " + std::to_string(steps) +
                          " --burn-in " + std::to_string(burn_in) + " --replicas " +
                          std::to_string(replicas) + " --seed " + std::to_string(seed);
    if (!percentiles.empty()) command += " --percentiles " + join_longs(percentiles);
    if (!init_active.empty()) command += " --init-active " + join_longs(init_active);
    command += " --out " + out;
    emit_manifest(out, command, inputs, {seed});

    std::cout << "mean active risks " << format_double(r.mean_active) << " (std "
              << format_double(r.std_active) << ") over " << r.samples << " samples\n";
    return 0;
}

int cmd_cascade(const DataArgs& da, const ParamArgs& pa, int initiator, long max_steps,
                long replicas, std::uint64_t seed, long fit_lo, long fit_hi, int workers,
                const std::string& out, std::string survival_out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::vector<std::string> inputs = {da.risks, da.edges};
    const ModelParams params = resolve_params(pa, inputs);

    const CascadeReport r =
        run_cascade(catalog, graph, params, initiator, max_steps, replicas, seed, workers);
    DecayFit decay = r.fit;
    if (fit_hi >= 0) decay = fit_exponential_decay(r.curve, fit_lo, fit_hi);

    if (survival_out.empty()) {
        const std::size_t slash = out.find_last_of('/');
        survival_out = slash == std::string::npos ? "survival.csv"
                                                  : out.substr(0, slash + 1) + "survival.csv";
    }
    auto sv = open_out(survival_out);
    sv << "t,survival\n";
    for (std::size_t t = 0; t < r.curve.survival.size(); ++t)
        sv << t << ',' << format_double(r.curve.survival[t]) << '\n';

    json j;
    j["initiator"] = initiator;
    j["replicas"] = replicas;
    j["max_steps"] = max_steps;
    j["extinct"] = r.extinct;
    j["censored"] = r.censored;
    j["mean_lifetime"] = r.mean_lifetime;
    j["fit"] = {{"rate", decay.rate},
                {"r_squared", decay.r_squared},
                {"degenerate", decay.degenerate}};
    j["lifetime_fraction"] = r.lifetime_fraction;
    open_out(out) << j.dump(2) << '\n';

    std::string command = "riskdyn cascade --risks " + da.risks + " --edges " + da.edges +
                          canonical_params(pa, params) + " --initiator " +
                          std::to_string(initiator) + " --max-steps " + std::to_string(max_steps) +
                          " --replicas " + std::to_string(replicas) + " --seed " +
                          std::to_string(seed);
    if (fit_hi >= 0)
        command += " --fit-lo " + std::to_string(fit_lo) + " --fit-hi " + std::to_string(fit_hi);
    command += " --out " + out + " --survival-out " + survival_out;
    emit_manifest(out, command, inputs, {seed});

    std::cout << "cascades from risk " << initiator << ": mean lifetime "
              << format_double(r.mean_lifetime) << " months, decay rate "
              << format_double(decay.rate) << " (r^2 " << format_double(decay.r_squared)
              << "), censored " << r.censored << '\n';
    return 0;
}

int cmd_targets(const DataArgs& da, const ParamArgs& pa, int initiator,
                const std::vector<int>& targets, long max_steps, long replicas,
                std::uint64_t seed, int workers, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::vector<std::string> inputs = {da.risks, da.edges};
    const ModelParams params = resolve_params(pa, inputs);
    if (targets.empty()) throw ValidationError("--targets needs at least one risk id");

    auto os = open_out(out);
    os << "initiator,target,replicas,hits,misses,censored,probability,std_error\n";
    for (int target : targets) {
        const TargetHitReport r = run_target_hit(catalog, graph, params, initiator, target,
                                                 replicas, seed, max_steps, workers);
        os << r.initiator << ',' << r.target << ',' << r.replicas << ',' << r.hits << ','
           << r.misses << ',' << r.censored << ',' << format_double(r.probability) << ','
           << format_double(r.std_error) << '\n';
        std::cout << "risk " << initiator << " -> risk " << target << ": hit probability "
                  << format_double(r.probability) << " +- " << format_double(r.std_error) << '\n';
    }

    const std::string command = "riskdyn targets --risks " + da.risks + " --edges " + da.edges +
                                canonical_params(pa, params) + " --initiator " +
                                std::to_string(initiator) + " --targets " + join_longs(targets) +
                                " --max-steps " + std::to_string(max_steps) + " --replicas " +
                                std::to_string(replicas) + " --seed " + std::to_string(seed) +
                                " --out " + out;
    emit_manifest(out, command, inputs, {seed});
    return 0;
}

int cmd_contagion(const DataArgs& da, const ParamArgs& pa, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::vector<std::string> inputs = {da.risks, da.edges};
    const ModelParams params = resolve_params(pa, inputs);

    const ContagionReport r = contagion_potential(catalog, graph, params);
    std::vector<int> rank_of(static_cast<std::size_t>(catalog.size()) + 1, 0);
    for (std::size_t pos = 0; pos < r.ranking.size(); ++pos)
        rank_of[static_cast<std::size_t>(r.ranking[pos])] = static_cast<int>(pos) + 1;

    auto os = open_out(out);
    os << "id,name,potential,rank\n";
    for (int i = 0; i < catalog.size(); ++i)
        os << (i + 1) << ',' << catalog.entries()[static_cast<std::size_t>(i)].name << ','
           << format_double(r.potential[static_cast<std::size_t>(i)]) << ','
           << rank_of[static_cast<std::size_t>(i) + 1] << '\n';

    const std::string command = "riskdyn contagion --risks " + da.risks + " --edges " + da.edges +
                                canonical_params(pa, params) + " --out " + out;
    emit_manifest(out, command, inputs, {});

    const int top = r.ranking.empty() ? 0 : r.ranking.front();
    if (top > 0)
        std::cout << "highest contagion potential: risk " << top << " ("
                  << catalog.record(top).name << ") with C = "
                  << format_double(r.potential[static_cast<std::size_t>(top) - 1]) << '\n';
    return 0;
}

int cmd_meanfield(const DataArgs& da, const ParamArgs& pa, const std::string& mode, double tol,
                  double t_end, double dt, const std::vector<int>& init_active,
                  const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::vector<std::string> inputs = {da.risks, da.edges};
    const ModelParams params = resolve_params(pa, inputs);
    const DerivedRates rates = derive_rates(catalog, graph, params);

    std::string command = "riskdyn meanfield --risks " + da.risks + " --edges " + da.edges +
                          canonical_params(pa, params) + " --mode " + mode;

    if (mode == "stationary") {
        const MeanFieldState s = stationary_point(rates, tol);
        auto os = open_out(out);
        os << "id,name,s_star\n";
        for (int i = 0; i < catalog.size(); ++i)
            os << (i + 1) << ',' << catalog.entries()[static_cast<std::size_t>(i)].name << ','
               << format_double(s.s[static_cast<std::size_t>(i)]) << '\n';
        std::cout << "stationary total activity " << format_double(total_activity(s)) << " of "
                  << catalog.size() << " risks\n";
        command += " --tol " + format_double(tol);
    } else if (mode == "trajectory") {
        if (t_end <= 0.0) throw ValidationError("--t-end must be positive");
        MeanFieldState s0;
        s0.s.assign(static_cast<std::size_t>(catalog.size()), 0.0);
        for (int id : init_active) {
            if (id < 1 || id > catalog.size())
                throw ValidationError("--init-active id " + std::to_string(id) +
                                      " outside 1.." + std::to_string(catalog.size()));
            s0.s[static_cast<std::size_t>(id - 1)] = 1.0;
        }
        const auto traj = integrate_ode(rates, s0, dt, t_end);
        auto os = open_out(out);
        os << "t";
        for (int i = 1; i <= catalog.size(); ++i) os << ",s" << i;
        os << '\n';
        for (const MeanFieldState& st : traj) {
            os << format_double(st.t);
            for (double v : st.s) os << ',' << format_double(v);
            os << '\n';
        }
        std::cout << traj.size() << " trajectory rows, final total activity "
                  << format_double(total_activity(traj.back())) << '\n';
        command += " --t-end " + format_double(t_end) + " --dt " + format_double(dt);
        if (!init_active.empty()) command += " --init-active " + join_longs(init_active);
    } else {
        throw ValidationError("--mode must be stationary or trajectory");
    }

    command += " --out " + out;
    emit_manifest(out, command, inputs, {});
    return 0;
}

int cmd_blocks(const DataArgs& da, const std::string& out) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);

    const std::vector<int> labels = group_labels(catalog);
    const BlockMatrix est = estimate_block_probabilities(graph, labels);
    const DegreeStats ds = degree_stats(graph, labels);

    auto os = open_out(out);
    os << "group";
    for (int g = 0; g < est.groups(); ++g)
        os << ',' << group_name(static_cast<RiskGroup>(g + 1));
    os << '\n';
    for (int r = 0; r < est.groups(); ++r) {
        os << group_name(static_cast<RiskGroup>(r + 1));
        for (int c = 0; c < est.groups(); ++c) {
            const double v = est.probabilities(static_cast<std::size_t>(r),
                                               static_cast<std::size_t>(c));
            os << ',' << (std::isnan(v) ? std::string() : format_double(v));
        }
        os << '\n';
    }

    const std::string command =
        "riskdyn blocks --risks " + da.risks + " --edges " + da.edges + " --out " + out;
    emit_manifest(out, command, {da.risks, da.edges}, {});

    std::cout << ds.edge_count << " edges, mean degree " << format_double(ds.mean_degree) << '\n';
    return 0;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, int months, long burn_in,
              const std::vector<int>& groups, double alpha, double beta, double gamma,
              const std::string& unit, const std::string& start, double lik_lo, double lik_hi,
              double sd_lo, double sd_hi) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.months = months;
    cfg.burn_in = burn_in;
    if (!groups.empty()) cfg.group_sizes = groups;
    cfg.ground_truth = ModelParams{alpha, beta, gamma, parse_time_unit(unit)};
    cfg.start = MonthLabel::parse(start);
    cfg.likelihood_lo = lik_lo;
    cfg.likelihood_hi = lik_hi;
    cfg.stddev_lo = sd_lo;
    cfg.stddev_hi = sd_hi;

    std::string command = "riskdyn synth --out-dir " + out_dir + " --seed " +
                          std::to_string(seed) + " --months " + std::to_string(months) +
                          " --burn-in " + std::to_string(burn_in) + " --groups " +
                          join_longs(cfg.group_sizes) + " --alpha " + format_double(alpha) +
                          " --beta " + format_double(beta) + " --gamma " + format_double(gamma) +
                          " --time-unit " + time_unit_name(cfg.ground_truth.time_unit) +
                          " --start " + start + " --likelihood-lo " + format_double(lik_lo) +
                          " --likelihood-hi " + format_double(lik_hi) + " --stddev-lo " +
                          format_double(sd_lo) + " --stddev-hi " + format_double(sd_hi);
    const SynthDataset data = write_synth_dataset(cfg, out_dir, command);

    std::cout << "wrote " << data.catalog.size() << " risks, " << data.graph.edge_count()
              << " edges, " << data.history.months_count() << " months to " << out_dir << '\n';
    return 0;
}

int cmd_validate(const DataArgs& da, const std::string& history, const std::string& params) {
    const RiskCatalog catalog = load_catalog(da.risks);
    const InfluenceGraph graph = load_graph(da.edges, catalog.size());
    cross_check(catalog, graph);
    std::cout << da.risks << ": " << catalog.size() << " risks\n";
    const DegreeStats ds = degree_stats(graph);
    std::cout << da.edges << ": " << ds.edge_count << " edges, mean degree "
              << format_double(ds.mean_degree) << '\n';
    if (!history.empty()) {
        const HistoricalSeries h = load_history(history);
        cross_check(catalog, h);
        std::cout << history << ": " << h.months_count() << " months, "
                  << h.months().front().str() << " to " << h.months().back().str() << '\n';
    }
    if (!params.empty()) {
        const ModelParams p = load_params(params);
        std::cout << params << ": alpha " << format_double(p.alpha) << ", beta "
                  << format_double(p.beta) << ", gamma " << format_double(p.gamma) << " per "
                  << time_unit_name(p.time_unit) << '\n';
    }
    std::cout << "ok\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"failure dynamics on an expert-assessed risk network"};
    app.require_subcommand(1);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood parameter estimate");
    DataArgs fit_da;
    add_data_flags(fit_cmd, fit_da, true);
    std::string fit_variant = "network";
    fit_cmd->add_option("--variant", fit_variant,
                        "network|disconnected|expert_based|uniform")->capture_default_str();
    SearchArgs fit_sa;
    add_search_flags(fit_cmd, fit_sa);
    int fit_workers = 0;
    fit_cmd->add_option("--workers", fit_workers, "worker threads (0: auto)");
    std::string fit_out = "fit.json";
    fit_cmd->add_option("--out", fit_out, "output path")->capture_default_str();

    // surface
    auto* surf_cmd = app.add_subcommand("surface", "dense 2-D log-likelihood table");
    DataArgs surf_da;
    add_data_flags(surf_cmd, surf_da, true);
    std::string surf_variant = "network";
    surf_cmd->add_option("--variant", surf_variant, "model variant")->capture_default_str();
    ParamArgs surf_pa;
    add_param_flags(surf_cmd, surf_pa);
    std::string surf_ax = "alpha", surf_ay = "beta";
    GridAxis surf_gx, surf_gy;
    surf_gx.points = 25;
    surf_gy.points = 25;
    bool surf_x_linear = false, surf_y_linear = false;
    surf_cmd->add_option("--axis-x", surf_ax, "alpha|beta|gamma")->capture_default_str();
    surf_cmd->add_option("--x-lo", surf_gx.lo, "x axis lower bound, monthly scale")->required();
    surf_cmd->add_option("--x-hi", surf_gx.hi, "x axis upper bound, monthly scale")->required();
    surf_cmd->add_option("--x-points", surf_gx.points, "x axis points")->capture_default_str();
    surf_cmd->add_flag("--x-linear", surf_x_linear, "linear x spacing (default log)");
    surf_cmd->add_option("--axis-y", surf_ay, "alpha|beta|gamma")->capture_default_str();
    surf_cmd->add_option("--y-lo", surf_gy.lo, "y axis lower bound, monthly scale")->required();
    surf_cmd->add_option("--y-hi", surf_gy.hi, "y axis upper bound, monthly scale")->required();
    surf_cmd->add_option("--y-points", surf_gy.points, "y axis points")->capture_default_str();
    surf_cmd->add_flag("--y-linear", surf_y_linear, "linear y spacing (default log)");
    int surf_workers = 0;
    surf_cmd->add_option("--workers", surf_workers, "worker threads (0: auto)");
    std::string surf_out = "surface.csv";
    surf_cmd->add_option("--out", surf_out, "output path")->capture_default_str();

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "fit several variants and tabulate LR tests");
    DataArgs cmp_da;
    add_data_flags(cmp_cmd, cmp_da, true);
    std::vector<std::string> cmp_variants = {"network", "disconnected", "expert_based"};
    cmp_cmd->add_option("--variants", cmp_variants, "comma-separated variant list")
        ->delimiter(',')
        ->capture_default_str();
    SearchArgs cmp_sa;
    add_search_flags(cmp_cmd, cmp_sa);
    int cmp_workers = 0;
    cmp_cmd->add_option("--workers", cmp_workers, "worker threads (0: auto)");
    std::string cmp_out = "compare.csv";
    cmp_cmd->add_option("--out", cmp_out, "output path")->capture_default_str();

    // perturb
    auto* pert_cmd = app.add_subcommand("perturb", "refit under expert-score perturbations");
    DataArgs pert_da;
    add_data_flags(pert_cmd, pert_da, true);
    int pert_k = 0;
    pert_cmd->add_option("--k", pert_k, "number of perturbation sets")->required();
    std::uint64_t pert_seed = 0;
    pert_cmd->add_option("--seed", pert_seed, "master seed")->required();
    SearchArgs pert_sa;
    add_search_flags(pert_cmd, pert_sa);
    long pert_replicas = 2000, pert_steps = 1200, pert_burn = 200;
    pert_cmd->add_option("--replicas", pert_replicas, "replicas per mean-activity estimate")
        ->capture_default_str();
    pert_cmd->add_option("--steps", pert_steps, "steps per replica")->capture_default_str();
    pert_cmd->add_option("--burn-in", pert_burn, "discarded leading states")
        ->capture_default_str();
    int pert_workers = 0;
    pert_cmd->add_option("--workers", pert_workers, "worker threads (0: auto)");
    std::string pert_out = "perturb.json";
    pert_cmd->add_option("--out", pert_out, "output path")->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo persistence statistics");
    DataArgs sim_da;
    add_data_flags(sim_cmd, sim_da, false);
    ParamArgs sim_pa;
    add_param_flags(sim_cmd, sim_pa);
    long sim_steps = 1200, sim_burn = 200, sim_replicas = 10000;
    sim_cmd->add_option("--steps", sim_steps, "transitions per replica")->capture_default_str();
    sim_cmd->add_option("--burn-in", sim_burn, "discarded leading states")->capture_default_str();
    sim_cmd->add_option("--replicas", sim_replicas, "replica count")->capture_default_str();
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--seed", sim_seed, "master seed")->required();
    std::vector<int> sim_pcts;
    sim_cmd->add_option("--percentiles", sim_pcts, "activity percentiles to report")
        ->delimiter(',');
    std::vector<int> sim_init;
    sim_cmd->add_option("--init-active", sim_init, "risk ids active at t=0 (default none)")
        ->delimiter(',');
    int sim_workers = 0;
    sim_cmd->add_option("--workers", sim_workers, "worker threads (0: auto)");
    std::string sim_out = "persistence.csv";
    sim_cmd->add_option("--out", sim_out, "output path")->capture_default_str();

    // cascade
    auto* casc_cmd = app.add_subcommand("cascade", "survival of externally driven cascades");
    DataArgs casc_da;
    add_data_flags(casc_cmd, casc_da, false);
    ParamArgs casc_pa;
    add_param_flags(casc_cmd, casc_pa);
    int casc_init = 0;
    casc_cmd->add_option("--initiator", casc_init, "1-based id of the initially active risk")
        ->required();
    long casc_max = 1200, casc_replicas = 10000;
    casc_cmd->add_option("--max-steps", casc_max, "censoring horizon")->capture_default_str();
    casc_cmd->add_option("--replicas", casc_replicas, "replica count")->capture_default_str();
    std::uint64_t casc_seed = 0;
    casc_cmd->add_option("--seed", casc_seed, "master seed")->required();
    long casc_fit_lo = 0, casc_fit_hi = -1;
    casc_cmd->add_option("--fit-lo", casc_fit_lo, "decay-fit window start (months)");
    casc_cmd->add_option("--fit-hi", casc_fit_hi, "decay-fit window end (months)");
    int casc_workers = 0;
    casc_cmd->add_option("--workers", casc_workers, "worker threads (0: auto)");
    std::string casc_out = "cascade.json", casc_sv;
    casc_cmd->add_option("--out", casc_out, "report path")->capture_default_str();
    casc_cmd->add_option("--survival-out", casc_sv,
                         "survival curve path (default survival.csv next to the report)");

    // targets
    auto* tgt_cmd = app.add_subcommand("targets", "probability a cascade ever reaches a target");
    DataArgs tgt_da;
    add_data_flags(tgt_cmd, tgt_da, false);
    ParamArgs tgt_pa;
    add_param_flags(tgt_cmd, tgt_pa);
    int tgt_init = 0;
    tgt_cmd->add_option("--initiator", tgt_init, "1-based id of the initially active risk")
        ->required();
    std::vector<int> tgt_targets;
    tgt_cmd->add_option("--targets", tgt_targets, "comma-separated target risk ids")
        ->delimiter(',')
        ->required();
    long tgt_max = 1000000, tgt_replicas = 10000;
    tgt_cmd->add_option("--max-steps", tgt_max, "censoring horizon")->capture_default_str();
    tgt_cmd->add_option("--replicas", tgt_replicas, "replica count")->capture_default_str();
    std::uint64_t tgt_seed = 0;
    tgt_cmd->add_option("--seed", tgt_seed, "master seed")->required();
    int tgt_workers = 0;
    tgt_cmd->add_option("--workers", tgt_workers, "worker threads (0: auto)");
    std::string tgt_out = "targets.csv";
    tgt_cmd->add_option("--out", tgt_out, "output path")->capture_default_str();

    // contagion
    auto* cont_cmd = app.add_subcommand("contagion", "closed-form contagion potential per risk");
    DataArgs cont_da;
    add_data_flags(cont_cmd, cont_da, false);
    ParamArgs cont_pa;
    add_param_flags(cont_cmd, cont_pa);
    std::string cont_out = "contagion.csv";
    cont_cmd->add_option("--out", cont_out, "output path")->capture_default_str();

    // meanfield
    auto* mf_cmd = app.add_subcommand("meanfield", "deterministic activity approximation");
    DataArgs mf_da;
    add_data_flags(mf_cmd, mf_da, false);
    ParamArgs mf_pa;
    add_param_flags(mf_cmd, mf_pa);
    std::string mf_mode = "stationary";
    mf_cmd->add_option("--mode", mf_mode, "stationary|trajectory")->capture_default_str();
    double mf_tol = 1e-10, mf_tend = 0.0, mf_dt = 0.1;
    mf_cmd->add_option("--tol", mf_tol, "fixed-point tolerance")->capture_default_str();
    mf_cmd->add_option("--t-end", mf_tend, "trajectory end time (months)");
    mf_cmd->add_option("--dt", mf_dt, "recording step (months)")->capture_default_str();
    std::vector<int> mf_init;
    mf_cmd->add_option("--init-active", mf_init, "risk ids starting at s=1 (default none)")
        ->delimiter(',');
    std::string mf_out = "meanfield.csv";
    mf_cmd->add_option("--out", mf_out, "output path")->capture_default_str();

    // blocks
    auto* blk_cmd = app.add_subcommand("blocks", "empirical group-pair edge densities");
    DataArgs blk_da;
    add_data_flags(blk_cmd, blk_da, false);
    std::string blk_out = "blocks.csv";
    blk_cmd->add_option("--out", blk_out, "output path")->capture_default_str();

    // synth
    auto* syn_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string syn_dir;
    syn_cmd->add_option("--out-dir", syn_dir, "existing output directory")->required();
    std::uint64_t syn_seed = 0;
    syn_cmd->add_option("--seed", syn_seed, "master seed")->required();
    int syn_months = 1560;
    long syn_burn = 240;
    syn_cmd->add_option("--months", syn_months, "history length")->capture_default_str();
    syn_cmd->add_option("--burn-in", syn_burn, "discarded pre-series transitions")
        ->capture_default_str();
    std::vector<int> syn_groups;
    syn_cmd->add_option("--groups", syn_groups, "group sizes (default 10,10,10,10,10)")
        ->delimiter(',');
    double syn_alpha = 0.365, syn_beta = 0.14, syn_gamma = 427.0;
    std::string syn_unit = "decade";
    syn_cmd->add_option("--alpha", syn_alpha, "ground-truth alpha")->capture_default_str();
    syn_cmd->add_option("--beta", syn_beta, "ground-truth beta")->capture_default_str();
    syn_cmd->add_option("--gamma", syn_gamma, "ground-truth gamma")->capture_default_str();
    syn_cmd->add_option("--time-unit", syn_unit, "scale of the ground truth")
        ->capture_default_str();
    std::string syn_start = "2000-01";
    syn_cmd->add_option("--start", syn_start, "first history month (YYYY-MM)")
        ->capture_default_str();
    double syn_lik_lo = 2.5, syn_lik_hi = 4.5, syn_sd_lo = 0.02, syn_sd_hi = 0.10;
    syn_cmd->add_option("--likelihood-lo", syn_lik_lo, "lowest expert score")
        ->capture_default_str();
    syn_cmd->add_option("--likelihood-hi", syn_lik_hi, "highest expert score")
        ->capture_default_str();
    syn_cmd->add_option("--stddev-lo", syn_sd_lo, "lowest score stddev")->capture_default_str();
    syn_cmd->add_option("--stddev-hi", syn_sd_hi, "highest score stddev")->capture_default_str();

    // validate
    auto* val_cmd = app.add_subcommand("validate", "load and cross-check input files");
    DataArgs val_da;
    add_data_flags(val_cmd, val_da, false);
    std::string val_history, val_params;
    val_cmd->add_option("--history", val_history, "monthly activity history CSV");
    val_cmd->add_option("--params", val_params, "params.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (fit_cmd->parsed())
            return cmd_fit(fit_da, fit_variant, fit_sa, fit_workers, fit_out);
        if (surf_cmd->parsed()) {
            surf_gx.log_spaced = !surf_x_linear;
            surf_gy.log_spaced = !surf_y_linear;
            return cmd_surface(surf_da, surf_variant, surf_pa, surf_ax, surf_ay, surf_gx, surf_gy,
                               surf_workers, surf_out);
        }
        if (cmp_cmd->parsed())
            return cmd_compare(cmp_da, cmp_variants, cmp_sa, cmp_workers, cmp_out);
        if (pert_cmd->parsed())
            return cmd_perturb(pert_da, pert_k, pert_seed, pert_sa, pert_replicas, pert_steps,
                               pert_burn, pert_workers, pert_out);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_da, sim_pa, sim_steps, sim_burn, sim_replicas, sim_seed,
                                sim_pcts, sim_init, sim_workers, sim_out);
        if (casc_cmd->parsed())
            return cmd_cascade(casc_da, casc_pa, casc_init, casc_max, casc_replicas, casc_seed,
                               casc_fit_lo, casc_fit_hi, casc_workers, casc_out, casc_sv);
        if (tgt_cmd->parsed())
            return cmd_targets(tgt_da, tgt_pa, tgt_init, tgt_targets, tgt_max, tgt_replicas,
                               tgt_seed, tgt_workers, tgt_out);
        if (cont_cmd->parsed()) return cmd_contagion(cont_da, cont_pa, cont_out);
        if (mf_cmd->parsed())
            return cmd_meanfield(mf_da, mf_pa, mf_mode, mf_tol, mf_tend, mf_dt, mf_init, mf_out);
        if (blk_cmd->parsed()) return cmd_blocks(blk_da, blk_out);
        if (syn_cmd->parsed())
            return cmd_synth(syn_dir, syn_seed, syn_months, syn_burn, syn_groups, syn_alpha,
                             syn_beta, syn_gamma, syn_unit, syn_start, syn_lik_lo, syn_lik_hi,
                             syn_sd_lo, syn_sd_hi);
        if (val_cmd->parsed()) return cmd_validate(val_da, val_history, val_params);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

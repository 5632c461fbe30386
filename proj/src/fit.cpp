#include "riskdyn/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskdyn/errors.hpp"
#include "riskdyn/parallel.hpp"
#include "riskdyn/rng.hpp"
#include "riskdyn/stats.hpp"

namespace riskdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ln(1 - e^{-x}) for x >= 0, stable at both ends; -inf at x = 0.
double log1mexp(double x) {
    if (x <= 0.0) return -kInf;
    if (x < 0.6931471805599453) return std::log(-std::expm1(-x));
    return std::log1p(-std::exp(-x));
}

} // namespace

// ---------------------------------------------------------------------------
// Variants
// ---------------------------------------------------------------------------

ModelVariant parse_variant(const std::string& text) {
    if (text == "network") return ModelVariant::network;
    if (text == "disconnected") return ModelVariant::disconnected;
    if (text == "expert_based") return ModelVariant::expert_based;
    if (text == "uniform") return ModelVariant::uniform;
    throw ValidationError("unknown model variant '" + text + "'");
}

std::string variant_name(ModelVariant v) {
    switch (v) {
    case ModelVariant::network: return "network";
    case ModelVariant::disconnected: return "disconnected";
    case ModelVariant::expert_based: return "expert_based";
    case ModelVariant::uniform: return "uniform";
    }
    throw ValidationError("invalid model variant value");
}

int free_parameter_count(ModelVariant v) {
    switch (v) {
    case ModelVariant::network: return 3;
    case ModelVariant::disconnected: return 2;
    case ModelVariant::expert_based: return 1;
    case ModelVariant::uniform: return 3;
    }
    throw ValidationError("invalid model variant value");
}

// ---------------------------------------------------------------------------
// Direct log-likelihood
// ---------------------------------------------------------------------------

LogLikelihoodResult log_likelihood(const DerivedRates& rates, const HistoricalSeries& history) {
    if (history.risks_count() != rates.size())
        throw ValidationError("log_likelihood: history has " +
                              std::to_string(history.risks_count()) + " risks, rates have " +
                              std::to_string(rates.size()));
    if (history.months_count() < 2)
        throw ValidationError("log_likelihood: need at least 2 months");

    const int n = rates.size();
    double ll = 0.0;
    for (int t = 1; t < history.months_count(); ++t) {
        const StateVector prev = history.row(t - 1);
        for (int i = 0; i < n; ++i) {
            const bool now = history.state(t, i) != 0;
            double term;
            if (prev[i]) {
                const double lr = rates.lambda_rec()[i];
                term = now ? -lr : log1mexp(lr);
            } else {
                const double lam = rates.lambda_int()[i] + rates.incoming_intensity(prev, i);
                term = now ? log1mexp(lam) : -lam;
            }
            if (term == -kInf)
                return {-kInf, ImpossibleTransition{t + 1, i + 1}};
            ll += term;
        }
    }
    return {ll, std::nullopt};
}

// ---------------------------------------------------------------------------
// Sufficient statistics
// ---------------------------------------------------------------------------

TransitionCounts TransitionCounts::build(const HistoricalSeries& history,
                                         const InfluenceGraph& graph) {
    const int n = graph.size();
    if (history.risks_count() != n)
        throw ValidationError("transition counts: history and graph disagree on N");
    if (history.months_count() < 2)
        throw ValidationError("transition counts: need at least 2 months");

    TransitionCounts counts;
    counts.n11.assign(static_cast<std::size_t>(n), 0);
    counts.n10.assign(static_cast<std::size_t>(n), 0);
    counts.by_neighbors.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        counts.by_neighbors[i].assign(static_cast<std::size_t>(graph.degree(i)) + 1, {0, 0});

    for (int t = 1; t < history.months_count(); ++t) {
        for (int i = 0; i < n; ++i) {
            const bool was = history.state(t - 1, i) != 0;
            const bool now = history.state(t, i) != 0;
            if (was) {
                ++(now ? counts.n11[i] : counts.n10[i]);
            } else {
                int k = 0;
                for (int j : graph.neighbors(i)) k += history.state(t - 1, j);
                ++counts.by_neighbors[i][k][now ? 0 : 1];
            }
        }
    }
    return counts;
}

bool TransitionCounts::has_active_transitions() const {
    for (std::size_t i = 0; i < n11.size(); ++i)
        if (n11[i] + n10[i] > 0) return true;
    return false;
}

bool TransitionCounts::has_inactive_transitions() const {
    for (const auto& rows : by_neighbors)
        for (const auto& cell : rows)
            if (cell[0] + cell[1] > 0) return true;
    return false;
}

namespace {

// Log-likelihood from sufficient statistics, parameterized by the log of each
// risk's survival factor l1 = ln(1 - p_i). The uniform variant reuses this
// with l1 = -1 for every risk, which turns (a, b, g) into the three shared
// intensities directly.
struct CountsEvaluator {
    const TransitionCounts& counts;
    std::vector<double> l1m;

    double eval(double a, double b, double g) const {
        double ll = 0.0;
        const std::size_t n = l1m.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double l1 = l1m[i];
            if (counts.n11[i]) ll += static_cast<double>(counts.n11[i]) * log1mexp(-g * l1);
            if (counts.n10[i]) ll += static_cast<double>(counts.n10[i]) * (g * l1);
            const double lam_int = a * -l1;
            const double lam_in = b == 0.0 ? 0.0 : b * -l1;
            const auto& rows = counts.by_neighbors[i];
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const std::uint64_t c01 = rows[k][0], c00 = rows[k][1];
                if (c01 == 0 && c00 == 0) continue;
                double lam = lam_int;
                if (k > 0 && lam_in > 0.0) lam += static_cast<double>(k) * lam_in;
                if (c00) ll += static_cast<double>(c00) * -lam;
                if (c01) ll += static_cast<double>(c01) * log1mexp(lam);
            }
        }
        return ll;
    }
};

std::vector<double> survival_logs(const RiskCatalog& catalog) {
    std::vector<double> l1m;
    l1m.reserve(static_cast<std::size_t>(catalog.size()));
    for (const RiskRecord& r : catalog.entries())
        l1m.push_back(std::log1p(-normalize_likelihood(r.likelihood)));
    return l1m;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    if (n == 1 || lo == hi) {
        v.push_back(lo);
        return v;
    }
    const double ratio = hi / lo;
    for (int k = 0; k < n; ++k)
        v.push_back(lo * std::pow(ratio, static_cast<double>(k) / (n - 1)));
    v.back() = hi;
    return v;
}

struct Axis {
    bool pinned = false;
    double pin = 0.0;
    bool include_zero = false;
    double orig_lo = 0.0, orig_hi = 0.0;
    double lo = 0.0, hi = 0.0;

    std::vector<double> candidates(int m) const {
        if (pinned) return {pin};
        std::vector<double> v;
        if (include_zero) v.push_back(0.0);
        const int pts = std::max(2, m - static_cast<int>(v.size()));
        std::vector<double> pos = logspace(lo, hi, lo == hi ? 1 : pts);
        v.insert(v.end(), pos.begin(), pos.end());
        return v;
    }

    bool converged(double best, double rel_precision) const {
        if (pinned) return true;
        if (best == 0.0) return hi <= lo * (1.0 + rel_precision);
        return hi - lo <= rel_precision * best;
    }

    void refine(double best, double shrink) {
        if (pinned || lo == hi) return;
        const double width = std::log(hi / lo);
        if (best == 0.0) {
            // zero is winning: shrink the positive range toward its low end,
            // keeping the zero candidate in play
            hi = std::exp(std::log(lo) + width / shrink);
            return;
        }
        const double half = width / (2.0 * shrink);
        const double c = std::log(best);
        double nlo = std::exp(c - half), nhi = std::exp(c + half);
        if (nlo < orig_lo) {
            nlo = orig_lo;
            nhi = std::min(orig_hi, std::exp(std::log(orig_lo) + width / shrink));
        }
        if (nhi > orig_hi) {
            nhi = orig_hi;
            nlo = std::max(orig_lo, std::exp(std::log(orig_hi) - width / shrink));
        }
        lo = std::min(nlo, best);
        hi = std::max(nhi, best);
    }

    bool at_boundary(double best) const {
        if (pinned || best == 0.0) return false;
        const double eps = 1e-9;
        return best <= orig_lo * (1.0 + eps) || best >= orig_hi * (1.0 - eps);
    }
};

void validate_search(const SearchConfig& s) {
    if (s.coarse_points < 3) throw ValidationError("search: need at least 3 points per axis");
    if (!(s.shrink > 1.0)) throw ValidationError("search: shrink must be > 1");
    if (!(s.rel_precision > 0.0)) throw ValidationError("search: rel_precision must be > 0");
    if (s.max_passes < 1) throw ValidationError("search: max_passes must be >= 1");
    auto box = [](double lo, double hi, const char* name) {
        if (!(lo > 0.0) || !(hi > lo))
            throw ValidationError(std::string("search: invalid ") + name + " box");
    };
    box(s.alpha_lo, s.alpha_hi, "alpha");
    box(s.beta_lo, s.beta_hi, "beta");
    box(s.gamma_lo, s.gamma_hi, "gamma");
}

} // namespace

// ---------------------------------------------------------------------------
// Grid-scan fit
// ---------------------------------------------------------------------------

FitResult fit(const RiskCatalog& catalog, const InfluenceGraph& graph,
              const HistoricalSeries& history, ModelVariant variant,
              const SearchConfig& search) {
    validate_search(search);
    if (graph.size() != catalog.size())
        throw ValidationError("fit: catalog and graph disagree on N");
    const bool uniform = variant == ModelVariant::uniform;
    const InfluenceGraph complete =
        uniform ? InfluenceGraph::complete(catalog.size()) : InfluenceGraph();
    const InfluenceGraph& g = uniform ? complete : graph;
    const TransitionCounts counts = TransitionCounts::build(history, g);
    CountsEvaluator evaluator{counts, uniform ? std::vector<double>(
                                                    static_cast<std::size_t>(catalog.size()), -1.0)
                                              : survival_logs(catalog)};

    Axis ax_a, ax_b, ax_g;
    ax_a.orig_lo = ax_a.lo = search.alpha_lo;
    ax_a.orig_hi = ax_a.hi = search.alpha_hi;
    ax_b.orig_lo = ax_b.lo = search.beta_lo;
    ax_b.orig_hi = ax_b.hi = search.beta_hi;
    ax_b.include_zero = true;
    ax_g.orig_lo = ax_g.lo = search.gamma_lo;
    ax_g.orig_hi = ax_g.hi = search.gamma_hi;
    if (variant == ModelVariant::expert_based) {
        ax_a.pinned = true;
        ax_a.pin = 1.0 / kMonthsPerDecade;
    }
    if (variant == ModelVariant::disconnected || variant == ModelVariant::expert_based) {
        ax_b.pinned = true;
        ax_b.pin = 0.0;
    }

    const int workers = resolve_workers(search.workers);
    FitResult result;
    result.variant = variant;
    double best_ll = -kInf;
    double best_a = 0.0, best_b = 0.0, best_g = 0.0;
    bool have_best = false;

    for (int pass = 1; pass <= search.max_passes; ++pass) {
        const std::vector<double> ca = ax_a.candidates(search.coarse_points);
        const std::vector<double> cb = ax_b.candidates(search.coarse_points);
        const std::vector<double> cg = ax_g.candidates(search.coarse_points);
        const std::size_t nb = cb.size(), ng = cg.size();
        const std::size_t cells = ca.size() * nb * ng;
        std::vector<double> lls(cells);
        parallel_for(cells, workers, [&](std::size_t c) {
            const std::size_t ia = c / (nb * ng);
            const std::size_t ib = (c / ng) % nb;
            const std::size_t ig = c % ng;
            lls[c] = evaluator.eval(ca[ia], cb[ib], cg[ig]);
        });
        result.cells_evaluated += static_cast<long>(cells);
        result.passes = pass;

        std::size_t arg = 0;
        for (std::size_t c = 1; c < cells; ++c)
            if (lls[c] > lls[arg]) arg = c;
        const double pass_a = ca[arg / (nb * ng)];
        const double pass_b = cb[(arg / ng) % nb];
        const double pass_g = cg[arg % ng];
        if (!have_best || lls[arg] > best_ll) {
            best_ll = lls[arg];
            best_a = pass_a;
            best_b = pass_b;
            best_g = pass_g;
            have_best = true;
        }
        if (search.keep_trace) {
            for (std::size_t c = 0; c < cells; ++c) {
                const ModelParams p{ca[c / (nb * ng)], cb[(c / ng) % nb], cg[c % ng],
                                    TimeUnit::month};
                result.trace.emplace_back(p, lls[c]);
            }
        }

        if (ax_a.converged(best_a, search.rel_precision) &&
            ax_b.converged(best_b, search.rel_precision) &&
            ax_g.converged(best_g, search.rel_precision))
            break;
        if (pass == search.max_passes)
            throw NumericalError("fit: grid refinement did not converge in " +
                                 std::to_string(search.max_passes) + " passes");

        ax_a.refine(best_a, search.shrink);
        ax_b.refine(best_b, search.shrink);
        ax_g.refine(best_g, search.shrink);
    }

    result.params_monthly = ModelParams{best_a, best_b, best_g, TimeUnit::month};
    result.params_decade = to_decade(result.params_monthly);
    result.log_likelihood = best_ll;
    result.boundary_hit =
        ax_a.at_boundary(best_a) || ax_b.at_boundary(best_b) || ax_g.at_boundary(best_g);
    result.degenerate_fit = !counts.has_active_transitions() ||
                            !counts.has_inactive_transitions() || !std::isfinite(best_ll);
    return result;
}

// ---------------------------------------------------------------------------
// Likelihood surface
// ---------------------------------------------------------------------------

namespace {

std::vector<double> grid_values(const GridAxis& axis, const std::string& name) {
    if (axis.points < 1)
        throw ValidationError("surface: axis " + name + " needs at least 1 point");
    if (!(axis.lo >= 0.0) || axis.hi < axis.lo)
        throw ValidationError("surface: axis " + name + " box invalid");
    if (axis.points == 1) return {axis.lo};
    if (axis.log_spaced) {
        if (!(axis.lo > 0.0))
            throw ValidationError("surface: log-spaced axis " + name + " needs lo > 0");
        return logspace(axis.lo, axis.hi, axis.points);
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(axis.points));
    for (int k = 0; k < axis.points; ++k)
        v.push_back(axis.lo + (axis.hi - axis.lo) * static_cast<double>(k) / (axis.points - 1));
    return v;
}

int axis_index(const std::string& name) {
    if (name == "alpha") return 0;
    if (name == "beta") return 1;
    if (name == "gamma") return 2;
    throw ValidationError("surface: unknown axis '" + name + "' (alpha, beta, or gamma)");
}

} // namespace

std::vector<SurfacePoint> likelihood_surface(const RiskCatalog& catalog,
                                             const InfluenceGraph& graph,
                                             const HistoricalSeries& history, ModelVariant variant,
                                             const ModelParams& pinned_monthly,
                                             const std::string& axis_x, const GridAxis& grid_x,
                                             const std::string& axis_y, const GridAxis& grid_y,
                                             int workers) {
    const int ix = axis_index(axis_x), iy = axis_index(axis_y);
    if (ix == iy) throw ValidationError("surface: the two axes must differ");
    const bool uniform = variant == ModelVariant::uniform;
    const InfluenceGraph complete =
        uniform ? InfluenceGraph::complete(catalog.size()) : InfluenceGraph();
    const TransitionCounts counts = TransitionCounts::build(history, uniform ? complete : graph);
    CountsEvaluator evaluator{counts, uniform ? std::vector<double>(
                                                    static_cast<std::size_t>(catalog.size()), -1.0)
                                              : survival_logs(catalog)};

    const ModelParams base = to_monthly(pinned_monthly);
    const std::vector<double> xs = grid_values(grid_x, axis_x);
    const std::vector<double> ys = grid_values(grid_y, axis_y);
    std::vector<SurfacePoint> table(xs.size() * ys.size());
    parallel_for(table.size(), resolve_workers(workers), [&](std::size_t c) {
        const double x = xs[c / ys.size()];
        const double y = ys[c % ys.size()];
        double v[3] = {base.alpha, base.beta, base.gamma};
        v[ix] = x;
        v[iy] = y;
        table[c] = {x, y, evaluator.eval(v[0], v[1], v[2])};
    });
    return table;
}

// ---------------------------------------------------------------------------
// Likelihood-ratio test
// ---------------------------------------------------------------------------

LRTestResult lr_test(const FitResult& full, const FitResult& restricted) {
    const bool nested =
        (full.variant == ModelVariant::network &&
         (restricted.variant == ModelVariant::disconnected ||
          restricted.variant == ModelVariant::expert_based)) ||
        (full.variant == ModelVariant::disconnected &&
         restricted.variant == ModelVariant::expert_based);
    if (!nested)
        throw ValidationError("lr_test: non_nested pair (" + variant_name(full.variant) + ", " +
                              variant_name(restricted.variant) + ")");
    LRTestResult r;
    r.statistic = 2.0 * (full.log_likelihood - restricted.log_likelihood);
    r.degrees_of_freedom =
        free_parameter_count(full.variant) - free_parameter_count(restricted.variant);
    r.p_value = chi2_sf(r.statistic, r.degrees_of_freedom);
    return r;
}

// ---------------------------------------------------------------------------
// Perturbation study
// ---------------------------------------------------------------------------

namespace {

double rel_dev(double x, double x0) {
    if (x0 == 0.0) return kNaN;
    return std::fabs(x - x0) / std::fabs(x0);
}

// max with sticky NaN, so an undefined deviation is never hidden by a 0
void acc_max(double& acc, double v) {
    if (std::isnan(acc) || std::isnan(v))
        acc = kNaN;
    else
        acc = std::max(acc, v);
}

} // namespace

PerturbationReport perturbation_study(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                      const HistoricalSeries& history, int k_sets,
                                      std::uint64_t seed, const PerturbationOptions& options) {
    if (k_sets < 1) throw ValidationError("perturbation_study: K must be >= 1");

    auto mean_activity = [&](const RiskCatalog& cat, const ModelParams& params, int set_index) {
        SimConfig sim = options.sim;
        // per-set simulation stream, disjoint from the perturbation draws
        sim.master_seed = mix64(mix64(seed) + static_cast<std::uint64_t>(set_index));
        return run_persistence(derive_rates(cat, graph, params), sim).mean_active;
    };

    PerturbationReport report;
    report.k_sets = k_sets;
    report.baseline = fit(catalog, graph, history, ModelVariant::network, options.search);
    report.baseline_mean_active =
        mean_activity(catalog, report.baseline.params_monthly, 0);

    for (int k = 1; k <= k_sets; ++k) {
        SplitMix64 draws = substream(seed, static_cast<std::uint64_t>(k));
        std::vector<RiskRecord> perturbed = catalog.entries();
        for (RiskRecord& r : perturbed) {
            const double u = draws.uniform();
            r.likelihood = std::clamp(r.likelihood + r.stddev * (2.0 * u - 1.0), 1.0, 5.0);
        }
        const RiskCatalog cat(std::move(perturbed));
        const FitResult f = fit(cat, graph, history, ModelVariant::network, options.search);
        PerturbationSet set;
        set.params_monthly = f.params_monthly;
        set.log_likelihood = f.log_likelihood;
        set.mean_active = mean_activity(cat, f.params_monthly, k);
        report.sets.push_back(set);

        const ModelParams& base = report.baseline.params_monthly;
        acc_max(report.max_rel_dev_alpha, rel_dev(set.params_monthly.alpha, base.alpha));
        acc_max(report.max_rel_dev_beta, rel_dev(set.params_monthly.beta, base.beta));
        acc_max(report.max_rel_dev_gamma, rel_dev(set.params_monthly.gamma, base.gamma));
        acc_max(report.max_rel_dev_log_likelihood,
                rel_dev(set.log_likelihood, report.baseline.log_likelihood));
        acc_max(report.max_rel_dev_mean_active,
                rel_dev(set.mean_active, report.baseline_mean_active));
    }
    return report;
}

} // namespace riskdyn

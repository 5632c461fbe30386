#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riskdyn/model.hpp"
#include "riskdyn/simulate.hpp"

namespace riskdyn {

// ---------------------------------------------------------------------------
// Model variants
// ---------------------------------------------------------------------------

/// network:      alpha, beta, gamma free (3 parameters)
/// disconnected: beta = 0 (2)
/// expert_based: alpha = 1 decade = 1/120 month, beta = 0 (1)
/// uniform:      ignores expert scores; three intensities shared by all risks
///               (internal, continuation, per-pair influence on a complete
///               graph), all three scanned directly (3)
enum class ModelVariant { network, disconnected, expert_based, uniform };

ModelVariant parse_variant(const std::string& text);
std::string variant_name(ModelVariant v);
int free_parameter_count(ModelVariant v);

// ---------------------------------------------------------------------------
// Log-likelihood
// ---------------------------------------------------------------------------

struct ImpossibleTransition {
    int t = 0;      ///< 1-based month row of the destination state
    int risk = 0;   ///< 1-based risk id
};

struct LogLikelihoodResult {
    double value = 0.0;
    /// earliest zero-probability transition when value is -infinity
    std::optional<ImpossibleTransition> impossible;
};

/// Sum of log transition probabilities over rows 2..T, conditioning on the
/// first row. A transition the model gives probability zero yields value
/// -infinity with its location flagged; nothing throws.
LogLikelihoodResult log_likelihood(const DerivedRates& rates, const HistoricalSeries& history);

/// Sufficient statistics of a history for model-derived rates: per-risk
/// counts of active-state transitions plus, for inactive-state transitions,
/// counts split by the number k of active neighbors at the previous month.
struct TransitionCounts {
    std::vector<std::uint64_t> n11, n10;
    /// [risk][k] = {count 0->1, count 0->0}, k = 0..degree(risk)
    std::vector<std::vector<std::array<std::uint64_t, 2>>> by_neighbors;

    static TransitionCounts build(const HistoricalSeries& history, const InfluenceGraph& graph);
    bool has_active_transitions() const;
    bool has_inactive_transitions() const;
};

// ---------------------------------------------------------------------------
// Grid-scan fit
// ---------------------------------------------------------------------------

struct SearchConfig {
    int coarse_points = 25;        ///< grid points per free axis and pass
    double shrink = 4.0;           ///< log-box shrink factor per refinement
    double rel_precision = 1e-3;   ///< stop when every axis box is this tight
    int max_passes = 60;
    bool keep_trace = false;       ///< record every evaluated cell
    int workers = 0;
    // feasible boxes, monthly scale; beta additionally includes the exact 0
    double alpha_lo = 1e-5, alpha_hi = 1.0;
    double beta_lo = 1e-6, beta_hi = 1.0;
    double gamma_lo = 1e-3, gamma_hi = 100.0;
};

struct FitResult {
    ModelVariant variant = ModelVariant::network;
    ModelParams params_monthly;   ///< for uniform: the three shared intensities
    ModelParams params_decade;
    double log_likelihood = 0.0;
    bool boundary_hit = false;    ///< optimum at a feasible-box edge (beta=0 is
                                  ///< a designated candidate, not an edge)
    bool degenerate_fit = false;  ///< history cannot identify the parameters
    int passes = 0;
    long cells_evaluated = 0;
    std::vector<std::pair<ModelParams, double>> trace;
};

/// Coarse log-spaced scan over the variant's free parameters followed by
/// iterated refinement: the box shrinks by `shrink` around the incumbent best
/// (which is never discarded, so the best log-likelihood is non-decreasing)
/// until every axis reaches rel_precision.
FitResult fit(const RiskCatalog& catalog, const InfluenceGraph& graph,
              const HistoricalSeries& history, ModelVariant variant,
              const SearchConfig& search = {});

// ---------------------------------------------------------------------------
// Likelihood surface
// ---------------------------------------------------------------------------

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int points = 1;
    bool log_spaced = true;
};

struct SurfacePoint {
    double x = 0.0;
    double y = 0.0;
    double log_likelihood = 0.0;
};

/// Dense 2-D log-likelihood table. `axis_x`/`axis_y` name two distinct
/// parameters out of alpha/beta/gamma; the remaining one is pinned at its
/// value in `pinned_monthly`. Rows are emitted x-major, then y.
std::vector<SurfacePoint> likelihood_surface(const RiskCatalog& catalog,
                                             const InfluenceGraph& graph,
                                             const HistoricalSeries& history, ModelVariant variant,
                                             const ModelParams& pinned_monthly,
                                             const std::string& axis_x, const GridAxis& grid_x,
                                             const std::string& axis_y, const GridAxis& grid_y,
                                             int workers = 0);

// ---------------------------------------------------------------------------
// Likelihood-ratio test
// ---------------------------------------------------------------------------

struct LRTestResult {
    double statistic = 0.0;        ///< D = 2 (LL_full - LL_restricted)
    int degrees_of_freedom = 0;
    double p_value = 1.0;          ///< chi-square upper tail
};

/// Nested pairs only: disconnected within network, expert_based within
/// disconnected or network. Anything else (uniform in particular) refuses
/// with a non_nested validation error.
LRTestResult lr_test(const FitResult& full, const FitResult& restricted);

// ---------------------------------------------------------------------------
// Perturbation study
// ---------------------------------------------------------------------------

struct PerturbationOptions {
    SearchConfig search;
    SimConfig sim;   ///< replica budget for the mean-activity estimate;
                     ///< master_seed is overridden per set
};

struct PerturbationSet {
    ModelParams params_monthly;
    double log_likelihood = 0.0;
    double mean_active = 0.0;
};

struct PerturbationReport {
    int k_sets = 0;
    FitResult baseline;
    double baseline_mean_active = 0.0;
    std::vector<PerturbationSet> sets;
    // max over sets of |x_k - x_0| / |x_0|; NaN when the baseline value is 0
    double max_rel_dev_alpha = 0.0;
    double max_rel_dev_beta = 0.0;
    double max_rel_dev_gamma = 0.0;
    double max_rel_dev_log_likelihood = 0.0;
    double max_rel_dev_mean_active = 0.0;
};

/// Draws K catalogs with every score L_i replaced by a uniform draw from
/// [L_i - stddev_i, L_i + stddev_i] clamped to [1,5], refits the network
/// variant on each, and measures each refitted model's mean activity with the
/// Monte-Carlo engine. Fully reproducible from `seed`.
PerturbationReport perturbation_study(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                      const HistoricalSeries& history, int k_sets,
                                      std::uint64_t seed, const PerturbationOptions& options);

} // namespace riskdyn

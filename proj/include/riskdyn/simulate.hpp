#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "riskdyn/model.hpp"
#include "riskdyn/rng.hpp"

namespace riskdyn {

/// One synchronous update of the whole state vector: every risk's next state
/// is drawn from the transition law given the PREVIOUS state, consuming
/// exactly N uniforms in ascending risk order (risk i uses draw i).
/// Trajectories are therefore bit-reproducible given the generator.
StateVector step(const StateVector& prev, const DerivedRates& rates, SplitMix64& rng);

struct SimConfig {
    long steps = 1200;        ///< transitions per replica; states 1..steps recorded
    long burn_in = 200;       ///< states with index <= burn_in are discarded
    long replicas = 10000;
    std::uint64_t master_seed = 0;   ///< replica r uses substream(master_seed, r)
    std::optional<StateVector> initial_state;   ///< default: all inactive
    std::vector<int> percentiles = {5, 25, 50, 75, 95};
    int workers = 0;          ///< <=0: RISKDYN_WORKERS env, then hardware
};

void validate_sim_config(const SimConfig& config, int n);

struct PersistenceReport {
    std::vector<double> fraction;        ///< per-risk active fraction, pooled
    double mean_active = 0.0;            ///< mean number of active risks
    double std_active = 0.0;             ///< population std of that count
    std::vector<std::pair<int, long>> percentiles;   ///< (pct, nearest-rank count)
    std::vector<std::uint64_t> activity_histogram;   ///< counts of 0..N active
    long samples = 0;                    ///< replicas * (steps - burn_in)
    long replicas = 0;
};

PersistenceReport run_persistence(const DerivedRates& rates, const SimConfig& config);
PersistenceReport run_persistence(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                  const ModelParams& params, const SimConfig& config);

struct SurvivalCurve {
    std::vector<double> survival;   ///< index = months elapsed; starts at 1
    long replicas = 0;
};

struct DecayFit {
    double rate = 0.0;        ///< decay rate per month (= -slope of ln survival)
    double r_squared = 0.0;   ///< NaN when degenerate
    bool degenerate = false;  ///< constant survival in the window
};

/// OLS on (t, ln survival(t)) over t in [window_lo, window_hi]; points with
/// survival 0 are excluded, fewer than 3 usable points is a validation error.
DecayFit fit_exponential_decay(const SurvivalCurve& curve, long window_lo, long window_hi);

struct CascadeReport {
    SurvivalCurve curve;
    std::vector<double> lifetime_fraction;   ///< per-risk mean fraction of
                                             ///< replica lifetime spent active
    DecayFit fit;                            ///< over the full positive curve
    long extinct = 0;
    long censored = 0;                       ///< still alive at max_steps
    double mean_lifetime = 0.0;              ///< months alive, censored included
};

/// Cascade experiment: internal activation is switched off for every risk,
/// each replica starts with only the initiator active and runs to extinction
/// or max_steps. `initiator` is a 1-based risk id.
CascadeReport run_cascade(const DerivedRates& rates, int initiator, long max_steps, long replicas,
                          std::uint64_t seed, int workers = 0);
CascadeReport run_cascade(const RiskCatalog& catalog, const InfluenceGraph& graph,
                          const ModelParams& params, int initiator, long max_steps, long replicas,
                          std::uint64_t seed, int workers = 0);

struct TargetHitReport {
    int initiator = 0;
    int target = 0;
    long replicas = 0;
    long hits = 0;
    long misses = 0;      ///< extinction before the target ever activated
    long censored = 0;    ///< neither outcome within max_steps
    double probability = 0.0;   ///< hits / replicas
    double std_error = 0.0;     ///< binomial, sqrt(p(1-p)/replicas)
};

/// Like run_cascade (internal activation off, initiator-only start) but each
/// replica stops as soon as the target activates (hit) or the cascade dies
/// out (miss).
TargetHitReport run_target_hit(const DerivedRates& rates, int initiator, int target, long replicas,
                               std::uint64_t seed, long max_steps = 1000000, int workers = 0);
TargetHitReport run_target_hit(const RiskCatalog& catalog, const InfluenceGraph& graph,
                               const ModelParams& params, int initiator, int target, long replicas,
                               std::uint64_t seed, long max_steps = 1000000, int workers = 0);

} // namespace riskdyn

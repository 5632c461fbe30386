#include "riskdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskdyn/errors.hpp"
#include "riskdyn/parallel.hpp"
#include "riskdyn/stats.hpp"

namespace riskdyn {

namespace {

// Precomputed activation probabilities by active-neighbor count. Only valid
// when every incoming intensity of a target is the same value, which holds
// for all model-derived rates.
struct ActTable {
    std::vector<std::vector<double>> by_count;
    bool enabled = false;

    explicit ActTable(const DerivedRates& rates) {
        enabled = rates.uniform_in_target();
        if (!enabled) return;
        by_count.resize(static_cast<std::size_t>(rates.size()));
        for (int i = 0; i < rates.size(); ++i) {
            auto& row = by_count[i];
            row.resize(static_cast<std::size_t>(rates.degree(i)) + 1);
            for (int k = 0; k <= rates.degree(i); ++k) {
                const double ext =
                    k == 0 ? 0.0 : static_cast<double>(k) * rates.lambda_ext_in(i);
                row[k] = rates.activation_probability(i, ext);
            }
        }
    }
};

// One synchronous transition with incremental active-neighbor bookkeeping.
// Consumes exactly N uniforms in ascending risk order, the same draws and the
// same probability expressions as the public step().
struct Walker {
    const DerivedRates& rates;
    const ActTable& table;
    StateVector cur;
    StateVector next;
    std::vector<int> active_nbrs;
    long active_total = 0;

    Walker(const DerivedRates& r, const ActTable& t, const StateVector& init)
        : rates(r), table(t), cur(init), next(init.size(), 0),
          active_nbrs(init.size(), 0) {
        for (int i = 0; i < rates.size(); ++i) {
            active_total += cur[i];
            if (cur[i])
                for (int j : rates.neighbors(i)) ++active_nbrs[j];
        }
    }

    void advance(SplitMix64& rng) {
        const int n = rates.size();
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            double p;
            if (cur[i]) {
                p = rates.p_con()[i];
            } else if (table.enabled) {
                p = table.by_count[i][active_nbrs[i]];
            } else {
                p = rates.activation_probability(i, rates.incoming_intensity(cur, i));
            }
            next[i] = u < p ? 1 : 0;
        }
        for (int i = 0; i < n; ++i) {
            if (next[i] == cur[i]) continue;
            const int delta = next[i] ? 1 : -1;
            active_total += delta;
            for (int j : rates.neighbors(i)) active_nbrs[j] += delta;
        }
        cur.swap(next);
    }
};

// Runs `replicas` independent replicas and merges their results in ascending
// replica order, independent of the worker count: replicas are processed in
// fixed chunks, each chunk computed in parallel into indexed slots and then
// folded sequentially.
template <typename Result, typename Body, typename Fold>
void run_replicas(long replicas, int workers, Body body, Fold fold) {
    const int w = resolve_workers(workers);
    const long chunk = std::min<long>(replicas, 4096);
    std::vector<Result> slots(static_cast<std::size_t>(chunk));
    for (long start = 0; start < replicas; start += chunk) {
        const long len = std::min(chunk, replicas - start);
        parallel_for(static_cast<std::size_t>(len), w,
                     [&](std::size_t k) { slots[k] = body(start + static_cast<long>(k)); });
        for (long k = 0; k < len; ++k) fold(start + k, slots[static_cast<std::size_t>(k)]);
    }
}

DerivedRates without_internal(const DerivedRates& rates) {
    return DerivedRates(std::vector<double>(static_cast<std::size_t>(rates.size()), 0.0),
                        rates.lambda_rec(), rates.lambda_ext());
}

void check_risk_id(const DerivedRates& rates, int id, const char* what) {
    if (id < 1 || id > rates.size())
        throw ValidationError(std::string(what) + " id " + std::to_string(id) + " out of range");
}

} // namespace

StateVector step(const StateVector& prev, const DerivedRates& rates, SplitMix64& rng) {
    validate_state(prev, rates.size());
    StateVector next(prev.size());
    for (int i = 0; i < rates.size(); ++i) {
        const double u = rng.uniform();
        const double p = prev[i]
                             ? rates.p_con()[i]
                             : rates.activation_probability(i, rates.incoming_intensity(prev, i));
        next[i] = u < p ? 1 : 0;
    }
    return next;
}

void validate_sim_config(const SimConfig& config, int n) {
    if (config.steps < 1) throw ValidationError("sim config: steps must be >= 1");
    if (config.burn_in < 0) throw ValidationError("sim config: burn_in must be >= 0");
    if (config.burn_in >= config.steps)
        throw ValidationError("sim config: burn_in must be smaller than steps");
    if (config.replicas < 1) throw ValidationError("sim config: replicas must be >= 1");
    if (config.initial_state) validate_state(*config.initial_state, n);
    for (int p : config.percentiles)
        if (p < 0 || p > 100)
            throw ValidationError("sim config: percentiles must lie in [0,100]");
}

namespace {

struct PersistenceSlot {
    std::vector<std::uint64_t> risk_active;
    std::vector<std::uint64_t> activity_hist;
};

} // namespace

PersistenceReport run_persistence(const DerivedRates& rates, const SimConfig& config) {
    const int n = rates.size();
    validate_sim_config(config, n);
    const StateVector init =
        config.initial_state ? *config.initial_state : StateVector(static_cast<std::size_t>(n), 0);
    const ActTable table(rates);

    std::vector<std::uint64_t> risk_active(static_cast<std::size_t>(n), 0);
    std::vector<std::uint64_t> activity_hist(static_cast<std::size_t>(n) + 1, 0);

    run_replicas<PersistenceSlot>(
        config.replicas, config.workers,
        [&](long r) {
            PersistenceSlot slot;
            slot.risk_active.assign(static_cast<std::size_t>(n), 0);
            slot.activity_hist.assign(static_cast<std::size_t>(n) + 1, 0);
            SplitMix64 rng = substream(config.master_seed, static_cast<std::uint64_t>(r));
            Walker walker(rates, table, init);
            for (long t = 1; t <= config.steps; ++t) {
                walker.advance(rng);
                if (t <= config.burn_in) continue;
                for (int i = 0; i < n; ++i) slot.risk_active[i] += walker.cur[i];
                ++slot.activity_hist[static_cast<std::size_t>(walker.active_total)];
            }
            return slot;
        },
        [&](long, const PersistenceSlot& slot) {
            for (int i = 0; i < n; ++i) risk_active[i] += slot.risk_active[i];
            for (int k = 0; k <= n; ++k) activity_hist[k] += slot.activity_hist[k];
        });

    PersistenceReport report;
    report.replicas = config.replicas;
    report.samples = config.replicas * (config.steps - config.burn_in);
    const double m = static_cast<double>(report.samples);
    report.fraction.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) report.fraction[i] = static_cast<double>(risk_active[i]) / m;
    report.activity_histogram = activity_hist;

    std::uint64_t total_active = 0;
    for (int k = 0; k <= n; ++k) total_active += activity_hist[k] * static_cast<std::uint64_t>(k);
    report.mean_active = static_cast<double>(total_active) / m;
    double var = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double d = k - report.mean_active;
        var += static_cast<double>(activity_hist[k]) * d * d;
    }
    report.std_active = std::sqrt(var / m);

    for (int pct : config.percentiles) {
        // nearest-rank percentile on the pooled activity counts
        const std::uint64_t rank = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(
                   std::ceil(pct / 100.0 * static_cast<double>(report.samples))));
        std::uint64_t cum = 0;
        long value = n;
        for (int k = 0; k <= n; ++k) {
            cum += activity_hist[k];
            if (cum >= rank) {
                value = k;
                break;
            }
        }
        report.percentiles.emplace_back(pct, value);
    }
    return report;
}

PersistenceReport run_persistence(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                  const ModelParams& params, const SimConfig& config) {
    return run_persistence(derive_rates(catalog, graph, params), config);
}

DecayFit fit_exponential_decay(const SurvivalCurve& curve, long window_lo, long window_hi) {
    if (window_lo < 0 || window_hi < window_lo)
        throw ValidationError("decay fit: window must satisfy 0 <= lo <= hi");
    std::vector<double> ts, ys;
    const long hi = std::min<long>(window_hi, static_cast<long>(curve.survival.size()) - 1);
    for (long t = window_lo; t <= hi; ++t) {
        const double s = curve.survival[static_cast<std::size_t>(t)];
        if (s > 0.0) {
            ts.push_back(static_cast<double>(t));
            ys.push_back(std::log(s));
        }
    }
    if (ts.size() < 3)
        throw ValidationError("decay fit: insufficient_data (need >= 3 positive survival points "
                              "in the window, found " +
                              std::to_string(ts.size()) + ")");
    const bool constant = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys[0]; });
    if (constant)
        return {0.0, std::numeric_limits<double>::quiet_NaN(), true};
    LinearFit lf = ols(ts, ys);
    return {-lf.slope, lf.r_squared, false};
}

namespace {

struct CascadeSlot {
    std::vector<std::uint64_t> active_steps;
    long lifetime = 0;
    bool censored = false;
};

CascadeSlot cascade_replica(const DerivedRates& rates, const ActTable& table,
                            const StateVector& init, long max_steps, SplitMix64 rng) {
    const int n = rates.size();
    CascadeSlot slot;
    slot.active_steps.assign(static_cast<std::size_t>(n), 0);
    Walker walker(rates, table, init);
    while (true) {
        for (int i = 0; i < n; ++i) slot.active_steps[i] += walker.cur[i];
        ++slot.lifetime;
        if (slot.lifetime - 1 == max_steps) {
            slot.censored = true;
            break;
        }
        walker.advance(rng);
        if (walker.active_total == 0) break;
    }
    return slot;
}

} // namespace

CascadeReport run_cascade(const DerivedRates& rates, int initiator, long max_steps, long replicas,
                          std::uint64_t seed, int workers) {
    check_risk_id(rates, initiator, "initiator");
    if (max_steps < 1) throw ValidationError("run_cascade: max_steps must be >= 1");
    if (replicas < 1) throw ValidationError("run_cascade: replicas must be >= 1");
    const DerivedRates quiet = without_internal(rates);
    const ActTable table(quiet);
    const int n = quiet.size();
    StateVector init(static_cast<std::size_t>(n), 0);
    init[initiator - 1] = 1;

    std::vector<std::uint64_t> lifetime_hist(static_cast<std::size_t>(max_steps) + 2, 0);
    std::vector<double> fraction_sum(static_cast<std::size_t>(n), 0.0);
    std::uint64_t lifetime_total = 0;
    long censored = 0;

    run_replicas<CascadeSlot>(
        replicas, workers,
        [&](long r) {
            return cascade_replica(quiet, table, init, max_steps,
                                   substream(seed, static_cast<std::uint64_t>(r)));
        },
        [&](long, const CascadeSlot& slot) {
            ++lifetime_hist[static_cast<std::size_t>(slot.lifetime)];
            lifetime_total += static_cast<std::uint64_t>(slot.lifetime);
            if (slot.censored) ++censored;
            for (int i = 0; i < n; ++i)
                fraction_sum[i] +=
                    static_cast<double>(slot.active_steps[i]) / static_cast<double>(slot.lifetime);
        });

    CascadeReport report;
    report.censored = censored;
    report.extinct = replicas - censored;
    report.mean_lifetime = static_cast<double>(lifetime_total) / static_cast<double>(replicas);
    report.lifetime_fraction.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        report.lifetime_fraction[i] = fraction_sum[i] / static_cast<double>(replicas);

    report.curve.replicas = replicas;
    std::uint64_t alive = static_cast<std::uint64_t>(replicas);
    for (long t = 0; t <= max_steps; ++t) {
        // alive holds the number of replicas with lifetime > t; states beyond
        // max_steps were never simulated, so the curve ends there
        if (t > 0) alive -= lifetime_hist[static_cast<std::size_t>(t)];
        report.curve.survival.push_back(static_cast<double>(alive) /
                                        static_cast<double>(replicas));
        if (alive == 0) break;
    }

    const long last = static_cast<long>(report.curve.survival.size()) - 1;
    long positive = 0;
    for (double s : report.curve.survival) positive += s > 0.0;
    if (positive >= 3)
        report.fit = fit_exponential_decay(report.curve, 0, last);
    else
        report.fit = {0.0, std::numeric_limits<double>::quiet_NaN(), true};
    return report;
}

CascadeReport run_cascade(const RiskCatalog& catalog, const InfluenceGraph& graph,
                          const ModelParams& params, int initiator, long max_steps, long replicas,
                          std::uint64_t seed, int workers) {
    return run_cascade(derive_rates(catalog, graph, params), initiator, max_steps, replicas, seed,
                       workers);
}

namespace {

enum class HitOutcome : std::uint8_t { hit, miss, censored };

} // namespace

TargetHitReport run_target_hit(const DerivedRates& rates, int initiator, int target, long replicas,
                               std::uint64_t seed, long max_steps, int workers) {
    check_risk_id(rates, initiator, "initiator");
    check_risk_id(rates, target, "target");
    if (initiator == target)
        throw ValidationError("run_target_hit: initiator and target must differ");
    if (max_steps < 1) throw ValidationError("run_target_hit: max_steps must be >= 1");
    if (replicas < 1) throw ValidationError("run_target_hit: replicas must be >= 1");
    const DerivedRates quiet = without_internal(rates);
    const ActTable table(quiet);
    const int n = quiet.size();
    StateVector init(static_cast<std::size_t>(n), 0);
    init[initiator - 1] = 1;

    TargetHitReport report;
    report.initiator = initiator;
    report.target = target;
    report.replicas = replicas;

    run_replicas<HitOutcome>(
        replicas, workers,
        [&](long r) {
            SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(r));
            Walker walker(quiet, table, init);
            for (long t = 1; t <= max_steps; ++t) {
                walker.advance(rng);
                if (walker.cur[target - 1]) return HitOutcome::hit;
                if (walker.active_total == 0) return HitOutcome::miss;
            }
            return HitOutcome::censored;
        },
        [&](long, HitOutcome outcome) {
            switch (outcome) {
            case HitOutcome::hit: ++report.hits; break;
            case HitOutcome::miss: ++report.misses; break;
            case HitOutcome::censored: ++report.censored; break;
            }
        });

    report.probability = static_cast<double>(report.hits) / static_cast<double>(replicas);
    report.std_error = std::sqrt(report.probability * (1.0 - report.probability) /
                                 static_cast<double>(replicas));
    return report;
}

TargetHitReport run_target_hit(const RiskCatalog& catalog, const InfluenceGraph& graph,
                               const ModelParams& params, int initiator, int target, long replicas,
                               std::uint64_t seed, long max_steps, int workers) {
    return run_target_hit(derive_rates(catalog, graph, params), initiator, target, replicas, seed,
                          max_steps, workers);
}

} // namespace riskdyn

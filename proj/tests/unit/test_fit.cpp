#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskdyn/errors.hpp"
#include "riskdyn/fit.hpp"
#include "riskdyn/rng.hpp"
#include "riskdyn/simulate.hpp"
#include "riskdyn/stats.hpp"

using namespace riskdyn;

namespace {

RiskCatalog small_catalog(int n) {
    std::vector<RiskRecord> rs;
    const double scores[] = {2.5, 3.5, 4.0, 3.0, 4.5};
    for (int i = 1; i <= n; ++i)
        rs.push_back({i, "r" + std::to_string(i), RiskGroup::economic, scores[(i - 1) % 5], 0.05});
    return RiskCatalog(std::move(rs));
}

HistoricalSeries simulate_history(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                  const ModelParams& params, int months, std::uint64_t seed) {
    const DerivedRates rates = derive_rates(catalog, graph, params);
    SplitMix64 rng = substream(seed, 0);
    StateVector state(static_cast<std::size_t>(catalog.size()), 0);
    for (int t = 0; t < 120; ++t) state = step(state, rates, rng);
    std::vector<MonthLabel> labels;
    std::vector<std::uint8_t> cells;
    MonthLabel m{2000, 1};
    for (int t = 0; t < months; ++t) {
        state = step(state, rates, rng);
        labels.push_back(m);
        cells.insert(cells.end(), state.begin(), state.end());
        m = m.next();
    }
    return HistoricalSeries(std::move(labels), std::move(cells), catalog.size());
}

/// Transition log-probability computed the pedestrian way, straight from the
/// probability mappings with pow/log, no shared code with the library path.
double naive_log_likelihood(const RiskCatalog& catalog, const InfluenceGraph& graph,
                            const ModelParams& params, const HistoricalSeries& h) {
    const ModelParams mp = to_monthly(params);
    const int n = catalog.size();
    double ll = 0.0;
    for (int t = 1; t < h.months_count(); ++t) {
        for (int i = 0; i < n; ++i) {
            const double p = normalize_likelihood(catalog.record(i + 1).likelihood);
            double prob;
            if (h.state(t - 1, i)) {
                const double p_con = 1.0 - std::pow(1.0 - p, mp.gamma);
                prob = h.state(t, i) ? p_con : 1.0 - p_con;
            } else {
                double survive = std::pow(1.0 - p, mp.alpha);
                for (int j = 0; j < n; ++j)
                    if (j != i && h.state(t - 1, j) && graph.has_edge(j + 1, i + 1))
                        survive *= std::pow(1.0 - p, mp.beta);
                const double p_act = 1.0 - survive;
                prob = h.state(t, i) ? p_act : 1.0 - p_act;
            }
            ll += std::log(prob);
        }
    }
    return ll;
}

} // namespace

TEST_CASE("log-likelihood matches a pedestrian reimplementation") {
    const RiskCatalog catalog = small_catalog(4);
    const InfluenceGraph graph(4, {{1, 2, 1}, {2, 3, 1}, {1, 4, 1}});
    const ModelParams params{0.5, 0.3, 300.0, TimeUnit::decade};
    const HistoricalSeries h = simulate_history(catalog, graph, params, 200, 11);

    const LogLikelihoodResult r = log_likelihood(derive_rates(catalog, graph, params), h);
    CHECK_FALSE(r.impossible.has_value());
    CHECK(r.value == doctest::Approx(naive_log_likelihood(catalog, graph, params, h))
                         .epsilon(1e-10));
}

TEST_CASE("log-likelihood of a tiny example enumerated by hand") {
    // 2 risks, p = 0.5 both, one edge; history 00 -> 01 -> 11
    const RiskCatalog catalog({{1, "a", RiskGroup::economic, 3.0, 0.1},
                               {2, "b", RiskGroup::economic, 3.0, 0.1}});
    const InfluenceGraph graph(2, {{1, 2, 1}});
    const ModelParams mp{0.2, 0.1, 2.0, TimeUnit::month};
    const HistoricalSeries h({{2000, 1}, {2000, 2}, {2000, 3}},
                             {0, 0, 0, 1, 1, 1}, 2);

    const double q = 0.5;                                  // 1 - p
    const double p_int = 1.0 - std::pow(q, 0.2);
    const double p_con = 1.0 - std::pow(q, 2.0);
    const double p_act_nbr = 1.0 - std::pow(q, 0.2 + 0.1); // internal + one active neighbor
    // t=2: risk 1 stays inactive (no active neighbors), risk 2 activates
    // t=3: risk 1 activates with risk 2 active, risk 2 continues
    const double expected = std::log(1.0 - p_int) + std::log(p_int) +
                            std::log(p_act_nbr) + std::log(p_con);

    const LogLikelihoodResult r = log_likelihood(derive_rates(catalog, graph, mp), h);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("impossible transition yields -inf and its location") {
    // p = 0: can never activate
    const RiskCatalog catalog({{1, "a", RiskGroup::economic, 1.0, 0.0}});
    const InfluenceGraph graph(1, {});
    const HistoricalSeries h({{2000, 1}, {2000, 2}}, {0, 1}, 1);
    const LogLikelihoodResult r =
        log_likelihood(derive_rates(catalog, graph, {0.5, 0.1, 100.0, TimeUnit::decade}), h);
    CHECK(std::isinf(r.value));
    CHECK(r.value < 0.0);
    REQUIRE(r.impossible.has_value());
    CHECK(r.impossible->t == 2);
    CHECK(r.impossible->risk == 1);
}

TEST_CASE("transition counts summarize the history exactly") {
    const RiskCatalog catalog = small_catalog(3);
    const InfluenceGraph graph(3, {{1, 2, 1}, {2, 3, 1}});
    const HistoricalSeries h({{2000, 1}, {2000, 2}, {2000, 3}, {2000, 4}},
                             {0, 1, 0,
                              1, 1, 0,
                              1, 0, 1,
                              0, 0, 1},
                             3);
    const TransitionCounts c = TransitionCounts::build(h, graph);
    CHECK(c.n11[0] == 1);   // risk 1: 1->1 once (t3)
    CHECK(c.n10[0] == 1);   // and 1->0 once (t4)
    CHECK(c.n11[1] == 1);
    CHECK(c.n10[1] == 1);
    CHECK(c.n11[2] == 1);
    CHECK(c.n10[2] == 0);
    // risk 1 at t2: inactive with active neighbor 2 -> activated
    CHECK(c.by_neighbors[0][1][0] == 1);
    // risk 3 at t2: inactive, neighbor 2 active -> stayed off
    CHECK(c.by_neighbors[2][1][1] == 1);
    // risk 3 at t3: inactive, neighbor 2 active -> activated
    CHECK(c.by_neighbors[2][1][0] == 1);
    CHECK(c.has_active_transitions());
    CHECK(c.has_inactive_transitions());
}

TEST_CASE("surface cells equal the direct likelihood route") {
    const RiskCatalog catalog = small_catalog(4);
    const InfluenceGraph graph(4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}});
    const ModelParams gen{0.4, 0.2, 350.0, TimeUnit::decade};
    const HistoricalSeries h = simulate_history(catalog, graph, gen, 150, 3);

    GridAxis gx{1e-4, 1e-2, 3, true};
    GridAxis gy{1e-4, 1e-2, 4, true};
    const ModelParams pinned{0.004, 0.001, 3.5, TimeUnit::month};
    const auto table = likelihood_surface(catalog, graph, h, ModelVariant::network, pinned,
                                          "alpha", gx, "gamma", gy, 1);
    REQUIRE(table.size() == 12);
    // x-major: x varies slowest
    CHECK(table[0].x == table[3].x);
    CHECK(table[0].y == table[4].y);
    for (const SurfacePoint& pt : table) {
        const ModelParams mp{pt.x, pinned.beta, pt.y, TimeUnit::month};
        const LogLikelihoodResult direct = log_likelihood(derive_rates(catalog, graph, mp), h);
        CHECK(pt.log_likelihood == doctest::Approx(direct.value).epsilon(1e-9));
    }
    // endpoints land exactly on the requested box
    CHECK(table.front().x == 1e-4);
    CHECK(table.back().x == 1e-2);
    CHECK(table.back().y == 1e-2);

    CHECK_THROWS_AS(likelihood_surface(catalog, graph, h, ModelVariant::network, pinned, "alpha",
                                       gx, "alpha", gy, 1),
                    ValidationError);
}

TEST_CASE("fitted optimum dominates the generator and nearby points") {
    const RiskCatalog catalog = small_catalog(4);
    const InfluenceGraph graph = InfluenceGraph::complete(4);
    const ModelParams gen{0.4, 0.15, 400.0, TimeUnit::decade};
    const HistoricalSeries h = simulate_history(catalog, graph, gen, 400, 21);

    SearchConfig sc;
    sc.workers = 1;
    const FitResult r = fit(catalog, graph, h, ModelVariant::network, sc);
    CHECK(r.passes >= 1);
    CHECK(r.cells_evaluated > 0);
    CHECK_FALSE(r.degenerate_fit);
    CHECK(std::isfinite(r.log_likelihood));

    const double ll_truth =
        log_likelihood(derive_rates(catalog, graph, gen), h).value;
    CHECK(r.log_likelihood >= ll_truth - 1e-9);
    // decade view is the monthly view times 120
    CHECK(r.params_decade.alpha == doctest::Approx(r.params_monthly.alpha * 120.0).epsilon(1e-15));
    CHECK(r.params_decade.gamma == doctest::Approx(r.params_monthly.gamma * 120.0).epsilon(1e-15));
}

TEST_CASE("tighter precision never lowers the best log-likelihood") {
    const RiskCatalog catalog = small_catalog(3);
    const InfluenceGraph graph = InfluenceGraph::complete(3);
    const HistoricalSeries h =
        simulate_history(catalog, graph, {0.4, 0.2, 350.0, TimeUnit::decade}, 250, 5);
    SearchConfig coarse;
    coarse.workers = 1;
    coarse.rel_precision = 3e-2;
    SearchConfig fine = coarse;
    fine.rel_precision = 1e-4;
    const FitResult a = fit(catalog, graph, h, ModelVariant::network, coarse);
    const FitResult b = fit(catalog, graph, h, ModelVariant::network, fine);
    CHECK(b.log_likelihood >= a.log_likelihood - 1e-12);
    CHECK(b.passes >= a.passes);
}

TEST_CASE("variants pin their frozen parameters") {
    const RiskCatalog catalog = small_catalog(3);
    const InfluenceGraph graph(3, {{1, 2, 1}, {1, 3, 1}});
    const HistoricalSeries h =
        simulate_history(catalog, graph, {0.4, 0.2, 350.0, TimeUnit::decade}, 300, 9);
    SearchConfig sc;
    sc.workers = 1;

    const FitResult disc = fit(catalog, graph, h, ModelVariant::disconnected, sc);
    CHECK(disc.params_monthly.beta == 0.0);
    CHECK(disc.params_decade.beta == 0.0);

    const FitResult expert = fit(catalog, graph, h, ModelVariant::expert_based, sc);
    CHECK(expert.params_monthly.alpha == 1.0 / 120.0);
    CHECK(expert.params_monthly.beta == 0.0);
    CHECK(expert.params_decade.alpha == doctest::Approx(1.0).epsilon(1e-15));

    // nesting: more freedom can only help
    const FitResult net = fit(catalog, graph, h, ModelVariant::network, sc);
    CHECK(net.log_likelihood >= disc.log_likelihood - 1e-9);
    CHECK(disc.log_likelihood >= expert.log_likelihood - 1e-9);
}

TEST_CASE("uniform variant ignores the supplied edges") {
    const RiskCatalog catalog = small_catalog(3);
    const InfluenceGraph sparse(3, {{1, 2, 1}});
    const InfluenceGraph complete = InfluenceGraph::complete(3);
    const HistoricalSeries h =
        simulate_history(catalog, complete, {0.4, 0.2, 350.0, TimeUnit::decade}, 200, 13);
    SearchConfig sc;
    sc.workers = 1;
    const FitResult a = fit(catalog, sparse, h, ModelVariant::uniform, sc);
    const FitResult b = fit(catalog, complete, h, ModelVariant::uniform, sc);
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.params_monthly.alpha == b.params_monthly.alpha);
    CHECK(free_parameter_count(ModelVariant::uniform) == 3);
}

TEST_CASE("degenerate histories are flagged instead of fitted") {
    const RiskCatalog catalog = small_catalog(2);
    const InfluenceGraph graph(2, {});
    std::vector<std::uint8_t> silent(20, 0);
    std::vector<MonthLabel> months;
    MonthLabel m{2000, 1};
    for (int t = 0; t < 10; ++t) {
        months.push_back(m);
        m = m.next();
    }
    SearchConfig sc;
    sc.workers = 1;
    const FitResult r =
        fit(catalog, graph, HistoricalSeries(months, silent, 2), ModelVariant::disconnected, sc);
    CHECK(r.degenerate_fit);
}

TEST_CASE("boundary optima are reported") {
    const RiskCatalog catalog = small_catalog(3);
    const InfluenceGraph graph = InfluenceGraph::complete(3);
    const HistoricalSeries h =
        simulate_history(catalog, graph, {0.4, 0.2, 350.0, TimeUnit::decade}, 300, 17);
    SearchConfig sc;
    sc.workers = 1;
    sc.gamma_lo = 1e-3;
    sc.gamma_hi = 1e-2;   // far below any plausible recovery exponent
    const FitResult r = fit(catalog, graph, h, ModelVariant::network, sc);
    CHECK(r.boundary_hit);
}

TEST_CASE("likelihood-ratio test follows the chi-square calibration") {
    FitResult full, restricted;
    full.variant = ModelVariant::network;
    full.log_likelihood = -100.0;
    restricted.variant = ModelVariant::disconnected;
    restricted.log_likelihood = -103.2;
    const LRTestResult lr = lr_test(full, restricted);
    CHECK(lr.statistic == doctest::Approx(6.4).epsilon(1e-12));
    CHECK(lr.degrees_of_freedom == 1);
    CHECK(lr.p_value == doctest::Approx(chi2_sf(6.4, 1)).epsilon(1e-12));

    restricted.variant = ModelVariant::expert_based;
    CHECK(lr_test(full, restricted).degrees_of_freedom == 2);

    FitResult uni;
    uni.variant = ModelVariant::uniform;
    uni.log_likelihood = -101.0;
    CHECK_THROWS_WITH_AS(lr_test(full, uni), doctest::Contains("non_nested"), ValidationError);
    CHECK_THROWS_AS(lr_test(restricted, full), ValidationError);   // wrong nesting direction
}

TEST_CASE("fit search rejects malformed configs") {
    const RiskCatalog catalog = small_catalog(2);
    const InfluenceGraph graph(2, {});
    const HistoricalSeries h =
        simulate_history(catalog, graph, {0.4, 0.0, 350.0, TimeUnit::decade}, 60, 1);
    SearchConfig sc;
    sc.coarse_points = 1;
    CHECK_THROWS_AS(fit(catalog, graph, h, ModelVariant::network, sc), ValidationError);
    sc = SearchConfig{};
    sc.shrink = 0.9;
    CHECK_THROWS_AS(fit(catalog, graph, h, ModelVariant::network, sc), ValidationError);
    sc = SearchConfig{};
    sc.alpha_lo = 0.5;
    sc.alpha_hi = 0.1;
    CHECK_THROWS_AS(fit(catalog, graph, h, ModelVariant::network, sc), ValidationError);
}

#include "riskdyn/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "riskdyn/errors.hpp"
#include "riskdyn/rng.hpp"

namespace riskdyn {

double pairwise_infection_probability(double q, double e, PairwiseConvention convention) {
    auto ok = [](double v) { return !std::isnan(v) && v >= 0.0 && v <= 1.0; };
    if (!ok(q) || !ok(e))
        throw ValidationError("pairwise_infection_probability: q, e must lie in [0,1]");
    if (e == 0.0) return 0.0;   // also covers the 0/0 corner at q = 1
    const double denom = 1.0 - q + q * e;
    const double hit = e / denom;
    return convention == PairwiseConvention::eq3 ? q * hit : hit;
}

ContagionReport contagion_potential(const DerivedRates& rates) {
    const int n = rates.size();
    ContagionReport report;
    report.potential.assign(static_cast<std::size_t>(n), 0.0);
    report.pair_terms = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double q = rates.p_con()[i];
        double sum = 0.0;
        for (int j : rates.neighbors(i)) {
            const double term =
                pairwise_infection_probability(q, rates.p_ext(i, j), PairwiseConvention::eq3);
            report.pair_terms(i, j) = term;
            sum += term;
        }
        report.potential[i] = sum;
    }
    report.ranking.resize(static_cast<std::size_t>(n));
    std::iota(report.ranking.begin(), report.ranking.end(), 1);
    std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](int a, int b) {
        const double ca = report.potential[a - 1], cb = report.potential[b - 1];
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return report;
}

ContagionReport contagion_potential(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                    const ModelParams& params) {
    return contagion_potential(derive_rates(catalog, graph, params));
}

int BlockMatrix::nodes() const {
    int n = 0;
    for (int g : group_sizes) n += g;
    return n;
}

void validate_blocks(const BlockMatrix& blocks) {
    const int g = blocks.groups();
    if (g == 0) throw ValidationError("block matrix: no groups");
    for (int v : blocks.group_sizes)
        if (v <= 0) throw ValidationError("block matrix: group sizes must be positive");
    if (blocks.probabilities.rows() != static_cast<std::size_t>(g) ||
        blocks.probabilities.cols() != static_cast<std::size_t>(g))
        throw ValidationError("block matrix: probability matrix must be G x G");
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b) {
            const double p = blocks.probabilities(a, b);
            if (std::isnan(p)) {
                if (!std::isnan(blocks.probabilities(b, a)))
                    throw ValidationError("block matrix: asymmetric undefined cell");
                continue;
            }
            if (p < 0.0 || p > 1.0)
                throw ValidationError("block matrix: probabilities must lie in [0,1]");
            if (p != blocks.probabilities(b, a))
                throw ValidationError("block matrix: probability matrix must be symmetric");
        }
}

InfluenceGraph sbm_generate(const BlockMatrix& blocks, std::uint64_t seed) {
    validate_blocks(blocks);
    const int n = blocks.nodes();
    std::vector<int> label(static_cast<std::size_t>(n));
    int pos = 0;
    for (int g = 0; g < blocks.groups(); ++g)
        for (int k = 0; k < blocks.group_sizes[g]; ++k) label[pos++] = g;

    SplitMix64 rng(seed);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = blocks.probabilities(label[i], label[j]);
            if (std::isnan(p))
                throw ValidationError("sbm_generate: undefined block probability");
            // draw for every pair, even p = 0, so edits to one block
            // probability never shift the draws of other pairs
            const double u = rng.uniform();
            if (u < p) edges.push_back({i + 1, j + 1, 1});
        }
    }
    return InfluenceGraph(n, edges);
}

BlockMatrix estimate_block_probabilities(const InfluenceGraph& graph,
                                         const std::vector<int>& labels) {
    const int n = graph.size();
    if (static_cast<int>(labels.size()) != n)
        throw ValidationError("estimate_block_probabilities: labels length must equal node count");
    int g = 0;
    for (int v : labels) {
        if (v < 0) throw ValidationError("estimate_block_probabilities: labels must be >= 0");
        g = std::max(g, v + 1);
    }

    BlockMatrix out;
    out.group_sizes.assign(static_cast<std::size_t>(g), 0);
    for (int v : labels) ++out.group_sizes[v];
    Matrix possible(static_cast<std::size_t>(g), static_cast<std::size_t>(g));
    Matrix present(static_cast<std::size_t>(g), static_cast<std::size_t>(g));
    for (int a = 0; a < g; ++a) {
        for (int b = a; b < g; ++b) {
            const double pairs =
                a == b ? 0.5 * out.group_sizes[a] * (out.group_sizes[a] - 1)
                       : static_cast<double>(out.group_sizes[a]) * out.group_sizes[b];
            possible(a, b) = possible(b, a) = pairs;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (graph.has_edge(i, j)) {
                present(labels[i], labels[j]) += 1.0;
                if (labels[i] != labels[j]) present(labels[j], labels[i]) += 1.0;
            }

    out.probabilities = Matrix(static_cast<std::size_t>(g), static_cast<std::size_t>(g));
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b)
            out.probabilities(a, b) =
                possible(a, b) > 0.0 ? present(a, b) / possible(a, b)
                                     : std::numeric_limits<double>::quiet_NaN();
    return out;
}

DegreeStats degree_stats(const InfluenceGraph& graph) {
    DegreeStats stats;
    stats.edge_count = graph.edge_count();
    stats.mean_degree = graph.mean_degree();
    return stats;
}

DegreeStats degree_stats(const InfluenceGraph& graph, const std::vector<int>& labels) {
    if (static_cast<int>(labels.size()) != graph.size())
        throw ValidationError("degree_stats: labels length must equal node count");
    DegreeStats stats = degree_stats(graph);
    int g = 0;
    for (int v : labels) {
        if (v < 0) throw ValidationError("degree_stats: labels must be >= 0");
        g = std::max(g, v + 1);
    }
    std::vector<double> sum(static_cast<std::size_t>(g), 0.0);
    std::vector<int> count(static_cast<std::size_t>(g), 0);
    for (int i = 0; i < graph.size(); ++i) {
        sum[labels[i]] += graph.degree(i);
        ++count[labels[i]];
    }
    stats.group_mean_degree.resize(static_cast<std::size_t>(g));
    for (int a = 0; a < g; ++a)
        stats.group_mean_degree[a] =
            count[a] ? sum[a] / count[a] : std::numeric_limits<double>::quiet_NaN();
    return stats;
}

std::vector<int> group_labels(const RiskCatalog& catalog) {
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(catalog.size()));
    for (const RiskRecord& r : catalog.entries())
        labels.push_back(static_cast<int>(r.group) - 1);
    return labels;
}

} // namespace riskdyn

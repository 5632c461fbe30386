#pragma once

#include <cstdint>
#include <vector>

#include "riskdyn/matrix.hpp"
#include "riskdyn/model.hpp"

namespace riskdyn {

// ---------------------------------------------------------------------------
// Contagion potential
// ---------------------------------------------------------------------------

/// Two closed forms for the chance that a single active source ever activates
/// one neighbor (source continuation q, influence probability e):
///   eq3:         q e / (1 - q + q e)   (influence only after surviving a step)
///   synchronous: e / (1 - q + q e)     (influence already on the first step;
///                                       matches the simulation dynamics)
enum class PairwiseConvention { eq3, synchronous };

double pairwise_infection_probability(double q, double e, PairwiseConvention convention);

struct ContagionReport {
    std::vector<double> potential;   ///< C_i per risk, index 0-based
    std::vector<int> ranking;        ///< risk ids, descending C, ties by id
    Matrix pair_terms;               ///< (source, target) per-pair eq3 terms
};

/// C_i = sum over neighbors j of the eq3 term with q = p_con_i and
/// e = p_ext(i -> j).
ContagionReport contagion_potential(const DerivedRates& rates);
ContagionReport contagion_potential(const RiskCatalog& catalog, const InfluenceGraph& graph,
                                    const ModelParams& params);

// ---------------------------------------------------------------------------
// Stochastic block model
// ---------------------------------------------------------------------------

struct BlockMatrix {
    std::vector<int> group_sizes;
    Matrix probabilities;   ///< G x G, symmetric; NaN marks an undefined cell

    int groups() const { return static_cast<int>(group_sizes.size()); }
    int nodes() const;
};

/// Probabilities must be symmetric and, where defined, in [0,1].
void validate_blocks(const BlockMatrix& blocks);

/// Draws each unordered pair independently with its block probability.
/// Nodes are numbered group by group. Same seed, same graph.
InfluenceGraph sbm_generate(const BlockMatrix& blocks, std::uint64_t seed);

/// Empirical edge density per block pair. Group labels are 0-based and dense
/// (every group in [0, max label] may appear). Intra-group density of a group
/// with fewer than 2 members is undefined and reported as NaN.
BlockMatrix estimate_block_probabilities(const InfluenceGraph& graph,
                                         const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Degree statistics
// ---------------------------------------------------------------------------

struct DegreeStats {
    int edge_count = 0;
    double mean_degree = 0.0;
    std::vector<double> group_mean_degree;   ///< empty when no labels given
};

DegreeStats degree_stats(const InfluenceGraph& graph);
DegreeStats degree_stats(const InfluenceGraph& graph, const std::vector<int>& labels);

/// 0-based group indices of a catalog's risks (enum order).
std::vector<int> group_labels(const RiskCatalog& catalog);

} // namespace riskdyn

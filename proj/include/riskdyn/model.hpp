#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskdyn/errors.hpp"
#include "riskdyn/matrix.hpp"

namespace riskdyn {

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// The five risk categories, in the fixed documented order. Accepted on input
/// either by name or by integer 1..5 (1=economic ... 5=technological).
enum class RiskGroup : int {
    economic = 1,
    environmental = 2,
    geopolitical = 3,
    societal = 4,
    technological = 5,
};

RiskGroup parse_group(const std::string& text);
std::string group_name(RiskGroup g);

struct RiskRecord {
    int id = 0;                ///< 1-based, contiguous across the catalog
    std::string name;
    RiskGroup group = RiskGroup::economic;
    double likelihood = 1.0;   ///< expert score in [1, 5], decade scale
    double stddev = 0.0;       ///< expert-score standard deviation, >= 0
};

/// Ordered list of risks. Construction validates: ids contiguous 1..N,
/// likelihoods in [1,5], stddevs >= 0.
class RiskCatalog {
public:
    RiskCatalog() = default;
    explicit RiskCatalog(std::vector<RiskRecord> entries);

    int size() const { return static_cast<int>(entries_.size()); }
    const RiskRecord& record(int id) const;          ///< 1-based id
    const std::vector<RiskRecord>& entries() const { return entries_; }

private:
    std::vector<RiskRecord> entries_;
};

// ---------------------------------------------------------------------------
// Influence graph
// ---------------------------------------------------------------------------

struct Edge {
    int source = 0;   ///< 1-based risk id, source < target
    int target = 0;
    std::uint32_t weight = 1;   ///< expert count; stored, not used by dynamics
};

/// Symmetric binary influence graph over N risks. Self-loops are rejected;
/// edge weights are kept for bookkeeping only.
class InfluenceGraph {
public:
    InfluenceGraph() = default;
    InfluenceGraph(int n, const std::vector<Edge>& edges);

    static InfluenceGraph complete(int n);

    int size() const { return n_; }
    bool has_edge(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
    /// Neighbor lists, 0-based, ascending.
    const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
    int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
    int edge_count() const { return edge_count_; }
    double mean_degree() const { return n_ ? 2.0 * edge_count_ / n_ : 0.0; }
    std::uint32_t weight(int i, int j) const;
    std::vector<Edge> edges() const;   ///< source < target, ascending

private:
    int n_ = 0;
    int edge_count_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::uint32_t> weights_;
    std::vector<std::vector<int>> neighbors_;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

enum class TimeUnit { month, decade };

TimeUnit parse_time_unit(const std::string& text);
std::string time_unit_name(TimeUnit u);

/// Exactly 120 months per decade; the exponents scale linearly with the unit.
inline constexpr double kMonthsPerDecade = 120.0;

struct ModelParams {
    double alpha = 0.0;   ///< internal-materialization exponent, > 0
    double beta = 0.0;    ///< pairwise-influence exponent, >= 0
    double gamma = 0.0;   ///< continuation exponent, > 0
    TimeUnit time_unit = TimeUnit::month;
};

/// Multiplies the three exponents by `factor` (> 0). The declared unit flips
/// only for the exact decade<->month conversion factors 120 and 1/120.
ModelParams rescale_params(const ModelParams& params, double factor);

/// Views of the same parameters at the canonical monthly scale / decade scale.
ModelParams to_monthly(const ModelParams& params);
ModelParams to_decade(const ModelParams& params);

void validate_params(const ModelParams& params);

// ---------------------------------------------------------------------------
// States and history
// ---------------------------------------------------------------------------

/// Binary state vector S(t); entry i is 1 when risk i+1 is active.
using StateVector = std::vector<std::uint8_t>;

void validate_state(const StateVector& s, int n);

struct MonthLabel {
    int year = 2000;
    int month = 1;   ///< 1..12

    static MonthLabel parse(const std::string& text);   ///< "YYYY-MM"
    std::string str() const;
    MonthLabel next() const;
    bool operator==(const MonthLabel&) const = default;
};

/// T x N binary state matrix over strictly consecutive calendar months.
class HistoricalSeries {
public:
    HistoricalSeries() = default;
    HistoricalSeries(std::vector<MonthLabel> months, std::vector<std::uint8_t> states, int n);

    int months_count() const { return static_cast<int>(months_.size()); }
    int risks_count() const { return n_; }
    const std::vector<MonthLabel>& months() const { return months_; }
    std::uint8_t state(int t, int i) const { return states_[static_cast<std::size_t>(t) * n_ + i]; }
    StateVector row(int t) const;
    const std::vector<std::uint8_t>& raw() const { return states_; }

private:
    std::vector<MonthLabel> months_;
    std::vector<std::uint8_t> states_;
    int n_ = 0;
};

// ---------------------------------------------------------------------------
// Probability mappings (expert scores -> monthly transition probabilities)
// ---------------------------------------------------------------------------

/// Maps an expert likelihood score L in [1,5] to a vulnerability in [0,1]:
/// p = (L - 1) / 4.
double normalize_likelihood(double score);

/// Monthly internal-materialization probability 1 - (1-p)^alpha_m.
double internal_probability(double vulnerability, double alpha_monthly);

/// Monthly continuation probability 1 - (1-p)^gamma_m.
double continuation_probability(double vulnerability, double gamma_monthly);

/// Monthly pairwise influence probability on a TARGET with vulnerability p:
/// 1 - (1-p)^(beta_m * connected); zero when not connected.
double external_probability(double target_vulnerability, double beta_monthly, bool connected);

// ---------------------------------------------------------------------------
// Derived rates
// ---------------------------------------------------------------------------

/// Per-risk monthly transition probabilities and the equivalent Poisson
/// intensities. Intensities may be +infinity at the degenerate endpoints
/// (p = 1); every dynamics and likelihood path evaluates probabilities of the
/// form 1 - exp(-lambda), which stay in [0,1] even then.
class DerivedRates {
public:
    DerivedRates() = default;

    /// General constructor from intensities. lambda_ext(j,i) is the intensity
    /// that an active j exerts on target i; its support must be symmetric with
    /// a zero diagonal.
    DerivedRates(std::vector<double> lambda_int, std::vector<double> lambda_rec, Matrix lambda_ext);

    /// Convenience constructor from monthly probabilities
    /// (lambda = -ln(1-p), lambda_rec = -ln(p_con)).
    static DerivedRates from_probabilities(const std::vector<double>& p_int,
                                           const std::vector<double>& p_con,
                                           const Matrix& p_ext);

    int size() const { return n_; }

    const std::vector<double>& p_int() const { return p_int_; }
    const std::vector<double>& p_con() const { return p_con_; }
    const std::vector<double>& lambda_int() const { return lambda_int_; }
    const std::vector<double>& lambda_rec() const { return lambda_rec_; }
    const Matrix& lambda_ext() const { return lambda_ext_; }
    double p_ext(int j, int i) const { return p_ext_(j, i); }
    const Matrix& p_ext_matrix() const { return p_ext_; }

    /// Neighbor lists of the (symmetric) support of lambda_ext.
    const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
    int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }

    /// True when every incoming intensity of a target is identical, which is
    /// the case for all model-derived rates (the influence intensity depends
    /// only on the target). Enables the k-active-neighbors fast path.
    bool uniform_in_target() const { return uniform_in_target_; }
    /// Per-edge incoming intensity of target i (fast path only).
    double lambda_ext_in(int i) const { return lambda_ext_in_[i]; }

    /// P(i inactive at t-1 -> active at t) given the sum of incoming active
    /// intensities; P(0->1) = 1 - exp(-lambda_int_i - ext_sum).
    double activation_probability(int i, double ext_sum) const;

    /// Sum of incoming intensities from the active entries of prev. On
    /// uniform-in-target rates this is computed as count * lambda_ext_in
    /// (the one expression every consumer must share so that trajectories
    /// stay bit-identical); otherwise the active neighbors are summed in
    /// ascending id order.
    double incoming_intensity(const StateVector& prev, int i) const;

private:
    int n_ = 0;
    std::vector<double> p_int_, p_con_, lambda_int_, lambda_rec_;
    Matrix lambda_ext_, p_ext_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<double> lambda_ext_in_;
    bool uniform_in_target_ = true;
};

/// Builds the monthly DerivedRates for (catalog, graph, params) via the three
/// mapping operations. Pure: identical inputs give bit-identical outputs.
DerivedRates derive_rates(const RiskCatalog& catalog, const InfluenceGraph& graph,
                          const ModelParams& params);

struct TransitionProbs {
    double activation = 0.0;     ///< P(0->1) given the previous state vector
    double continuation = 0.0;   ///< P(1->1), independent of neighbors
};

/// Single-risk transition probabilities out of the previous state vector.
/// `risk_id` is 1-based.
TransitionProbs transition_probabilities(const DerivedRates& rates, const StateVector& prev,
                                         int risk_id);

} // namespace riskdyn

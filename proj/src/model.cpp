#include "riskdyn/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace riskdyn {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

bool finite(double x) { return std::isfinite(x); }

} // namespace

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

RiskGroup parse_group(const std::string& text) {
    if (text == "economic") return RiskGroup::economic;
    if (text == "environmental") return RiskGroup::environmental;
    if (text == "geopolitical") return RiskGroup::geopolitical;
    if (text == "societal") return RiskGroup::societal;
    if (text == "technological") return RiskGroup::technological;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size() && v >= 1 && v <= 5)
        return static_cast<RiskGroup>(v);
    fail("unknown risk group '" + text + "'");
}

std::string group_name(RiskGroup g) {
    switch (g) {
    case RiskGroup::economic: return "economic";
    case RiskGroup::environmental: return "environmental";
    case RiskGroup::geopolitical: return "geopolitical";
    case RiskGroup::societal: return "societal";
    case RiskGroup::technological: return "technological";
    }
    fail("invalid risk group value");
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

RiskCatalog::RiskCatalog(std::vector<RiskRecord> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) fail("catalog: no risks");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const RiskRecord& r = entries_[k];
        if (r.id != static_cast<int>(k) + 1)
            fail("catalog: ids must be contiguous from 1; position " + std::to_string(k + 1) +
                 " has id " + std::to_string(r.id));
        if (!finite(r.likelihood) || r.likelihood < 1.0 || r.likelihood > 5.0)
            fail("catalog: risk " + std::to_string(r.id) + ": likelihood " +
                 std::to_string(r.likelihood) + " outside [1,5]");
        if (!finite(r.stddev) || r.stddev < 0.0)
            fail("catalog: risk " + std::to_string(r.id) + ": stddev must be >= 0");
        if (r.name.empty())
            fail("catalog: risk " + std::to_string(r.id) + ": empty name");
    }
}

const RiskRecord& RiskCatalog::record(int id) const {
    if (id < 1 || id > size()) fail("catalog: risk id " + std::to_string(id) + " out of range");
    return entries_[static_cast<std::size_t>(id) - 1];
}

// ---------------------------------------------------------------------------
// Influence graph
// ---------------------------------------------------------------------------

InfluenceGraph::InfluenceGraph(int n, const std::vector<Edge>& edges) : n_(n) {
    if (n <= 0) fail("graph: need at least one node");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    weights_.assign(static_cast<std::size_t>(n) * n, 0);
    neighbors_.assign(static_cast<std::size_t>(n), {});
    for (const Edge& e : edges) {
        if (e.source < 1 || e.source > n || e.target < 1 || e.target > n)
            fail("graph: edge (" + std::to_string(e.source) + "," + std::to_string(e.target) +
                 ") references an unknown risk id");
        if (e.source == e.target)
            fail("graph: self-loop at risk " + std::to_string(e.source));
        if (e.source > e.target)
            fail("graph: edge (" + std::to_string(e.source) + "," + std::to_string(e.target) +
                 ") must be listed with source < target");
        const int i = e.source - 1, j = e.target - 1;
        std::size_t ij = static_cast<std::size_t>(i) * n + j;
        std::size_t ji = static_cast<std::size_t>(j) * n + i;
        if (adj_[ij])
            fail("graph: duplicate edge (" + std::to_string(e.source) + "," +
                 std::to_string(e.target) + ")");
        adj_[ij] = adj_[ji] = 1;
        weights_[ij] = weights_[ji] = e.weight;
        ++edge_count_;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (adj_[static_cast<std::size_t>(i) * n + j]) neighbors_[i].push_back(j);
    }
}

InfluenceGraph InfluenceGraph::complete(int n) {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) edges.push_back({i, j, 1});
    return InfluenceGraph(n, edges);
}

std::uint32_t InfluenceGraph::weight(int i, int j) const {
    return weights_[static_cast<std::size_t>(i) * n_ + j];
}

std::vector<Edge> InfluenceGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(edge_count_));
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (adj_[static_cast<std::size_t>(i) * n_ + j])
                out.push_back({i + 1, j + 1, weights_[static_cast<std::size_t>(i) * n_ + j]});
    return out;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

TimeUnit parse_time_unit(const std::string& text) {
    if (text == "month") return TimeUnit::month;
    if (text == "decade") return TimeUnit::decade;
    fail("unknown time unit '" + text + "' (expected month or decade)");
}

std::string time_unit_name(TimeUnit u) {
    return u == TimeUnit::month ? "month" : "decade";
}

void validate_params(const ModelParams& p) {
    if (!finite(p.alpha) || p.alpha <= 0.0) fail("params: alpha must be finite and > 0");
    if (!finite(p.beta) || p.beta < 0.0) fail("params: beta must be finite and >= 0");
    if (!finite(p.gamma) || p.gamma <= 0.0) fail("params: gamma must be finite and > 0");
}

ModelParams rescale_params(const ModelParams& params, double factor) {
    if (!finite(factor) || factor <= 0.0) fail("rescale: factor must be finite and > 0");
    ModelParams out = params;
    out.alpha = params.alpha * factor;
    out.beta = params.beta * factor;
    out.gamma = params.gamma * factor;
    if (params.time_unit == TimeUnit::month && factor == kMonthsPerDecade)
        out.time_unit = TimeUnit::decade;
    else if (params.time_unit == TimeUnit::decade && factor == 1.0 / kMonthsPerDecade)
        out.time_unit = TimeUnit::month;
    return out;
}

ModelParams to_monthly(const ModelParams& params) {
    if (params.time_unit == TimeUnit::month) return params;
    // Divide rather than multiply by the reciprocal: one correctly rounded
    // operation instead of two.
    ModelParams out = params;
    out.alpha = params.alpha / kMonthsPerDecade;
    out.beta = params.beta / kMonthsPerDecade;
    out.gamma = params.gamma / kMonthsPerDecade;
    out.time_unit = TimeUnit::month;
    return out;
}

ModelParams to_decade(const ModelParams& params) {
    if (params.time_unit == TimeUnit::decade) return params;
    ModelParams out = params;
    out.alpha = params.alpha * kMonthsPerDecade;
    out.beta = params.beta * kMonthsPerDecade;
    out.gamma = params.gamma * kMonthsPerDecade;
    out.time_unit = TimeUnit::decade;
    return out;
}

// ---------------------------------------------------------------------------
// States and history
// ---------------------------------------------------------------------------

void validate_state(const StateVector& s, int n) {
    if (static_cast<int>(s.size()) != n)
        fail("state: expected " + std::to_string(n) + " entries, got " + std::to_string(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] > 1)
            fail("state: entry " + std::to_string(i + 1) + " is " + std::to_string(int(s[i])) +
                 ", must be 0 or 1");
}

MonthLabel MonthLabel::parse(const std::string& text) {
    auto bad = [&]() -> MonthLabel {
        fail("month label '" + text + "' is not of the form YYYY-MM");
    };
    if (text.size() != 7 || text[4] != '-') return bad();
    for (std::size_t k : {0u, 1u, 2u, 3u, 5u, 6u})
        if (text[k] < '0' || text[k] > '9') return bad();
    MonthLabel m;
    std::from_chars(text.data(), text.data() + 4, m.year);
    std::from_chars(text.data() + 5, text.data() + 7, m.month);
    if (m.month < 1 || m.month > 12)
        fail("month label '" + text + "': month must be 01..12");
    return m;
}

std::string MonthLabel::str() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

MonthLabel MonthLabel::next() const {
    return month == 12 ? MonthLabel{year + 1, 1} : MonthLabel{year, month + 1};
}

HistoricalSeries::HistoricalSeries(std::vector<MonthLabel> months, std::vector<std::uint8_t> states,
                                   int n)
    : months_(std::move(months)), states_(std::move(states)), n_(n) {
    if (n_ <= 0) fail("history: need at least one risk column");
    if (months_.empty()) fail("history: no rows");
    if (states_.size() != months_.size() * static_cast<std::size_t>(n_))
        fail("history: state matrix size does not match rows x risks");
    for (std::size_t t = 1; t < months_.size(); ++t) {
        if (!(months_[t] == months_[t - 1].next()))
            fail("history: months not consecutive at row " + std::to_string(t + 1) + " (" +
                 months_[t - 1].str() + " followed by " + months_[t].str() + ")");
    }
    for (std::size_t k = 0; k < states_.size(); ++k)
        if (states_[k] > 1)
            fail("history: state values must be 0 or 1 (row " + std::to_string(k / n_ + 1) +
                 ", risk " + std::to_string(k % n_ + 1) + ")");
}

StateVector HistoricalSeries::row(int t) const {
    auto first = states_.begin() + static_cast<std::ptrdiff_t>(t) * n_;
    return StateVector(first, first + n_);
}

// ---------------------------------------------------------------------------
// Probability mappings
// ---------------------------------------------------------------------------

double normalize_likelihood(double score) {
    if (!finite(score) || score < 1.0 || score > 5.0)
        fail("likelihood score " + std::to_string(score) + " outside [1,5]");
    return (score - 1.0) / 4.0;
}

namespace {

// 1 - (1-p)^e, evaluated as -expm1(e * log1p(-p)) so tiny exponents keep full
// precision and p = 1 maps to exactly 1 for any e > 0.
double escalate(double p, double e) {
    if (e == 0.0) return 0.0;
    return -std::expm1(e * std::log1p(-p));
}

void check_vulnerability(double p) {
    if (!finite(p) || p < 0.0 || p > 1.0)
        fail("vulnerability " + std::to_string(p) + " outside [0,1]");
}

} // namespace

double internal_probability(double vulnerability, double alpha_monthly) {
    check_vulnerability(vulnerability);
    if (!finite(alpha_monthly) || alpha_monthly <= 0.0) fail("alpha must be finite and > 0");
    return escalate(vulnerability, alpha_monthly);
}

double continuation_probability(double vulnerability, double gamma_monthly) {
    check_vulnerability(vulnerability);
    if (!finite(gamma_monthly) || gamma_monthly <= 0.0) fail("gamma must be finite and > 0");
    return escalate(vulnerability, gamma_monthly);
}

double external_probability(double target_vulnerability, double beta_monthly, bool connected) {
    check_vulnerability(target_vulnerability);
    if (!finite(beta_monthly) || beta_monthly < 0.0) fail("beta must be finite and >= 0");
    if (!connected) return 0.0;
    return escalate(target_vulnerability, beta_monthly);
}

// ---------------------------------------------------------------------------
// Derived rates
// ---------------------------------------------------------------------------

namespace {

double intensity_of(double p) {
    // -ln(1-p); +inf at p = 1 is intentional and flows through exp() safely.
    return -std::log1p(-p);
}

double probability_of(double lambda) { return -std::expm1(-lambda); }

} // namespace

DerivedRates::DerivedRates(std::vector<double> lambda_int, std::vector<double> lambda_rec,
                           Matrix lambda_ext)
    : n_(static_cast<int>(lambda_int.size())),
      lambda_int_(std::move(lambda_int)),
      lambda_rec_(std::move(lambda_rec)),
      lambda_ext_(std::move(lambda_ext)) {
    if (n_ == 0) fail("rates: empty intensity vectors");
    if (static_cast<int>(lambda_rec_.size()) != n_)
        fail("rates: lambda_rec size mismatch");
    if (lambda_ext_.rows() != static_cast<std::size_t>(n_) ||
        lambda_ext_.cols() != static_cast<std::size_t>(n_))
        fail("rates: lambda_ext must be N x N");
    for (int i = 0; i < n_; ++i) {
        if (std::isnan(lambda_int_[i]) || lambda_int_[i] < 0.0)
            fail("rates: lambda_int[" + std::to_string(i + 1) + "] must be >= 0");
        if (std::isnan(lambda_rec_[i]) || lambda_rec_[i] < 0.0)
            fail("rates: lambda_rec[" + std::to_string(i + 1) + "] must be >= 0");
    }
    for (int j = 0; j < n_; ++j) {
        if (lambda_ext_(j, j) != 0.0)
            fail("rates: lambda_ext diagonal must be zero (risk " + std::to_string(j + 1) + ")");
        for (int i = 0; i < n_; ++i) {
            double v = lambda_ext_(j, i);
            if (std::isnan(v) || v < 0.0)
                fail("rates: lambda_ext(" + std::to_string(j + 1) + "," + std::to_string(i + 1) +
                     ") must be >= 0");
            if ((v > 0.0) != (lambda_ext_(i, j) > 0.0))
                fail("rates: lambda_ext support must be symmetric (" + std::to_string(j + 1) +
                     "," + std::to_string(i + 1) + ")");
        }
    }

    p_int_.resize(static_cast<std::size_t>(n_));
    p_con_.resize(static_cast<std::size_t>(n_));
    p_ext_ = Matrix(static_cast<std::size_t>(n_), static_cast<std::size_t>(n_));
    neighbors_.assign(static_cast<std::size_t>(n_), {});
    lambda_ext_in_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        p_int_[i] = probability_of(lambda_int_[i]);
        p_con_[i] = std::exp(-lambda_rec_[i]);
    }
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) p_ext_(j, i) = probability_of(lambda_ext_(j, i));
    for (int i = 0; i < n_; ++i) {
        bool first = true;
        for (int j = 0; j < n_; ++j) {
            double v = lambda_ext_(j, i);
            if (v <= 0.0) continue;
            neighbors_[i].push_back(j);
            if (first) {
                lambda_ext_in_[i] = v;
                first = false;
            } else if (v != lambda_ext_in_[i]) {
                uniform_in_target_ = false;
            }
        }
    }
}

DerivedRates DerivedRates::from_probabilities(const std::vector<double>& p_int,
                                              const std::vector<double>& p_con,
                                              const Matrix& p_ext) {
    const int n = static_cast<int>(p_int.size());
    if (static_cast<int>(p_con.size()) != n) fail("rates: p_con size mismatch");
    if (p_ext.rows() != static_cast<std::size_t>(n) || p_ext.cols() != static_cast<std::size_t>(n))
        fail("rates: p_ext must be N x N");
    auto check_p = [](double p, const char* what, int idx) {
        if (std::isnan(p) || p < 0.0 || p > 1.0)
            fail(std::string("rates: ") + what + "[" + std::to_string(idx + 1) +
                 "] outside [0,1]");
    };
    std::vector<double> li(static_cast<std::size_t>(n)), lr(static_cast<std::size_t>(n));
    Matrix le(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        check_p(p_int[i], "p_int", i);
        check_p(p_con[i], "p_con", i);
        li[i] = intensity_of(p_int[i]);
        lr[i] = -std::log(p_con[i]);   // p_con = exp(-lambda_rec)
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            check_p(p_ext(j, i), "p_ext", j * n + i);
            le(j, i) = intensity_of(p_ext(j, i));
        }
    return DerivedRates(std::move(li), std::move(lr), std::move(le));
}

double DerivedRates::activation_probability(int i, double ext_sum) const {
    return -std::expm1(-(lambda_int_[i] + ext_sum));
}

double DerivedRates::incoming_intensity(const StateVector& prev, int i) const {
    if (uniform_in_target_) {
        long k = 0;
        for (int j : neighbors_[i]) k += prev[j];
        return k == 0 ? 0.0 : static_cast<double>(k) * lambda_ext_in_[i];
    }
    double sum = 0.0;
    for (int j : neighbors_[i])
        if (prev[j]) sum += lambda_ext_(j, i);
    return sum;
}

DerivedRates derive_rates(const RiskCatalog& catalog, const InfluenceGraph& graph,
                          const ModelParams& params) {
    if (graph.size() != catalog.size())
        fail("rates: graph has " + std::to_string(graph.size()) + " nodes, catalog has " +
             std::to_string(catalog.size()));
    validate_params(params);
    const ModelParams mp = to_monthly(params);
    const int n = catalog.size();
    std::vector<double> li(static_cast<std::size_t>(n)), lr(static_cast<std::size_t>(n));
    Matrix le(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = normalize_likelihood(catalog.record(i + 1).likelihood);
        li[i] = -mp.alpha * std::log1p(-p);
        lr[i] = -std::log(continuation_probability(p, mp.gamma));
        for (int j = 0; j < n; ++j) {
            // incoming intensity depends only on the target's vulnerability
            le(j, i) = graph.has_edge(j, i) ? -mp.beta * std::log1p(-p) : 0.0;
        }
    }
    return DerivedRates(std::move(li), std::move(lr), std::move(le));
}

TransitionProbs transition_probabilities(const DerivedRates& rates, const StateVector& prev,
                                         int risk_id) {
    validate_state(prev, rates.size());
    if (risk_id < 1 || risk_id > rates.size())
        fail("risk id " + std::to_string(risk_id) + " out of range");
    const int i = risk_id - 1;
    TransitionProbs tp;
    tp.activation = rates.activation_probability(i, rates.incoming_intensity(prev, i));
    tp.continuation = rates.p_con()[i];
    return tp;
}

} // namespace riskdyn

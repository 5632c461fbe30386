#include "riskdyn/io.hpp"

#include <cmath>

#include "riskdyn/errors.hpp"
#include "riskdyn/rng.hpp"
#include "riskdyn/simulate.hpp"

namespace riskdyn {

namespace {

// substream allocation off config.seed
constexpr std::uint64_t kCatalogStream = 0;
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kHistoryStream = 2;

} // namespace

int SynthConfig::n() const {
    int total = 0;
    for (int s : group_sizes) total += s;
    return total;
}

BlockMatrix default_blocks(const std::vector<int>& group_sizes) {
    static constexpr double kIntra[5] = {0.65, 0.55, 0.55, 0.45, 0.35};
    constexpr double kInter = 0.40;
    const std::size_t g = group_sizes.size();
    BlockMatrix blocks;
    blocks.group_sizes = group_sizes;
    blocks.probabilities = Matrix(g, g, kInter);
    for (std::size_t i = 0; i < g; ++i) blocks.probabilities(i, i) = kIntra[i % 5];
    return blocks;
}

void validate_synth_config(const SynthConfig& config) {
    if (config.group_sizes.empty()) throw ValidationError("group_sizes must not be empty");
    if (config.group_sizes.size() > 5)
        throw ValidationError("at most 5 groups (one per risk group)");
    for (int s : config.group_sizes)
        if (s <= 0) throw ValidationError("group sizes must be positive");
    if (config.months < 24) throw ValidationError("months must be >= 24");
    if (config.burn_in < 0) throw ValidationError("burn_in must be >= 0");
    validate_params(config.ground_truth);
    if (!(config.likelihood_lo >= 1.0 && config.likelihood_hi <= 5.0 &&
          config.likelihood_lo <= config.likelihood_hi))
        throw ValidationError("likelihood bounds must satisfy 1 <= lo <= hi <= 5");
    for (double v : {config.likelihood_lo, config.likelihood_hi})
        if (std::abs(v * 2.0 - std::round(v * 2.0)) > 1e-9)
            throw ValidationError("likelihood bounds must lie on the half-step grid");
    if (!(config.stddev_lo >= 0.0 && config.stddev_lo <= config.stddev_hi))
        throw ValidationError("stddev bounds must satisfy 0 <= lo <= hi");
    if (!config.blocks.probabilities.data().empty()) {
        if (config.blocks.group_sizes != config.group_sizes)
            throw ValidationError("block group sizes must match group_sizes");
        validate_blocks(config.blocks);
    }
}

SynthDataset synth_dataset(const SynthConfig& config) {
    validate_synth_config(config);
    const int n = config.n();

    // catalog: scores uniform on the half-step grid, stddev uniform in range
    SplitMix64 cat_rng = substream(config.seed, kCatalogStream);
    const auto steps =
        static_cast<std::uint64_t>(std::llround((config.likelihood_hi - config.likelihood_lo) * 2.0)) + 1;
    int width = 1;
    for (int v = n; v >= 10; v /= 10) ++width;
    std::vector<RiskRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    int id = 1;
    for (std::size_t g = 0; g < config.group_sizes.size(); ++g) {
        for (int k = 0; k < config.group_sizes[g]; ++k, ++id) {
            RiskRecord r;
            r.id = id;
            std::string num = std::to_string(id);
            if (static_cast<int>(num.size()) < width)
                num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
            r.name = "risk_" + num;
            r.group = static_cast<RiskGroup>(g + 1);
            r.likelihood = config.likelihood_lo + 0.5 * static_cast<double>(cat_rng.below(steps));
            r.stddev = config.stddev_lo + (config.stddev_hi - config.stddev_lo) * cat_rng.uniform();
            records.push_back(std::move(r));
        }
    }
    RiskCatalog catalog(std::move(records));

    const BlockMatrix blocks = config.blocks.probabilities.data().empty()
                                   ? default_blocks(config.group_sizes)
                                   : config.blocks;
    InfluenceGraph graph = sbm_generate(blocks, substream(config.seed, kGraphStream).next());

    const DerivedRates rates = derive_rates(catalog, graph, config.ground_truth);
    SplitMix64 hist_rng = substream(config.seed, kHistoryStream);
    StateVector state(static_cast<std::size_t>(n), 0);
    for (long t = 0; t < config.burn_in; ++t) state = step(state, rates, hist_rng);

    std::vector<MonthLabel> months;
    months.reserve(static_cast<std::size_t>(config.months));
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(config.months) * static_cast<std::size_t>(n));
    MonthLabel label = config.start;
    for (int t = 0; t < config.months; ++t) {
        state = step(state, rates, hist_rng);
        months.push_back(label);
        cells.insert(cells.end(), state.begin(), state.end());
        label = label.next();
    }

    return SynthDataset{std::move(catalog), std::move(graph),
                        HistoricalSeries(std::move(months), std::move(cells), n),
                        config.ground_truth};
}

SynthDataset write_synth_dataset(const SynthConfig& config, const std::string& out_dir,
                                 const std::string& command) {
    SynthDataset data = synth_dataset(config);
    save_catalog(data.catalog, out_dir + "/risks.csv");
    save_graph(data.graph, out_dir + "/edges.csv");
    save_history(data.history, out_dir + "/history.csv");
    save_params(data.ground_truth, out_dir + "/params.json");
    write_manifest(make_manifest(command, {}, {config.seed}), out_dir + "/manifest.json");
    return data;
}

} // namespace riskdyn

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskdyn/model.hpp"
#include "riskdyn/netstats.hpp"

namespace riskdyn {

inline constexpr const char* kToolVersion = "riskdyn 0.1.0";

// ---------------------------------------------------------------------------
// Number formatting: shortest string that round-trips the exact double, '.'
// decimal separator, used by every writer so that save(load(x)) is
// byte-identical.
// ---------------------------------------------------------------------------

std::string format_double(double value);
double parse_double(const std::string& text, const std::string& where);

// ---------------------------------------------------------------------------
// Loaders. Errors carry path and line number. Formats (UTF-8, LF):
//   risks.csv    id,name,group,likelihood,stddev
//   edges.csv    source,target,weight          (source < target)
//   history.csv  month,r1,...,rN               (month YYYY-MM, cells 0/1)
//   params.json  {"alpha","beta","gamma","time_unit"}
// ---------------------------------------------------------------------------

RiskCatalog load_catalog(const std::string& path);
InfluenceGraph load_graph(const std::string& path, int n);
/// Node count inferred as the largest id mentioned; prefer the explicit-n
/// overload whenever a catalog is available.
InfluenceGraph load_graph(const std::string& path);
HistoricalSeries load_history(const std::string& path);
ModelParams load_params(const std::string& path);

void save_catalog(const RiskCatalog& catalog, const std::string& path);
void save_graph(const InfluenceGraph& graph, const std::string& path);
void save_history(const HistoricalSeries& history, const std::string& path);
void save_params(const ModelParams& params, const std::string& path);

/// N consistency across the three inputs.
void cross_check(const RiskCatalog& catalog, const InfluenceGraph& graph);
void cross_check(const RiskCatalog& catalog, const HistoricalSeries& history);

// ---------------------------------------------------------------------------
// Run manifests: enough to re-run a command bit-identically, so no
// wall-clock fields, and the worker count is excluded on purpose.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t value);

struct ManifestInput {
    std::string path;
    std::string digest;   ///< fnv1a64 of the file bytes, hex
};

struct RunManifest {
    std::string command;              ///< canonical command line, --workers omitted
    std::string config_digest;        ///< fnv1a64 of `command`, hex
    std::vector<ManifestInput> inputs;
    std::vector<std::uint64_t> seeds;
    std::string tool_version = kToolVersion;
};

RunManifest make_manifest(const std::string& command, const std::vector<std::string>& input_paths,
                          const std::vector<std::uint64_t>& seeds);
void write_manifest(const RunManifest& manifest, const std::string& path);
/// fit.json -> fit.manifest.json (alongside the primary output)
std::string manifest_path_for(const std::string& output_path);

// ---------------------------------------------------------------------------
// Synthetic datasets
// ---------------------------------------------------------------------------

struct SynthConfig {
    std::vector<int> group_sizes = {10, 10, 10, 10, 10};
    /// empty probabilities: the preset intra/inter mix below is used
    BlockMatrix blocks;
    ModelParams ground_truth{0.365, 0.14, 427.0, TimeUnit::decade};
    int months = 1560;
    MonthLabel start{2000, 1};
    long burn_in = 240;      ///< pre-series transitions, discarded
    double likelihood_lo = 2.5, likelihood_hi = 4.5;   ///< half-step score grid
    double stddev_lo = 0.02, stddev_hi = 0.10;
    std::uint64_t seed = 1;

    int n() const;
};

/// Default block mix for the preset 5-group shape: intra 0.65/0.55/0.55/
/// 0.45/0.35, inter 0.40 throughout.
BlockMatrix default_blocks(const std::vector<int>& group_sizes);

void validate_synth_config(const SynthConfig& config);

struct SynthDataset {
    RiskCatalog catalog;
    InfluenceGraph graph;
    HistoricalSeries history;
    ModelParams ground_truth;
};

/// Catalog scores on the half-step grid, graph from the block model, history
/// simulated from the ground truth after a discarded burn-in, all derived
/// deterministically from config.seed.
SynthDataset synth_dataset(const SynthConfig& config);

/// Writes risks.csv, edges.csv, history.csv, params.json and manifest.json
/// into out_dir (which must exist). `command` goes into the manifest verbatim.
SynthDataset write_synth_dataset(const SynthConfig& config, const std::string& out_dir,
                                 const std::string& command);

} // namespace riskdyn

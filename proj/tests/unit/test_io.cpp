#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskdyn/errors.hpp"
#include "riskdyn/fit.hpp"
#include "riskdyn/io.hpp"

#include "oracles.hpp"

using namespace riskdyn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("riskdyn_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

RiskCatalog tiny_catalog() {
    return RiskCatalog{{
        {1, "asset collapse", RiskGroup::economic, 3.5, 0.07},
        {2, "extreme weather", RiskGroup::environmental, 4.0, 0.1},
        {3, "interstate conflict", RiskGroup::geopolitical, 2.5, 0.0},
    }};
}

HistoricalSeries tiny_history() {
    const std::vector<MonthLabel> months = {{2009, 11}, {2009, 12}, {2010, 1}};
    const std::vector<std::uint8_t> states = {0, 1, 0, 1, 1, 0, 0, 1, 1};
    return HistoricalSeries(months, states, 3);
}

} // namespace

TEST_CASE("double formatting is shortest and round-trips exactly") {
    for (double v : {0.1, 1e-5, 1.0 / 3.0, 427.0, 0.365 / 120.0, -2.25, 0.0, 1e300,
                     0.0030416666666666665}) {
        const std::string s = format_double(v);
        CHECK(parse_double(s, "test") == v);
    }
    CHECK(format_double(427.0) == "427");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.25) == "-2.25");
    CHECK(format_double(1e-5) == "1e-05");

    CHECK_THROWS_AS(parse_double("1.5x", "test"), ValidationError);
    CHECK_THROWS_AS(parse_double("", "test"), ValidationError);
    CHECK_THROWS_AS(parse_double("   1.5", "test"), ValidationError);
}

TEST_CASE("catalog save-load-save is byte identical") {
    const fs::path dir = fresh_dir("catalog");
    const fs::path p1 = dir / "a.csv", p2 = dir / "b.csv";
    save_catalog(tiny_catalog(), p1.string());
    const RiskCatalog back = load_catalog(p1.string());
    save_catalog(back, p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(back.size() == 3);
    CHECK(back.record(2).name == "extreme weather");
    CHECK(back.record(2).group == RiskGroup::environmental);
    CHECK(back.record(1).likelihood == 3.5);
    CHECK(back.record(3).stddev == 0.0);

    const std::string text = slurp(p1);
    CHECK(text.substr(0, text.find('\n')) == "id,name,group,likelihood,stddev");
}

TEST_CASE("catalog loader reports the offending line") {
    const fs::path dir = fresh_dir("catalog_err");
    const fs::path p = dir / "risks.csv";

    spit(p, "id,name,group,likelihood\n");
    CHECK_THROWS_WITH_AS(load_catalog(p.string()), doctest::Contains(":1:"), ValidationError);

    spit(p, "id,name,group,likelihood,stddev\n1,a,economic,3.0,0.1\n2,b,economic,7.0,0.1\n");
    CHECK_THROWS_WITH_AS(load_catalog(p.string()), doctest::Contains("likelihood"),
                         ValidationError);

    spit(p, "id,name,group,likelihood,stddev\n1,a,economic,3.0\n");
    CHECK_THROWS_WITH_AS(load_catalog(p.string()), doctest::Contains(":2:"), ValidationError);

    spit(p, "id,name,group,likelihood,stddev\n1,a,mythic,3.0,0.1\n");
    CHECK_THROWS_AS(load_catalog(p.string()), ValidationError);

    spit(p, "id,name,group,likelihood,stddev\n2,a,economic,3.0,0.1\n");
    CHECK_THROWS_AS(load_catalog(p.string()), ValidationError);   // ids must start at 1

    spit(p, "id,name,group,likelihood,stddev\n1,a,economic,3.0,0.1\n3,b,economic,3.0,0.1\n");
    CHECK_THROWS_AS(load_catalog(p.string()), ValidationError);   // gap in ids

    spit(p, "id,name,group,likelihood,stddev\n1,,economic,3.0,0.1\n");
    CHECK_THROWS_AS(load_catalog(p.string()), ValidationError);

    CHECK_THROWS_AS(load_catalog((dir / "absent.csv").string()), ValidationError);

    // names a writer could not reproduce are rejected up front
    RiskCatalog bad{{{1, "a,b", RiskGroup::economic, 3.0, 0.1}}};
    CHECK_THROWS_AS(save_catalog(bad, (dir / "out.csv").string()), ValidationError);
}

TEST_CASE("graph save-load-save is byte identical and infers n") {
    const fs::path dir = fresh_dir("graph");
    const fs::path p1 = dir / "a.csv", p2 = dir / "b.csv";
    const InfluenceGraph g(5, {{1, 2, 1}, {2, 5, 3}, {3, 4, 2}});
    save_graph(g, p1.string());
    const InfluenceGraph back = load_graph(p1.string(), 5);
    save_graph(back, p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(back.size() == 5);
    CHECK(back.edge_count() == 3);
    CHECK(back.weight(1, 4) == 3);

    const InfluenceGraph inferred = load_graph(p1.string());
    CHECK(inferred.size() == 5);   // largest mentioned id

    spit(p1, "source,target,weight\n");
    CHECK_THROWS_WITH_AS(load_graph(p1.string()), doctest::Contains("cannot infer"),
                         ValidationError);
    CHECK(load_graph(p1.string(), 4).size() == 4);   // explicit n tolerates empty lists

    spit(p1, "source,target,weight\n2,1,1\n");
    CHECK_THROWS_AS(load_graph(p1.string(), 3), ValidationError);   // source < target

    spit(p1, "source,target,weight\n1,1,1\n");
    CHECK_THROWS_AS(load_graph(p1.string(), 3), ValidationError);

    spit(p1, "source,target,weight\n1,4,1\n");
    CHECK_THROWS_AS(load_graph(p1.string(), 3), ValidationError);

    spit(p1, "source,target,weight\n1,2,1\n1,2,1\n");
    CHECK_THROWS_WITH_AS(load_graph(p1.string(), 3), doctest::Contains("duplicate edge"),
                         ValidationError);

    spit(p1, "source,target\n1,2\n");
    CHECK_THROWS_WITH_AS(load_graph(p1.string(), 3), doctest::Contains(":1:"), ValidationError);
}

TEST_CASE("history save-load-save is byte identical") {
    const fs::path dir = fresh_dir("history");
    const fs::path p1 = dir / "a.csv", p2 = dir / "b.csv";
    save_history(tiny_history(), p1.string());
    const HistoricalSeries back = load_history(p1.string());
    save_history(back, p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(back.months_count() == 3);
    CHECK(back.risks_count() == 3);
    CHECK(back.months().front().str() == "2009-11");
    CHECK(back.months().back().str() == "2010-01");   // year rollover preserved
    CHECK(back.state(1, 0) == 1);
    CHECK(back.state(2, 2) == 1);

    const std::string text = slurp(p1);
    CHECK(text.substr(0, text.find('\n')) == "month,r1,r2,r3");
}

TEST_CASE("history loader enforces consecutive months and binary cells") {
    const fs::path dir = fresh_dir("history_err");
    const fs::path p = dir / "history.csv";

    spit(p, "month,r1,r2\n2000-01,0,1\n2000-03,1,1\n");
    CHECK_THROWS_WITH_AS(load_history(p.string()), doctest::Contains("2000-03"), ValidationError);

    spit(p, "month,r1,r2\n2000-01,0,2\n");
    CHECK_THROWS_WITH_AS(load_history(p.string()), doctest::Contains(":2:"), ValidationError);

    spit(p, "month,r1,r2\n2000-01,0, 1\n");
    CHECK_THROWS_AS(load_history(p.string()), ValidationError);   // cells are exactly 0 or 1

    spit(p, "month,r1,r3\n2000-01,0,1\n");
    CHECK_THROWS_WITH_AS(load_history(p.string()), doctest::Contains(":1:"), ValidationError);

    spit(p, "month,r1,r2\n2000-13,0,1\n");
    CHECK_THROWS_AS(load_history(p.string()), ValidationError);

    spit(p, "month,r1,r2\n");
    CHECK_THROWS_AS(load_history(p.string()), ValidationError);   // no rows
}

TEST_CASE("params json round-trips and rejects unknown or missing keys") {
    const fs::path dir = fresh_dir("params");
    const fs::path p1 = dir / "a.json", p2 = dir / "b.json";
    const ModelParams params{0.365, 0.14, 427.0, TimeUnit::decade};
    save_params(params, p1.string());
    const ModelParams back = load_params(p1.string());
    save_params(back, p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(back.alpha == 0.365);
    CHECK(back.beta == 0.14);
    CHECK(back.gamma == 427.0);
    CHECK(back.time_unit == TimeUnit::decade);

    spit(p1, R"({"alpha":1.0,"beta":0.1,"gamma":2.0})");
    CHECK_THROWS_AS(load_params(p1.string()), ValidationError);

    spit(p1, R"({"alpha":1.0,"beta":0.1,"gamma":2.0,"time_unit":"month","extra":1})");
    CHECK_THROWS_WITH_AS(load_params(p1.string()), doctest::Contains("extra"), ValidationError);

    spit(p1, R"({"alpha":1.0,"beta":0.1,"gamma":2.0,"time_unit":"fortnight"})");
    CHECK_THROWS_AS(load_params(p1.string()), ValidationError);

    spit(p1, R"({"alpha":0.0,"beta":0.1,"gamma":2.0,"time_unit":"month"})");
    CHECK_THROWS_AS(load_params(p1.string()), ValidationError);   // alpha must be > 0

    spit(p1, "[1,2,3]");
    CHECK_THROWS_AS(load_params(p1.string()), ValidationError);

    spit(p1, "{not json");
    CHECK_THROWS_AS(load_params(p1.string()), ValidationError);
}

TEST_CASE("cross checks compare risk counts") {
    const RiskCatalog catalog = tiny_catalog();
    cross_check(catalog, InfluenceGraph(3, {{1, 2, 1}}));
    cross_check(catalog, tiny_history());
    CHECK_THROWS_AS(cross_check(catalog, InfluenceGraph(4, {{1, 2, 1}})), ValidationError);
    const HistoricalSeries wide({{2000, 1}}, {0, 0, 0, 0}, 4);
    CHECK_THROWS_AS(cross_check(catalog, wide), ValidationError);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
    CHECK(hex64(~0ULL) == "ffffffffffffffff");

    const fs::path dir = fresh_dir("digest");
    spit(dir / "f.bin", "foobar");
    CHECK(fnv1a64_file((dir / "f.bin").string()) == 0x85944171f73967e8ULL);
    CHECK_THROWS_AS(fnv1a64_file((dir / "absent.bin").string()), ValidationError);
}

TEST_CASE("manifest paths derive from the primary output") {
    CHECK(manifest_path_for("out/fit.json") == "out/fit.manifest.json");
    CHECK(manifest_path_for("fit.json") == "fit.manifest.json");
    CHECK(manifest_path_for("results") == "results.manifest.json");
    CHECK(manifest_path_for("dir.with.dot/file") == "dir.with.dot/file.manifest.json");
    CHECK(manifest_path_for("a/b.c/x.y.z") == "a/b.c/x.y.manifest.json");
}

TEST_CASE("manifests capture command, inputs and seeds without timestamps") {
    const fs::path dir = fresh_dir("manifest");
    spit(dir / "in.csv", "foobar");
    const std::string command = "riskdyn fit --risks in.csv --alpha 0.5";
    const RunManifest m =
        make_manifest(command, {(dir / "in.csv").string()}, {5, 7});
    CHECK(m.command == command);
    CHECK(m.config_digest == hex64(fnv1a64(command.data(), command.size())));
    REQUIRE(m.inputs.size() == 1);
    CHECK(m.inputs[0].digest == hex64(0x85944171f73967e8ULL));
    CHECK(m.seeds == std::vector<std::uint64_t>{5, 7});
    CHECK(m.tool_version == kToolVersion);

    const fs::path mp = dir / "run.manifest.json";
    write_manifest(m, mp.string());
    const nlohmann::json j = nlohmann::json::parse(slurp(mp));
    REQUIRE(j.is_object());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"command", "config_digest", "inputs", "seeds",
                                           "tool_version"});
    CHECK(j["command"] == command);
    CHECK(j["inputs"][0]["path"] == (dir / "in.csv").string());
    CHECK(j["seeds"][0] == 5);
}

TEST_CASE("synthetic datasets are deterministic on disk") {
    SynthConfig cfg;
    cfg.group_sizes = {4, 3};
    cfg.months = 36;
    cfg.burn_in = 12;
    cfg.seed = 3;

    const fs::path d1 = fresh_dir("synth1");
    const fs::path d2 = fresh_dir("synth2");
    const SynthDataset ds = write_synth_dataset(cfg, d1.string(), "riskdyn synth --seed 3");
    write_synth_dataset(cfg, d2.string(), "riskdyn synth --seed 3");
    for (const char* name : {"risks.csv", "edges.csv", "history.csv", "params.json",
                             "manifest.json"})
        CHECK(slurp(d1 / name) == slurp(d2 / name));

    CHECK(ds.catalog.size() == 7);
    CHECK(ds.history.months_count() == 36);
    CHECK(ds.history.risks_count() == 7);
    CHECK(ds.history.months().front() == cfg.start);
    for (const RiskRecord& r : ds.catalog.entries()) {
        CHECK(r.likelihood >= cfg.likelihood_lo);
        CHECK(r.likelihood <= cfg.likelihood_hi);
        const double steps = (r.likelihood - cfg.likelihood_lo) * 2.0;
        CHECK(steps == doctest::Approx(std::round(steps)).epsilon(1e-12));
        CHECK(r.stddev >= cfg.stddev_lo);
        CHECK(r.stddev <= cfg.stddev_hi);
        CHECK(r.group == (r.id <= 4 ? RiskGroup::economic : RiskGroup::environmental));
    }
    CHECK(ds.catalog.record(1).name == "risk_1");
    CHECK(ds.catalog.record(7).name == "risk_7");

    const ModelParams truth = load_params((d1 / "params.json").string());
    CHECK(truth.alpha == cfg.ground_truth.alpha);
    CHECK(truth.beta == cfg.ground_truth.beta);
    CHECK(truth.gamma == cfg.ground_truth.gamma);
    CHECK(truth.time_unit == TimeUnit::decade);

    // the two-digit width pads
    SynthConfig wide = cfg;
    wide.group_sizes = {8, 8};
    CHECK(synth_dataset(wide).catalog.record(3).name == "risk_03");

    SynthConfig bad = cfg;
    bad.months = 12;
    CHECK_THROWS_AS(validate_synth_config(bad), ValidationError);
    bad = cfg;
    bad.likelihood_lo = 2.3;
    CHECK_THROWS_AS(validate_synth_config(bad), ValidationError);
    bad = cfg;
    bad.group_sizes = {1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(validate_synth_config(bad), ValidationError);
}

TEST_CASE("synthetic histories decouple neighbors when influence is zero") {
    SynthConfig cfg;
    cfg.group_sizes = {12};
    cfg.months = 900;
    cfg.burn_in = 60;
    cfg.seed = 11;
    cfg.likelihood_lo = cfg.likelihood_hi = 3.5;   // one shared vulnerability
    cfg.ground_truth = {0.365, 0.0, 427.0, TimeUnit::decade};

    const SynthDataset ds = synth_dataset(cfg);
    const TransitionCounts counts = TransitionCounts::build(ds.history, ds.graph);
    double on0 = 0, off0 = 0, on1 = 0, off1 = 0;
    for (std::size_t i = 0; i < counts.by_neighbors.size(); ++i) {
        for (std::size_t k = 0; k < counts.by_neighbors[i].size(); ++k) {
            const auto& cell = counts.by_neighbors[i][k];
            (k == 0 ? on0 : on1) += static_cast<double>(cell[0]);
            (k == 0 ? off0 : off1) += static_cast<double>(cell[1]);
        }
    }
    const double n0 = on0 + off0, n1 = on1 + off1;
    REQUIRE(n0 > 100);
    REQUIRE(n1 > 100);
    const double p0 = on0 / n0, p1 = on1 / n1;
    const double pooled = (on0 + on1) / (n0 + n1);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n0 + 1.0 / n1));
    CHECK(std::abs(p1 - p0) < 4.0 * se);

    // and the activation rate is the configured internal probability
    const double p_expect = internal_probability(
        normalize_likelihood(3.5), to_monthly(cfg.ground_truth).alpha);
    CHECK(oracles::binomial_z(pooled, p_expect, n0 + n1) < 4.0);
}

TEST_CASE("shipped sample dataset loads and cross-checks") {
    const std::string dir = RISKDYN_SAMPLE_DIR;
    const RiskCatalog catalog = load_catalog(dir + "/risks.csv");
    REQUIRE(catalog.size() == 50);
    CHECK(catalog.record(1).group == RiskGroup::economic);
    CHECK(catalog.record(50).group == RiskGroup::technological);

    const InfluenceGraph graph = load_graph(dir + "/edges.csv", 50);
    const HistoricalSeries history = load_history(dir + "/history.csv");
    CHECK(history.months_count() == 156);
    CHECK(history.months().front().str() == "2009-01");
    cross_check(catalog, graph);
    cross_check(catalog, history);

    const ModelParams params = load_params(dir + "/params.json");
    CHECK(params.time_unit == TimeUnit::decade);
}

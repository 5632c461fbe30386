#include "riskdyn/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& msg) {
    throw ValidationError(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string all = buf.str();
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < all.size()) {
        std::size_t nl = all.find('\n', pos);
        if (nl == std::string::npos) nl = all.size();
        std::string line = all.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(',', pos);
        if (c == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    return fields;
}

long parse_long(const std::string& text, const std::string& path, std::size_t line) {
    long v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        fail_at(path, line, "expected an integer, got '" + text + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw NumericalError("cannot format double");
    return std::string(buf, p);
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ValidationError(where + ": expected a number, got '" + text + "'");
    return v;
}

// ---------------------------------------------------------------------------
// risks.csv
// ---------------------------------------------------------------------------

RiskCatalog load_catalog(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) fail_at(path, 1, "empty file");
    if (lines[0] != "id,name,group,likelihood,stddev")
        fail_at(path, 1, "expected header 'id,name,group,likelihood,stddev'");
    std::vector<RiskRecord> records;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv(lines[ln]);
        if (fields.size() != 5)
            fail_at(path, ln + 1, "expected 5 fields, got " + std::to_string(fields.size()));
        RiskRecord r;
        r.id = static_cast<int>(parse_long(fields[0], path, ln + 1));
        r.name = fields[1];
        try {
            r.group = parse_group(fields[2]);
            r.likelihood = parse_double(fields[3], "likelihood");
            r.stddev = parse_double(fields[4], "stddev");
        } catch (const ValidationError& e) {
            fail_at(path, ln + 1, e.what());
        }
        records.push_back(std::move(r));
    }
    return RiskCatalog(std::move(records));
}

void save_catalog(const RiskCatalog& catalog, const std::string& path) {
    auto out = open_out(path);
    out << "id,name,group,likelihood,stddev\n";
    for (const RiskRecord& r : catalog.entries()) {
        if (r.name.find(',') != std::string::npos || r.name.find('\n') != std::string::npos)
            throw ValidationError("risk name '" + r.name + "' contains a separator");
        out << r.id << ',' << r.name << ',' << group_name(r.group) << ','
            << format_double(r.likelihood) << ',' << format_double(r.stddev) << '\n';
    }
}

// ---------------------------------------------------------------------------
// edges.csv
// ---------------------------------------------------------------------------

namespace {

std::vector<Edge> load_edge_rows(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) fail_at(path, 1, "empty file");
    if (lines[0] != "source,target,weight")
        fail_at(path, 1, "expected header 'source,target,weight'");
    std::vector<Edge> edges;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv(lines[ln]);
        if (fields.size() != 3)
            fail_at(path, ln + 1, "expected 3 fields, got " + std::to_string(fields.size()));
        Edge e;
        e.source = static_cast<int>(parse_long(fields[0], path, ln + 1));
        e.target = static_cast<int>(parse_long(fields[1], path, ln + 1));
        const long w = parse_long(fields[2], path, ln + 1);
        if (w < 0) fail_at(path, ln + 1, "weight must be >= 0");
        e.weight = static_cast<std::uint32_t>(w);
        edges.push_back(e);
    }
    return edges;
}

} // namespace

InfluenceGraph load_graph(const std::string& path, int n) {
    return InfluenceGraph(n, load_edge_rows(path));
}

InfluenceGraph load_graph(const std::string& path) {
    const std::vector<Edge> edges = load_edge_rows(path);
    int n = 0;
    for (const Edge& e : edges) n = std::max({n, e.source, e.target});
    if (n == 0)
        throw ValidationError(path + ": cannot infer the node count from an empty edge list");
    return InfluenceGraph(n, edges);
}

void save_graph(const InfluenceGraph& graph, const std::string& path) {
    auto out = open_out(path);
    out << "source,target,weight\n";
    for (const Edge& e : graph.edges())
        out << e.source << ',' << e.target << ',' << e.weight << '\n';
}

// ---------------------------------------------------------------------------
// history.csv
// ---------------------------------------------------------------------------

HistoricalSeries load_history(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) fail_at(path, 1, "empty file");
    const auto header = split_csv(lines[0]);
    if (header.size() < 2 || header[0] != "month")
        fail_at(path, 1, "expected header 'month,r1,...,rN'");
    const int n = static_cast<int>(header.size()) - 1;
    for (int i = 0; i < n; ++i)
        if (header[static_cast<std::size_t>(i) + 1] != "r" + std::to_string(i + 1))
            fail_at(path, 1, "risk columns must be named r1..rN in order");

    std::vector<MonthLabel> months;
    std::vector<std::uint8_t> states;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv(lines[ln]);
        if (fields.size() != static_cast<std::size_t>(n) + 1)
            fail_at(path, ln + 1,
                    "expected " + std::to_string(n + 1) + " fields, got " +
                        std::to_string(fields.size()));
        try {
            months.push_back(MonthLabel::parse(fields[0]));
        } catch (const ValidationError& e) {
            fail_at(path, ln + 1, e.what());
        }
        for (int i = 0; i < n; ++i) {
            const std::string& cell = fields[static_cast<std::size_t>(i) + 1];
            if (cell == "0")
                states.push_back(0);
            else if (cell == "1")
                states.push_back(1);
            else
                fail_at(path, ln + 1, "state cells must be 0 or 1, got '" + cell + "'");
        }
    }
    return HistoricalSeries(std::move(months), std::move(states), n);
}

void save_history(const HistoricalSeries& history, const std::string& path) {
    auto out = open_out(path);
    out << "month";
    for (int i = 1; i <= history.risks_count(); ++i) out << ",r" << i;
    out << '\n';
    for (int t = 0; t < history.months_count(); ++t) {
        out << history.months()[static_cast<std::size_t>(t)].str();
        for (int i = 0; i < history.risks_count(); ++i)
            out << ',' << static_cast<int>(history.state(t, i));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// params.json
// ---------------------------------------------------------------------------

ModelParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(path + ": expected a JSON object");
    for (const auto& key : {"alpha", "beta", "gamma", "time_unit"})
        if (!j.contains(key))
            throw ValidationError(path + ": missing key '" + std::string(key) + "'");
    for (const auto& [key, value] : j.items())
        if (key != "alpha" && key != "beta" && key != "gamma" && key != "time_unit")
            throw ValidationError(path + ": unexpected key '" + key + "'");
    ModelParams p;
    try {
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.gamma = j.at("gamma").get<double>();
        p.time_unit = parse_time_unit(j.at("time_unit").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    validate_params(p);
    return p;
}

void save_params(const ModelParams& params, const std::string& path) {
    json j;
    j["alpha"] = params.alpha;
    j["beta"] = params.beta;
    j["gamma"] = params.gamma;
    j["time_unit"] = time_unit_name(params.time_unit);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Cross-checks
// ---------------------------------------------------------------------------

void cross_check(const RiskCatalog& catalog, const InfluenceGraph& graph) {
    if (catalog.size() != graph.size())
        throw ValidationError("catalog has " + std::to_string(catalog.size()) +
                              " risks but the graph has " + std::to_string(graph.size()) +
                              " nodes");
}

void cross_check(const RiskCatalog& catalog, const HistoricalSeries& history) {
    if (catalog.size() != history.risks_count())
        throw ValidationError("catalog has " + std::to_string(catalog.size()) +
                              " risks but the history has " +
                              std::to_string(history.risks_count()) + " columns");
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for digesting");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string all = buf.str();
    return fnv1a64(all.data(), all.size());
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return s;
}

RunManifest make_manifest(const std::string& command, const std::vector<std::string>& input_paths,
                          const std::vector<std::uint64_t>& seeds) {
    RunManifest m;
    m.command = command;
    m.config_digest = hex64(fnv1a64(command.data(), command.size()));
    for (const std::string& p : input_paths) m.inputs.push_back({p, hex64(fnv1a64_file(p))});
    m.seeds = seeds;
    return m;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    j["inputs"] = json::array();
    for (const ManifestInput& in : manifest.inputs)
        j["inputs"].push_back({{"path", in.path}, {"digest", in.digest}});
    j["seeds"] = manifest.seeds;
    j["tool_version"] = manifest.tool_version;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string manifest_path_for(const std::string& output_path) {
    const std::size_t slash = output_path.find_last_of('/');
    const std::size_t dot = output_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return output_path + ".manifest.json";
    return output_path.substr(0, dot) + ".manifest.json";
}

} // namespace riskdyn

#include "netgrow/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netgrow {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string serialize_graph(const Graph& g, const std::vector<double>& theta) {
    std::string out = "{\"n\":" + std::to_string(g.num_nodes()) + ",\"edges\":[";
    bool first = true;
    for (node_t u = 0; u < g.num_nodes(); ++u) {
        for (node_t v : g.neighbors(u)) {
            if (v <= u) continue;
            if (!first) out += ',';
            first = false;
            out += '[';
            out += std::to_string(u);
            out += ',';
            out += std::to_string(v);
            out += ']';
        }
    }
    out += ']';
    if (!theta.empty()) {
        out += ",\"theta\":[";
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (i) out += ',';
            out += format_double(theta[i]);
        }
        out += ']';
    }
    out += '}';
    return out;
}

GraphRecord parse_graph_record(const std::string& line, int line_number) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
        throw ParseError(line_number, "record must be an object with \"n\" and \"edges\"");
    }
    if (!j["n"].is_number_integer()) throw ParseError(line_number, "\"n\" must be an integer");
    long long n = j["n"].get<long long>();
    if (n < 0 || n > (1ll << 30)) throw ParseError(line_number, "\"n\" out of range");
    if (!j["edges"].is_array()) throw ParseError(line_number, "\"edges\" must be an array");

    GraphBuilder b(static_cast<node_t>(n));
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw ParseError(line_number, "edge entries must be integer pairs");
        }
        long long u = e[0].get<long long>();
        long long v = e[1].get<long long>();
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw ParseError(line_number, "edge endpoint out of range");
        }
        if (u >= v) throw ParseError(line_number, "edges must satisfy u < v");
        if (!b.add_edge(static_cast<node_t>(u), static_cast<node_t>(v))) {
            throw ParseError(line_number, "duplicate edge");
        }
    }

    GraphRecord rec;
    rec.graph = std::move(b).build();
    if (j.contains("theta")) {
        if (!j["theta"].is_array()) throw ParseError(line_number, "\"theta\" must be an array");
        for (const auto& t : j["theta"]) {
            if (!t.is_number()) throw ParseError(line_number, "\"theta\" entries must be numbers");
            rec.theta.push_back(t.get<double>());
        }
    }
    return rec;
}

std::vector<GraphRecord> read_records(std::istream& in) {
    std::vector<GraphRecord> records;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        records.push_back(parse_graph_record(line, line_number));
    }
    return records;
}

std::vector<GraphRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_records(in);
}

void write_records_file(const std::string& path, const std::vector<GraphRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& rec : records) {
        out << serialize_graph(rec.graph, rec.theta) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace netgrow

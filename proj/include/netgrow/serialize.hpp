// serialize.hpp — JSON-lines graph records shared by datasets and the CLI.
//
// Canonical record: {"n":N,"edges":[[u,v],...]} with u < v and edges sorted
// lexicographically, optionally followed by "theta":[...]. Serialization is
// byte-stable so datasets can be diffed and hashed.
#ifndef NETGROW_SERIALIZE_HPP_
#define NETGROW_SERIALIZE_HPP_

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netgrow/graph.hpp"

namespace netgrow {

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

struct GraphRecord {
    Graph graph;
    std::vector<double> theta;  // empty when absent
};

// One JSON object, no trailing newline.
std::string serialize_graph(const Graph& g, const std::vector<double>& theta = {});

// line_number is used for error reporting only.
GraphRecord parse_graph_record(const std::string& line, int line_number = 1);

std::vector<GraphRecord> read_records(std::istream& in);
std::vector<GraphRecord> read_records_file(const std::string& path);
void write_records_file(const std::string& path, const std::vector<GraphRecord>& records);

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

}  // namespace netgrow

#endif  // NETGROW_SERIALIZE_HPP_

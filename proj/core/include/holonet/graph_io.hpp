#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holonet/digraph.hpp"

namespace holonet {

// Text edge lists, one edge per line:
//
//   # nodes 6          optional; otherwise inferred from the largest id
//   # base 1           optional; ids are 0-based unless stated
//   src <TAB> dst <TAB> weight [<TAB> tier]
//
// Other '#' lines are comments. The optional fourth column carries a tier tag
// ("regular" or "high") used by two-scale graphs. Node weights live in a
// sibling file of "id <TAB> mu" lines using the same id base.
struct EdgeRecord {
  Edge edge;
  std::optional<std::string> tier;
};

struct EdgeListFile {
  std::size_t n_nodes = 0;
  std::size_t index_base = 0;
  std::vector<EdgeRecord> records;
  std::optional<Vec> node_weights;
};

EdgeListFile parse_edge_list(std::istream& in, const std::string& source_name = "<stream>");
EdgeListFile read_edge_list(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& node_weights_path = {});

// Parses "id mu" lines into a length-n vector; ids not listed keep weight 1.
Vec parse_node_weights(std::istream& in, std::size_t n_nodes, std::size_t index_base,
                       const std::string& source_name = "<stream>");

// Reads a plain graph; tier tags, if present, are ignored.
DiGraph read_graph(const std::filesystem::path& path,
                   const std::optional<std::filesystem::path>& node_weights_path = {});

// Default sibling node-weight file: "<stem>.weights.tsv" next to the edge file.
std::filesystem::path default_node_weights_path(const std::filesystem::path& edge_file);

void write_graph(std::ostream& edges_out, std::ostream& weights_out, const DiGraph& g,
                 std::size_t index_base = 0);

}  // namespace holonet

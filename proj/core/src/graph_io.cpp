#include "holonet/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "holonet/error.hpp"

namespace holonet {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no) + ": ";
}

std::size_t parse_index(const std::string& tok, const std::string& ctx) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(ctx + "expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

double parse_real(const std::string& tok, const std::string& ctx) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(ctx + "expected a number, got '" + tok + "'");
  }
  if (!std::isfinite(v)) throw ParseError(ctx + "non-finite value '" + tok + "'");
  return v;
}

std::size_t rebase(std::size_t id, std::size_t base, const std::string& ctx) {
  if (id < base) throw IndexOutOfRange(ctx + "node id " + std::to_string(id) + " below index base");
  return id - base;
}

}  // namespace

EdgeListFile parse_edge_list(std::istream& in, const std::string& source_name) {
  EdgeListFile out;
  std::optional<std::size_t> declared_nodes;
  std::size_t max_id = 0;
  bool any_edge = false;

  struct RawEdge {
    std::size_t src, dst, line;
    double w;
    std::optional<std::string> tier;
  };
  std::vector<RawEdge> raw;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string ctx = where(source_name, line_no);
    if (fields[0].front() == '#') {
      // "# nodes N" / "# base B"; anything else is a comment.
      std::vector<std::string> words = fields;
      if (words[0] == "#" && words.size() >= 3) {
        words.erase(words.begin());
      } else if (words[0].size() > 1) {
        words[0] = words[0].substr(1);
      } else {
        continue;
      }
      if (words.size() >= 2 && words[0] == "nodes") {
        declared_nodes = parse_index(words[1], ctx);
      } else if (words.size() >= 2 && words[0] == "base") {
        out.index_base = parse_index(words[1], ctx);
        if (out.index_base > 1) throw ParseError(ctx + "index base must be 0 or 1");
      }
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(ctx + "expected 'src dst weight [tier]', got " +
                       std::to_string(fields.size()) + " fields");
    }
    RawEdge e{parse_index(fields[0], ctx), parse_index(fields[1], ctx), line_no,
              parse_real(fields[2], ctx), std::nullopt};
    if (e.w < 0.0) throw NegativeWeight(ctx + "negative edge weight " + fields[2]);
    if (fields.size() == 4) {
      if (fields[3] != "regular" && fields[3] != "high") {
        throw ParseError(ctx + "tier must be 'regular' or 'high', got '" + fields[3] + "'");
      }
      e.tier = fields[3];
    }
    max_id = std::max({max_id, e.src, e.dst});
    any_edge = true;
    raw.push_back(std::move(e));
  }

  if (declared_nodes) {
    out.n_nodes = *declared_nodes;
  } else {
    out.n_nodes = any_edge ? max_id + 1 - std::min(max_id + 1, out.index_base) : 0;
  }
  for (auto& r : raw) {
    const std::string ctx = where(source_name, r.line);
    EdgeRecord rec;
    rec.edge = Edge{rebase(r.src, out.index_base, ctx), rebase(r.dst, out.index_base, ctx), r.w};
    if (rec.edge.src >= out.n_nodes || rec.edge.dst >= out.n_nodes) {
      throw IndexOutOfRange(ctx + "edge references node outside the declared " +
                            std::to_string(out.n_nodes) + " nodes");
    }
    rec.tier = std::move(r.tier);
    out.records.push_back(std::move(rec));
  }
  return out;
}

Vec parse_node_weights(std::istream& in, std::size_t n_nodes, std::size_t index_base,
                       const std::string& source_name) {
  Vec mu = Vec::Ones(static_cast<Eigen::Index>(n_nodes));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    const std::string ctx = where(source_name, line_no);
    if (fields.size() != 2) throw ParseError(ctx + "expected 'id mu'");
    const std::size_t id = rebase(parse_index(fields[0], ctx), index_base, ctx);
    if (id >= n_nodes) throw IndexOutOfRange(ctx + "node id outside graph");
    const double m = parse_real(fields[1], ctx);
    if (!(m > 0.0)) throw NonpositiveNodeWeight(ctx + "node weight must be positive");
    mu(static_cast<Eigen::Index>(id)) = m;
  }
  return mu;
}

std::filesystem::path default_node_weights_path(const std::filesystem::path& edge_file) {
  auto p = edge_file;
  p.replace_extension();
  p += ".weights.tsv";
  return p;
}

EdgeListFile read_edge_list(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& node_weights_path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path.string() + "'");
  EdgeListFile file = parse_edge_list(in, path.string());

  std::filesystem::path wpath = node_weights_path.value_or(default_node_weights_path(path));
  if (node_weights_path || std::filesystem::exists(wpath)) {
    std::ifstream win(wpath);
    if (!win) throw InputError("cannot open node weight file '" + wpath.string() + "'");
    file.node_weights = parse_node_weights(win, file.n_nodes, file.index_base, wpath.string());
  }
  return file;
}

DiGraph read_graph(const std::filesystem::path& path,
                   const std::optional<std::filesystem::path>& node_weights_path) {
  EdgeListFile file = read_edge_list(path, node_weights_path);
  std::vector<Edge> edges;
  edges.reserve(file.records.size());
  for (const auto& r : file.records) edges.push_back(r.edge);
  return build_graph(file.n_nodes, edges, file.node_weights);
}

void write_graph(std::ostream& edges_out, std::ostream& weights_out, const DiGraph& g,
                 std::size_t index_base) {
  edges_out.precision(17);
  weights_out.precision(17);
  edges_out << "# nodes " << g.n_nodes() << "\n";
  if (index_base != 0) edges_out << "# base " << index_base << "\n";
  const Mat& w = g.adjacency();
  for (Eigen::Index src = 0; src < w.cols(); ++src) {
    for (Eigen::Index dst = 0; dst < w.rows(); ++dst) {
      if (w(dst, src) != 0.0) {
        edges_out << src + index_base << '\t' << dst + index_base << '\t' << w(dst, src) << "\n";
      }
    }
  }
  for (Eigen::Index i = 0; i < g.node_weights().size(); ++i) {
    weights_out << i + index_base << '\t' << g.node_weights()(i) << "\n";
  }
}

}  // namespace holonet

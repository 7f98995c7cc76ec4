#pragma once

// Weighted measured graphs, potentials and vertex domains.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nlsg {

using VertexIndex = std::size_t;

/// Sorted list of vertex indices without duplicates.
using VertexSet = std::vector<VertexIndex>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct Neighbor {
  VertexIndex vertex;
  double weight;
};

struct Edge {
  VertexIndex first;
  VertexIndex second;
  double weight;
};

/// Finite connected graph with positive vertex measure and symmetric
/// positive edge weights. Immutable once built.
class WeightedGraph {
public:
  WeightedGraph() = default;

  /// Throws GraphError on any broken invariant (including disconnection).
  WeightedGraph(std::vector<std::string> names, std::vector<double> mu,
                std::vector<Edge> edges)
      : names_(std::move(names)), mu_(std::move(mu)), edges_(std::move(edges)) {
    build(true);
  }

  /// Same as the checked constructor but tolerates a disconnected graph, so
  /// that validate() can report it.
  static WeightedGraph unchecked_connectivity(std::vector<std::string> names,
                                              std::vector<double> mu,
                                              std::vector<Edge> edges) {
    WeightedGraph g;
    g.names_ = std::move(names);
    g.mu_ = std::move(mu);
    g.edges_ = std::move(edges);
    g.build(false);
    return g;
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& name(VertexIndex x) const { return names_.at(x); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  VertexIndex index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end())
      throw GraphError("unknown vertex '" + std::string(name) + "'");
    return it->second;
  }
  bool contains(std::string_view name) const {
    return index_.count(std::string(name)) != 0;
  }

  double mu(VertexIndex x) const { return mu_.at(x); }
  const std::vector<double>& measures() const noexcept { return mu_; }
  double mu_min() const noexcept { return mu_min_; }
  double total_measure() const noexcept {
    double s = 0.0;
    for (double m : mu_) s += m;
    return s;
  }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Neighbor>& neighbors(VertexIndex x) const {
    return adjacency_.at(x);
  }

  /// w(x,y); zero when x and y are not adjacent.
  double weight(VertexIndex x, VertexIndex y) const {
    const auto key = std::minmax(x, y);
    auto it = edge_lookup_.find({key.first, key.second});
    return it == edge_lookup_.end() ? 0.0 : edges_[it->second].weight;
  }

  void check_vertex(VertexIndex x) const {
    if (x >= size())
      throw std::out_of_range("vertex index " + std::to_string(x) +
                              " outside graph of size " +
                              std::to_string(size()));
  }

  bool connected() const { return connected_; }

  /// Whether the induced subgraph on `set` is connected (empty sets are not).
  bool induced_connected(const VertexSet& set) const {
    if (set.empty()) return false;
    std::vector<char> in(size(), 0), seen(size(), 0);
    for (VertexIndex x : set) in[x] = 1;
    std::queue<VertexIndex> q;
    q.push(set.front());
    seen[set.front()] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      VertexIndex x = q.front();
      q.pop();
      for (const auto& nb : adjacency_[x]) {
        if (in[nb.vertex] && !seen[nb.vertex]) {
          seen[nb.vertex] = 1;
          ++reached;
          q.push(nb.vertex);
        }
      }
    }
    return reached == set.size();
  }

  VertexSet all_vertices() const {
    VertexSet s(size());
    for (VertexIndex i = 0; i < size(); ++i) s[i] = i;
    return s;
  }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    if (a.names_ != b.names_ || a.mu_ != b.mu_) return false;
    if (a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const auto& e = a.edges_[i];
      const auto& f = b.edges_[i];
      if (e.first != f.first || e.second != f.second || e.weight != f.weight)
        return false;
    }
    return true;
  }

private:
  void build(bool require_connected) {
    if (names_.empty()) throw GraphError("graph has no vertices");
    if (mu_.size() != names_.size())
      throw GraphError("measure count does not match vertex count");
    for (VertexIndex i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second)
        throw GraphError("duplicate vertex '" + names_[i] + "'");
      if (!(mu_[i] > 0.0) || !std::isfinite(mu_[i]))
        throw GraphError("measure of '" + names_[i] + "' must be positive");
    }
    mu_min_ = *std::min_element(mu_.begin(), mu_.end());
    adjacency_.assign(names_.size(), {});
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      auto& e = edges_[k];
      if (e.first >= names_.size() || e.second >= names_.size())
        throw GraphError("edge refers to a vertex outside the graph");
      if (e.first == e.second)
        throw GraphError("self-loop at '" + names_[e.first] + "'");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw GraphError("weight of edge " + names_[e.first] + "-" +
                         names_[e.second] + " must be positive");
      const auto key = std::minmax(e.first, e.second);
      if (!edge_lookup_.emplace(std::pair{key.first, key.second}, k).second)
        throw GraphError("duplicate edge " + names_[e.first] + "-" +
                         names_[e.second]);
      adjacency_[e.first].push_back({e.second, e.weight});
      adjacency_[e.second].push_back({e.first, e.weight});
    }
    connected_ = induced_connected(all_vertices());
    if (require_connected && !connected_)
      throw GraphError("graph is not connected");
  }

  std::vector<std::string> names_;
  std::vector<double> mu_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::map<std::pair<VertexIndex, VertexIndex>, std::size_t> edge_lookup_;
  std::unordered_map<std::string, VertexIndex> index_;
  double mu_min_ = 0.0;
  bool connected_ = false;
};

/// Nonnegative potential a(x), one value per vertex.
struct Potential {
  std::vector<double> values;

  double operator[](VertexIndex x) const { return values.at(x); }
  std::size_t size() const noexcept { return values.size(); }
  bool is_zero() const {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return v == 0.0; });
  }
  friend bool operator==(const Potential&, const Potential&) = default;
};

/// Vertex subset together with its outer vertex boundary.
struct Domain {
  VertexSet interior;
  VertexSet boundary;

  VertexSet closure() const {
    VertexSet c;
    std::merge(interior.begin(), interior.end(), boundary.begin(),
               boundary.end(), std::back_inserter(c));
    return c;
  }
  bool contains(VertexIndex x) const {
    return std::binary_search(interior.begin(), interior.end(), x);
  }
  friend bool operator==(const Domain&, const Domain&) = default;
};

struct ValidationReport {
  bool measures_positive = true;
  bool weights_positive = true;
  bool weights_symmetric = true;
  bool connected = true;
  double mu_min = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

inline ValidationReport validate(const WeightedGraph& graph) {
  ValidationReport r;
  r.mu_min = std::numeric_limits<double>::infinity();
  for (VertexIndex x = 0; x < graph.size(); ++x) {
    r.mu_min = std::min(r.mu_min, graph.mu(x));
    if (!(graph.mu(x) > 0.0)) r.measures_positive = false;
    for (const auto& nb : graph.neighbors(x)) {
      if (!(nb.weight > 0.0)) r.weights_positive = false;
      if (graph.weight(nb.vertex, x) != nb.weight) r.weights_symmetric = false;
    }
  }
  r.connected = graph.connected();
  if (!r.measures_positive) r.failures.push_back("non-positive measure");
  if (!r.weights_positive) r.failures.push_back("non-positive weight");
  if (!r.weights_symmetric) r.failures.push_back("asymmetric weight");
  if (!r.connected) r.failures.push_back("graph is not connected");
  return r;
}

inline VertexSet make_vertex_set(const WeightedGraph& graph,
                                 std::vector<VertexIndex> vertices) {
  for (VertexIndex x : vertices) graph.check_vertex(x);
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

inline VertexSet make_vertex_set(const WeightedGraph& graph,
                                 const std::vector<std::string>& names) {
  std::vector<VertexIndex> idx;
  idx.reserve(names.size());
  for (const auto& n : names) idx.push_back(graph.index_of(n));
  return make_vertex_set(graph, std::move(idx));
}

/// ∂Ω = { y ∉ Ω : y has a neighbor in Ω }.
inline Domain boundary(const WeightedGraph& graph,
                       std::vector<VertexIndex> interior) {
  if (interior.empty()) throw GraphError("domain interior is empty");
  Domain d;
  d.interior = make_vertex_set(graph, std::move(interior));
  std::vector<char> in(graph.size(), 0), bd(graph.size(), 0);
  for (VertexIndex x : d.interior) in[x] = 1;
  for (VertexIndex x : d.interior)
    for (const auto& nb : graph.neighbors(x))
      if (!in[nb.vertex]) bd[nb.vertex] = 1;
  for (VertexIndex y = 0; y < graph.size(); ++y)
    if (bd[y]) d.boundary.push_back(y);
  return d;
}

inline Domain boundary(const WeightedGraph& graph,
                       const std::vector<std::string>& interior) {
  return boundary(graph, make_vertex_set(graph, interior));
}

/// Ω = { x : a(x) = 0 }, required non-empty and connected.
inline Domain potential_well(const WeightedGraph& graph,
                             const Potential& potential) {
  if (potential.size() != graph.size())
    throw GraphError("potential size does not match graph");
  VertexSet zeros;
  for (VertexIndex x = 0; x < graph.size(); ++x) {
    if (potential[x] < 0.0) throw GraphError("potential must be nonnegative");
    if (potential[x] == 0.0) zeros.push_back(x);
  }
  if (zeros.empty()) throw GraphError("potential well is empty");
  if (!graph.induced_connected(zeros))
    throw GraphError("potential well is not connected");
  return boundary(graph, std::move(zeros));
}

struct GraphWithPotential {
  WeightedGraph graph;
  Potential potential;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view tok, std::size_t line,
                         const char* what) {
  std::string s(tok);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("invalid ") + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v))
    throw ParseError(line, std::string("invalid ") + what + " '" + s + "'");
  return v;
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

/// Reads the line-oriented graph format:
///   vertex <id> <mu> <a>
///   edge <id1> <id2> <w>
/// with `#` comments. Vertex order is file order.
inline GraphWithPotential parse_graph(std::string_view text) {
  std::vector<std::string> names;
  std::vector<double> mu, a;
  std::unordered_map<std::string, VertexIndex> index;
  std::vector<Edge> edges;
  std::map<std::pair<VertexIndex, VertexIndex>, std::size_t> seen_edges;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::istringstream is{std::string(line)};
    std::vector<std::string> tok;
    for (std::string t; is >> t;) tok.push_back(t);

    if (tok[0] == "vertex") {
      if (tok.size() != 4)
        throw ParseError(line_no, "expected 'vertex <id> <mu> <a>'");
      if (index.count(tok[1]))
        throw ParseError(line_no, "duplicate vertex '" + tok[1] + "'");
      const double m = detail::parse_real(tok[2], line_no, "measure");
      const double av = detail::parse_real(tok[3], line_no, "potential");
      if (!(m > 0.0)) throw ParseError(line_no, "measure must be positive");
      if (av < 0.0) throw ParseError(line_no, "potential must be nonnegative");
      index.emplace(tok[1], names.size());
      names.push_back(tok[1]);
      mu.push_back(m);
      a.push_back(av);
    } else if (tok[0] == "edge") {
      if (tok.size() != 4)
        throw ParseError(line_no, "expected 'edge <id1> <id2> <w>'");
      auto i1 = index.find(tok[1]);
      auto i2 = index.find(tok[2]);
      if (i1 == index.end())
        throw ParseError(line_no, "unknown vertex '" + tok[1] + "'");
      if (i2 == index.end())
        throw ParseError(line_no, "unknown vertex '" + tok[2] + "'");
      if (i1->second == i2->second)
        throw ParseError(line_no, "self-loop at '" + tok[1] + "'");
      const double w = detail::parse_real(tok[3], line_no, "weight");
      if (!(w > 0.0)) throw ParseError(line_no, "weight must be positive");
      const auto key = std::minmax(i1->second, i2->second);
      if (!seen_edges.emplace(std::pair{key.first, key.second}, edges.size())
               .second)
        throw ParseError(line_no,
                         "duplicate edge " + tok[1] + "-" + tok[2]);
      edges.push_back({i1->second, i2->second, w});
    } else {
      throw ParseError(line_no, "unknown record '" + tok[0] + "'");
    }
  }
  if (names.empty()) throw ParseError(line_no, "no vertices declared");
  return {WeightedGraph(std::move(names), std::move(mu), std::move(edges)),
          Potential{std::move(a)}};
}

inline std::string serialize_graph(const WeightedGraph& graph,
                                   const Potential& potential) {
  std::ostringstream os;
  for (VertexIndex x = 0; x < graph.size(); ++x)
    os << "vertex " << graph.name(x) << ' ' << detail::format_real(graph.mu(x))
       << ' ' << detail::format_real(potential[x]) << '\n';
  for (const auto& e : graph.edges())
    os << "edge " << graph.name(e.first) << ' ' << graph.name(e.second) << ' '
       << detail::format_real(e.weight) << '\n';
  return os.str();
}

/// The nine-vertex test graph: a complete graph on x1..x6 (the potential
/// well) with a tail x7, x8, x9 where a = 1.
inline GraphWithPotential builtin_g9() {
  std::vector<std::string> names;
  for (int i = 1; i <= 9; ++i) names.push_back("x" + std::to_string(i));
  static constexpr std::pair<int, int> kEdges[] = {
      {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}, {2, 3},
      {2, 4}, {2, 5}, {2, 6}, {3, 4}, {3, 5}, {3, 6}, {4, 5},
      {4, 6}, {5, 6}, {6, 8}, {7, 9}, {8, 9}};
  std::vector<Edge> edges;
  for (auto [i, j] : kEdges)
    edges.push_back({static_cast<VertexIndex>(i - 1),
                     static_cast<VertexIndex>(j - 1), 1.0});
  Potential a{{0, 0, 0, 0, 0, 0, 1, 1, 1}};
  return {WeightedGraph(std::move(names), std::vector<double>(9, 1.0),
                        std::move(edges)),
          std::move(a)};
}

}  // namespace nlsg

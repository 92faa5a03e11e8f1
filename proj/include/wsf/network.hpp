#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace wsf::net {

enum class EdgeStatus { Absent = 0, Present = 1 };

struct EdgeSpec {
  std::string u, v;
  double conductance = 1.0;
  std::string id;  // optional; defaults to "e<k>", 1-based in input order
};

struct NetworkSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
};

struct Edge {
  int tail = 0, head = 0;  // orientation = the (u, v) order of the input
  double conductance = 1.0;
  std::string id;
};

// Finite connected network with positive conductances. Self-loops are
// rejected; parallel edges are accepted only when both carry distinct
// explicit ids. Orientation only fixes signs in the edge space; all
// probabilities are orientation invariant.
class FiniteNetwork {
 public:
  static FiniteNetwork build(const NetworkSpec& spec);
  static FiniteNetwork from_json_text(const std::string& text);
  static FiniteNetwork from_json_file(const std::string& path);
  std::string to_json_text() const;

  int vertex_count() const { return int(names_.size()); }
  int edge_count() const { return int(edges_.size()); }
  const std::string& vertex_name(int v) const { return names_[v]; }
  int vertex_index(const std::string& name) const;
  const Edge& edge(int e) const { return edges_[e]; }
  int edge_index(const std::string& id) const;
  // Incident edge indices in input order; this order is the documented
  // neighbor order for random-walk steps.
  const std::vector<int>& incident_edges(int v) const { return incidence_[v]; }
  int other_end(int e, int v) const {
    const Edge& ed = edges_[e];
    return ed.tail == v ? ed.head : ed.tail;
  }
  double vertex_strength(int v) const { return strength_[v]; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<std::vector<int>> incidence_;
  std::vector<double> strength_;  // sum of incident conductances
};

}  // namespace wsf::net

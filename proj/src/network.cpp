#include "wsf/network.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wsf/error.hpp"
#include "wsf/util.hpp"

namespace wsf::net {

FiniteNetwork FiniteNetwork::build(const NetworkSpec& spec) {
  FiniteNetwork g;
  if (spec.vertices.size() < 2) fail(ErrorCode::InvalidParameter, "network needs at least two vertices");
  g.names_ = spec.vertices;
  for (int i = 0; i < int(g.names_.size()); ++i) {
    if (!g.index_.emplace(g.names_[i], i).second)
      fail(ErrorCode::InvalidParameter, "duplicate vertex name '" + g.names_[i] + "'");
  }
  g.incidence_.resize(g.names_.size());
  g.strength_.assign(g.names_.size(), 0.0);

  // Parallel edges must be distinguished explicitly; a repeated endpoint pair
  // where either entry relies on an auto id is treated as an input mistake.
  std::set<std::pair<int, int>> seen_auto;
  std::set<std::pair<int, int>> seen_any;
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    const EdgeSpec& es = spec.edges[k];
    auto iu = g.index_.find(es.u), iv = g.index_.find(es.v);
    if (iu == g.index_.end()) fail(ErrorCode::UnknownVertex, "edge endpoint '" + es.u + "'");
    if (iv == g.index_.end()) fail(ErrorCode::UnknownVertex, "edge endpoint '" + es.v + "'");
    if (iu->second == iv->second) fail(ErrorCode::SelfLoop, "self-loop at '" + es.u + "'");
    if (!(es.conductance > 0.0) || !std::isfinite(es.conductance))
      fail(ErrorCode::NonpositiveConductance, "edge " + es.u + "-" + es.v);

    Edge e;
    e.tail = iu->second;
    e.head = iv->second;
    e.conductance = es.conductance;
    e.id = es.id.empty() ? "e" + std::to_string(k + 1) : es.id;
    std::pair<int, int> key{std::min(e.tail, e.head), std::max(e.tail, e.head)};
    bool repeated = !seen_any.insert(key).second;
    if (repeated && (es.id.empty() || seen_auto.count(key)))
      fail(ErrorCode::DuplicateEdge, "parallel edge " + es.u + "-" + es.v + " without distinct explicit ids");
    if (es.id.empty()) seen_auto.insert(key);
    if (!g.edge_index_.emplace(e.id, int(k)).second)
      fail(ErrorCode::DuplicateEdge, "duplicate edge id '" + e.id + "'");
    g.edges_.push_back(e);
    g.incidence_[e.tail].push_back(int(k));
    g.incidence_[e.head].push_back(int(k));
    g.strength_[e.tail] += e.conductance;
    g.strength_[e.head] += e.conductance;
  }

  // Connectivity.
  std::vector<char> seen(g.names_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : g.incidence_[v]) {
      int w = g.other_end(e, v);
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  if (visited != g.names_.size()) fail(ErrorCode::DisconnectedGraph, "network is not connected");
  return g;
}

int FiniteNetwork::vertex_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::UnknownVertex, "'" + name + "'");
  return it->second;
}

int FiniteNetwork::edge_index(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) fail(ErrorCode::InvalidParameter, "unknown edge id '" + id + "'");
  return it->second;
}

FiniteNetwork FiniteNetwork::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("graph json: ") + e.what());
  }
  NetworkSpec spec;
  try {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
      fail(ErrorCode::InvalidInput, "graph json needs 'vertices' and 'edges'");
    for (const auto& v : j.at("vertices")) spec.vertices.push_back(v.get<std::string>());
    for (const auto& e : j.at("edges")) {
      EdgeSpec es;
      es.u = e.at("u").get<std::string>();
      es.v = e.at("v").get<std::string>();
      if (e.contains("c")) es.conductance = e.at("c").get<double>();
      if (e.contains("id")) es.id = e.at("id").get<std::string>();
    spec.edges.push_back(es);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("graph json: ") + e.what());
  }
  return build(spec);
}

FiniteNetwork FiniteNetwork::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string FiniteNetwork::to_json_text() const {
  nlohmann::json j;
  j["vertices"] = names_;
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : edges_) {
    nlohmann::json je;
    je["u"] = names_[e.tail];
    je["v"] = names_[e.head];
    je["c"] = e.conductance;
    je["id"] = e.id;
    edges.push_back(je);
  }
  j["edges"] = edges;
  return j.dump();
}

}  // namespace wsf::net

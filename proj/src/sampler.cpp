#include "wsf/sampler.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "wsf/error.hpp"
#include "wsf/potential.hpp"
#include "wsf/rootside.hpp"

namespace wsf::sampler {

int EdgeConfig::present_count() const {
  int c = 0;
  for (std::uint8_t s : status) c += s;
  return c;
}

bool is_spanning_tree(const FiniteNetwork& network, const std::vector<std::uint8_t>& status) {
  if (int(status.size()) != network.edge_count()) return false;
  int present = 0;
  for (std::uint8_t s : status) present += s;
  if (present != network.vertex_count() - 1) return false;
  std::vector<std::uint8_t> seen(std::size_t(network.vertex_count()), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : network.incident_edges(v)) {
      if (!status[std::size_t(e)]) continue;
      int w = network.other_end(e, v);
      if (!seen[std::size_t(w)]) {
        seen[std::size_t(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == network.vertex_count();
}

EdgeConfig wilson_ust(const FiniteNetwork& network, int root, const RngSeed& seed) {
  if (root < 0 || root >= network.vertex_count()) fail(ErrorCode::UnknownVertex, "root out of range");
  RandomStream stream(seed);
  EdgeConfig cfg;
  cfg.status.assign(std::size_t(network.edge_count()), 0);
  std::vector<std::uint8_t> in_tree(std::size_t(network.vertex_count()), 0);
  in_tree[std::size_t(root)] = 1;
  std::vector<int> pos(std::size_t(network.vertex_count()), -1);
  std::vector<int> path_v, path_e;

  for (int start = 0; start < network.vertex_count(); ++start) {
    if (in_tree[std::size_t(start)]) continue;
    path_v.assign(1, start);
    path_e.clear();
    pos[std::size_t(start)] = 0;
    for (;;) {
      int v = path_v.back();
      double u = stream.uniform01() * network.vertex_strength(v);
      const std::vector<int>& inc = network.incident_edges(v);
      int chosen = inc.back();
      double acc = 0.0;
      for (int e : inc) {
        acc += network.edge(e).conductance;
        if (u < acc) {
          chosen = e;
          break;
        }
      }
      int w = network.other_end(chosen, v);
      if (in_tree[std::size_t(w)]) {
        for (int pv : path_v) {
          in_tree[std::size_t(pv)] = 1;
          pos[std::size_t(pv)] = -1;
        }
        for (int pe : path_e) cfg.status[std::size_t(pe)] = 1;
        cfg.status[std::size_t(chosen)] = 1;
        break;
      }
      if (pos[std::size_t(w)] >= 0) {
        // Loop closed: erase everything past the earlier visit.
        for (int k = int(path_v.size()) - 1; k > pos[std::size_t(w)]; --k) {
          pos[std::size_t(path_v[std::size_t(k)])] = -1;
          path_v.pop_back();
        }
        path_e.resize(path_v.size() - 1);
      } else {
        path_e.push_back(chosen);
        path_v.push_back(w);
        pos[std::size_t(w)] = int(path_v.size()) - 1;
      }
    }
  }
  return cfg;
}

EdgeConfig wilson_ust(const FiniteNetwork& network, const std::string& root, const RngSeed& seed) {
  return wilson_ust(network, network.vertex_index(root), seed);
}

WiredSample wsf_truncated(const SphericalProfile& profile, int depth, const RngSeed& seed) {
  WiredSample out;
  out.truncation = net::truncate_wired(profile, depth);
  EdgeConfig cfg = wilson_ust(out.truncation.network, out.truncation.boundary, seed);
  for (int e : out.truncation.tree_edges) out.tree_status.push_back(cfg.status[std::size_t(e)]);
  for (int e : out.truncation.boundary_edges)
    out.boundary_status.push_back(cfg.status[std::size_t(e)]);
  return out;
}

namespace {

// Implicit wired truncation: vertices are (level, index-within-level) with
// index arithmetic replacing pointers. Conductances, neighbor order, and the
// per-vertex strength accumulation reproduce truncate_wired bit for bit so
// walks consume the identical draw sequence.
struct ImplicitWired {
  static constexpr std::uint64_t kBoundary = 0;

  int wired_depth;
  std::vector<std::uint64_t> branching;  // [1..M]
  std::vector<double> cond;              // [1..M]
  std::vector<double> size;              // |T_n| as uint64-exact doubles
  std::vector<double> strength;          // per level
  double boundary_cond;

  ImplicitWired(const SphericalProfile& profile, int M) : wired_depth(M) {
    if (M < 0 || M > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
    if (M > 1023) fail(ErrorCode::UnsupportedDepth, "implicit walker caps the wired depth at 1023");
    if (!profile.has_tail_rule()) fail(ErrorCode::MissingTailRule, "wired closure needs a tail rule");
    net::TailEstimate tail = profile.tail_beyond(M);
    if (!std::isfinite(tail.value)) fail(ErrorCode::RecurrentTail, "recurrent tail");
    branching.assign(1, 1);
    cond.assign(1, 0.0);
    size.assign(1, 1.0);
    for (int n = 1; n <= M; ++n) {
      branching.push_back(std::uint64_t(profile.branching(n)));
      cond.push_back(1.0 / profile.resistance(n));
      size.push_back(profile.level_size(n));
    }
    if (profile.level_size(M) >= 9.0e15)
      fail(ErrorCode::UnsupportedDepth, "level sizes exceed exact index arithmetic");
    boundary_cond = 1.0 / (profile.level_size(M) * tail.value);
    // Same accumulation order as the materialized network: parent edge,
    // child edges, boundary edge.
    for (int n = 0; n <= M; ++n) {
      double s = 0.0;
      if (n >= 1) s += cond[std::size_t(n)];
      if (n < M)
        for (std::uint64_t c = 0; c < branching[std::size_t(n) + 1]; ++c)
          s += cond[std::size_t(n) + 1];
      if (n == M) s += boundary_cond;
      strength.push_back(s);
    }
  }

  static std::uint64_t key(int level, std::uint64_t idx) {
    return (std::uint64_t(level + 1) << 53) | idx;
  }

  // One walk step from (level, idx); neighbor scan order matches the
  // incident-edge input order of the materialized network.
  std::uint64_t step(int level, std::uint64_t idx, RandomStream& stream) const {
    double u = stream.uniform01() * strength[std::size_t(level)];
    double acc = 0.0;
    if (level >= 1) {
      acc += cond[std::size_t(level)];
      if (u < acc) return key(level - 1, idx / branching[std::size_t(level)]);
    }
    if (level == wired_depth) return kBoundary;  // fallthrough lands on the last neighbor
    std::uint64_t b = branching[std::size_t(level) + 1];
    for (std::uint64_t c = 0; c + 1 < b; ++c) {
      acc += cond[std::size_t(level) + 1];
      if (u < acc) return key(level + 1, idx * b + c);
    }
    return key(level + 1, idx * b + (b - 1));
  }
};

}  // namespace

ComponentSample wsf_root_component(const SphericalProfile& profile, int wired_depth, int depth,
                                   const RngSeed& seed) {
  if (depth < 0 || depth > wired_depth) fail(ErrorCode::InvalidParameter, "depth out of range");
  ImplicitWired g(profile, wired_depth);
  double sweep = 0.0;
  for (int n = 0; n <= depth; ++n) sweep += g.size[std::size_t(n)];
  if (sweep > 4.0e6) fail(ErrorCode::EnumerationTooLarge, "too many vertices in the restricted levels");

  RandomStream stream(seed);
  std::unordered_set<std::uint64_t> in_tree{ImplicitWired::kBoundary};
  std::unordered_map<std::uint64_t, std::uint64_t> next;
  std::unordered_map<std::uint64_t, int> pos;
  std::vector<std::uint64_t> path;
  std::vector<std::pair<int, std::uint64_t>> level_idx;  // aligned with path

  for (int n = 0; n <= depth; ++n) {
    std::uint64_t count = std::uint64_t(g.size[std::size_t(n)]);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t start = ImplicitWired::key(n, i);
      if (in_tree.count(start)) continue;
      path.assign(1, start);
      level_idx.assign(1, {n, i});
      pos.clear();
      pos[start] = 0;
      for (;;) {
        auto [lv, ix] = level_idx.back();
        std::uint64_t w = g.step(lv, ix, stream);
        if (in_tree.count(w)) {
          for (std::size_t k = 0; k + 1 < path.size(); ++k) next[path[k]] = path[k + 1];
          next[path.back()] = w;
          in_tree.insert(path.begin(), path.end());
          break;
        }
        auto it = pos.find(w);
        if (it != pos.end()) {
          for (int k = int(path.size()) - 1; k > it->second; --k) {
            pos.erase(path[std::size_t(k)]);
            path.pop_back();
            level_idx.pop_back();
          }
        } else {
          path.push_back(w);
          int wl = int((w >> 53)) - 1;
          level_idx.push_back({wl, w & ((1ull << 53) - 1)});
          pos[w] = int(path.size()) - 1;
        }
      }
    }
  }

  // Root component over the restricted levels: a level-(n+1) edge is in the
  // tree iff one endpoint's branch points at the other.
  ComponentSample comp(depth);
  auto edge_present = [&](std::uint64_t a, std::uint64_t b) {
    auto ia = next.find(a);
    if (ia != next.end() && ia->second == b) return true;
    auto ib = next.find(b);
    return ib != next.end() && ib->second == a;
  };
  net::TreePath path_coord;
  auto grow = [&](auto&& self, int level, std::uint64_t idx) -> void {
    if (level == depth) return;
    std::uint64_t b = g.branching[std::size_t(level) + 1];
    std::uint64_t me = ImplicitWired::key(level, idx);
    for (std::uint64_t c = 0; c < b; ++c) {
      std::uint64_t child_idx = idx * b + c;
      if (!edge_present(me, ImplicitWired::key(level + 1, child_idx))) continue;
      path_coord.push_back(int(c));
      comp.insert(path_coord);
      self(self, level + 1, child_idx);
      path_coord.pop_back();
    }
  };
  grow(grow, 0, 0);
  return comp;
}

ComponentSample ray_sample(const SphericalProfile& profile, int depth, const RngSeed& seed) {
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  potential::LevelTable table(profile);  // transience gate
  RandomStream stream(seed);
  ComponentSample comp(depth);
  net::TreePath path;
  for (int n = 1; n <= depth; ++n)
    path.push_back(int(stream.uniform_index(std::uint32_t(table.branching(n)))));
  comp.insert(path);
  return comp;
}

ComponentSample perc_component_sample(const SphericalProfile& profile, int depth,
                                      const RngSeed& seed) {
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  potential::LevelTable table(profile);
  RandomStream stream(seed);
  ComponentSample comp(depth);
  // Breadth first: level by level, parents in path order, children
  // ascending, one draw per candidate edge.
  std::vector<net::TreePath> frontier{{}};
  std::vector<net::TreePath> grown;
  for (int n = 0; n < depth && !frontier.empty(); ++n) {
    grown.clear();
    double p = table.p(n + 1);
    for (const net::TreePath& parent : frontier) {
      for (int c = 0; c < table.branching(n + 1); ++c) {
        if (!stream.bernoulli(p)) continue;
        net::TreePath child = parent;
        child.push_back(c);
        comp.insert(child);
        grown.push_back(std::move(child));
      }
    }
    frontier.swap(grown);
  }
  return comp;
}

ComponentSample root_component_sample(const SphericalProfile& profile, int depth,
                                      const RngSeed& seed) {
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  potential::LevelTable table(profile);
  // Ray choices first (child(0), one draw per level), then the percolation
  // cluster of the root with the ray's edges forced open: forced edges
  // consume no draw, every other frontier edge draws one bernoulli, parents
  // in path order, children ascending.
  RandomStream raystream(seed.child(0));
  std::vector<int> ray;
  for (int n = 1; n <= depth; ++n)
    ray.push_back(int(raystream.uniform_index(std::uint32_t(table.branching(n)))));

  RandomStream perc(seed.child(1));
  ComponentSample comp(depth);
  struct Node {
    net::TreePath path;
    bool on_ray;
  };
  std::vector<Node> frontier{{{}, true}}, grown;
  for (int n = 0; n < depth && !frontier.empty(); ++n) {
    grown.clear();
    double p = table.p(n + 1);
    for (const Node& node : frontier) {
      for (int c = 0; c < table.branching(n + 1); ++c) {
        bool forced = node.on_ray && c == ray[std::size_t(n)];
        if (!forced && !perc.bernoulli(p)) continue;
        net::TreePath child = node.path;
        child.push_back(c);
        comp.insert(child);
        grown.push_back({std::move(child), forced});
      }
    }
    frontier.swap(grown);
  }
  return comp;
}

namespace {

// Component of y in the root-side tree: percolation cluster of y, with the
// harmonic ray's edges forced open when the ray runs on this side, vertices
// capped at tree level `depth`. Coordinates: at spine vertices the
// continuation toward the tree root is child 0 when present, bushes follow;
// bush vertices use plain child indices. Ray choices come from substream
// child(0) (one draw per step), percolation from child(1); forced edges
// consume no percolation draw. Sweep: spine outward from y, at each reached
// spine vertex the spine edge first, then its bushes grown breadth first.
ComponentSample sample_root_side(const RootSideTree& rs, int depth, bool with_ray,
                                 const RngSeed& seed) {
  const potential::LevelTable& t = rs.levels();
  int ell = rs.spine_length();
  ComponentSample comp(ell - 1 + depth);

  // Ray route: number of spine edges traversed, exit bush, descent within it.
  int ray_spine_edges = 0;
  int exit_j = -1, exit_bush = -1;
  std::vector<int> descent;
  if (with_ray) {
    RandomStream ray(seed.child(0));
    for (int j = 0; j < ell; ++j) {
      if (rs.ray_total_conductance(j) <= 0.0) break;  // this side is finite: the ray ends
      if (ray.uniform01() < rs.ray_spine_prob(j)) {
        ray_spine_edges = j + 1;
        continue;
      }
      exit_j = j;
      exit_bush = int(ray.uniform_index(std::uint32_t(rs.bush_count(j))));
      for (int level = rs.bush_root_level(j); level < depth; ++level)
        descent.push_back(int(ray.uniform_index(std::uint32_t(t.branching(level + 1)))));
      break;
    }
  }

  struct BushNode {
    net::TreePath coord;
    int tree_level;
    bool on_ray;
  };

  RandomStream perc(seed.child(1));
  std::vector<BushNode> frontier, grown;
  net::TreePath spine_coord;
  bool reach = true;
  for (int j = 0; j < ell && reach; ++j) {
    bool has_spine_child = j + 1 < ell;
    bool next_reach = false;
    if (has_spine_child) {
      if (j < ray_spine_edges)
        next_reach = true;
      else
        next_reach = perc.bernoulli(rs.spine_open_prob(j));
    }
    frontier.clear();
    double p_root = rs.bush_open_prob(j);
    int bush_level = rs.bush_root_level(j);
    for (int bi = 0; bi < rs.bush_count(j); ++bi) {
      bool forced = j == exit_j && bi == exit_bush;
      if (!forced && !perc.bernoulli(p_root)) continue;
      net::TreePath coord = spine_coord;
      coord.push_back((has_spine_child ? 1 : 0) + bi);
      comp.insert(coord);
      frontier.push_back({std::move(coord), bush_level, forced});
    }
    while (!frontier.empty()) {
      grown.clear();
      for (const BushNode& node : frontier) {
        if (node.tree_level >= depth) continue;
        double p = t.p(node.tree_level + 1);
        std::size_t step = std::size_t(node.tree_level - bush_level);
        for (int c = 0; c < t.branching(node.tree_level + 1); ++c) {
          bool forced = node.on_ray && step < descent.size() && c == descent[step];
          if (!forced && !perc.bernoulli(p)) continue;
          net::TreePath coord = node.coord;
          coord.push_back(c);
          comp.insert(coord);
          grown.push_back({std::move(coord), node.tree_level + 1, forced});
        }
      }
      frontier.swap(grown);
    }
    if (next_reach) {
      spine_coord.push_back(0);
      comp.insert(spine_coord);
    }
    reach = next_reach;
  }
  return comp;
}

}  // namespace

PairSample conditioned_pair_sample(const SphericalProfile& profile, int edge_level,
                                   net::EdgeStatus status, int depth, const RngSeed& seed) {
  if (edge_level < 1) fail(ErrorCode::InvalidParameter, "edge level must be >= 1");
  if (edge_level > depth) fail(ErrorCode::UnsupportedDepth, "edge level beyond the truncation depth");
  if (depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  double alpha = potential::alpha_split(profile, edge_level);  // transience gate
  SphericalProfile sub = profile.shifted(edge_level);
  int child_depth = depth - edge_level;
  RootSideTree rs(profile, edge_level);

  PairSample out{ComponentSample(child_depth), ComponentSample(edge_level - 1 + depth), false,
                 alpha};
  if (status == net::EdgeStatus::Present) {
    RandomStream pick(seed.child(0));
    out.ray_on_child_side = pick.bernoulli(alpha);
    out.child_side = out.ray_on_child_side
                         ? root_component_sample(sub, child_depth, seed.child(1))
                         : perc_component_sample(sub, child_depth, seed.child(1));
    out.root_side = sample_root_side(rs, depth, !out.ray_on_child_side, seed.child(2));
  } else {
    out.child_side = root_component_sample(sub, child_depth, seed.child(1));
    out.root_side = sample_root_side(rs, depth, true, seed.child(2));
  }
  return out;
}

ConditionedSample survival_conditioned_perc(const SphericalProfile& profile, int depth,
                                            const RngSeed& seed, long max_attempts) {
  double s = potential::survival_to_depth(profile, depth);
  if (s <= 0.0) fail(ErrorCode::ZeroSurvival, "survival probability is zero at this depth");
  for (long a = 0; a < max_attempts; ++a) {
    ComponentSample comp = perc_component_sample(profile, depth, seed.child(std::uint32_t(a)));
    if (comp.cardinality(depth) > 0) return {std::move(comp), a, s};
  }
  fail(ErrorCode::RejectionBudgetExceeded,
       "no accepted sample in " + std::to_string(max_attempts) + " attempts");
}

}  // namespace wsf::sampler

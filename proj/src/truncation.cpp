#include "wsf/truncation.hpp"

#include <cmath>
#include <string>

#include "wsf/error.hpp"

namespace wsf::net {

namespace {
// Materializing much beyond this is pointless: samplers that need deep wired
// truncations walk the tree implicitly instead of building it.
constexpr double kMaxVertices = 4.0e6;
}  // namespace

WiredTruncation truncate_wired(const SphericalProfile& profile, int depth) {
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  if (!profile.has_tail_rule())
    fail(ErrorCode::MissingTailRule, "wired closure needs a tail rule beyond the truncation depth");
  TailEstimate tail = profile.tail_beyond(depth);
  if (!std::isfinite(tail.value))
    fail(ErrorCode::RecurrentTail, "recurrent tail: no wired closure exists");
  double total = 0.0;
  for (int n = 0; n <= depth; ++n) total += profile.level_size(n);
  if (total > kMaxVertices)
    fail(ErrorCode::EnumerationTooLarge, "truncation would have " + std::to_string(total) + " vertices");

  NetworkSpec spec;
  WiredTruncation out;
  out.depth = depth;

  std::vector<std::string> prev{""};
  spec.vertices.push_back("");
  out.level_of.push_back(0);
  std::vector<std::string> cur;
  for (int n = 1; n <= depth; ++n) {
    int b = profile.branching(n);
    double cond = 1.0 / profile.resistance(n);
    cur.clear();
    cur.reserve(prev.size() * std::size_t(b));
    for (const std::string& parent : prev) {
      for (int i = 0; i < b; ++i) {
        std::string child = parent.empty() ? std::to_string(i) : parent + "." + std::to_string(i);
        spec.vertices.push_back(child);
        out.level_of.push_back(n);
        spec.edges.push_back({parent, child, cond, ""});
        cur.push_back(std::move(child));
      }
    }
    prev.swap(cur);
  }
  std::size_t tree_edge_count = spec.edges.size();

  spec.vertices.push_back("@");
  out.level_of.push_back(depth + 1);
  // |T_depth| L_depth is the common per-subtree tail resistance.
  double boundary_cond = 1.0 / (profile.level_size(depth) * tail.value);
  for (const std::string& leaf : prev) spec.edges.push_back({leaf, "@", boundary_cond, ""});

  out.network = FiniteNetwork::build(spec);
  out.boundary = out.network.vertex_count() - 1;
  for (std::size_t k = 0; k < tree_edge_count; ++k) out.tree_edges.push_back(int(k));
  for (std::size_t k = tree_edge_count; k < spec.edges.size(); ++k) out.boundary_edges.push_back(int(k));
  return out;
}

}  // namespace wsf::net

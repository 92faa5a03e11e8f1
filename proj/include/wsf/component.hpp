#pragma once

#include <string>
#include <vector>

namespace wsf::net {

// Child-index path from the root; empty = root. Names match the wired
// truncation's vertex names ("", "0", "0.1", ...).
using TreePath = std::vector<int>;

std::string path_name(const TreePath& path);

// Rooted subtree of a profile tree held as sorted per-level path lists;
// level 0 is always the root alone.
class ComponentSample {
 public:
  explicit ComponentSample(int depth);

  int depth() const { return depth_; }
  // Adds the path and any missing ancestors. Paths may arrive unsorted.
  void insert(const TreePath& path);
  bool contains(const TreePath& path) const;
  const std::vector<TreePath>& level(int n) const;
  int cardinality(int n) const { return int(level(n).size()); }
  // Deepest level with at least one vertex.
  int reach() const;

  // Canonical one-line encoding (levels joined by '|'), usable as a
  // histogram key; equal samples produce equal keys.
  std::string shape_key() const;
  // Every non-root vertex has its parent present, levels sorted, no
  // duplicates. Samplers assert this on every sample in tests.
  bool is_valid_subtree() const;

 private:
  int depth_ = 0;
  std::vector<std::vector<TreePath>> levels_;
};

}  // namespace wsf::net

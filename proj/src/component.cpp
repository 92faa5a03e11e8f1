#include "wsf/component.hpp"

#include <algorithm>

#include "wsf/error.hpp"

namespace wsf::net {

std::string path_name(const TreePath& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

ComponentSample::ComponentSample(int depth) : depth_(depth) {
  if (depth < 0) fail(ErrorCode::InvalidParameter, "negative depth");
  levels_.resize(std::size_t(depth) + 1);
  levels_[0].push_back({});
}

void ComponentSample::insert(const TreePath& path) {
  if (int(path.size()) > depth_) fail(ErrorCode::InvalidParameter, "path deeper than sample depth");
  TreePath prefix;
  for (std::size_t n = 1; n <= path.size(); ++n) {
    prefix.assign(path.begin(), path.begin() + long(n));
    auto& lv = levels_[n];
    auto it = std::lower_bound(lv.begin(), lv.end(), prefix);
    if (it == lv.end() || *it != prefix) lv.insert(it, prefix);
  }
}

bool ComponentSample::contains(const TreePath& path) const {
  if (int(path.size()) > depth_) return false;
  const auto& lv = levels_[path.size()];
  return std::binary_search(lv.begin(), lv.end(), path);
}

const std::vector<TreePath>& ComponentSample::level(int n) const {
  if (n < 0 || n > depth_) fail(ErrorCode::InvalidParameter, "level out of range");
  return levels_[std::size_t(n)];
}

int ComponentSample::reach() const {
  for (int n = depth_; n >= 0; --n)
    if (!levels_[std::size_t(n)].empty()) return n;
  return 0;
}

std::string ComponentSample::shape_key() const {
  std::string s;
  for (int n = 1; n <= depth_; ++n) {
    s += '|';
    const auto& lv = levels_[std::size_t(n)];
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (i) s += ',';
      s += path_name(lv[i]);
    }
  }
  return s;
}

bool ComponentSample::is_valid_subtree() const {
  if (levels_.empty() || levels_[0] != std::vector<TreePath>{{}}) return false;
  for (int n = 1; n <= depth_; ++n) {
    const auto& lv = levels_[std::size_t(n)];
    if (!std::is_sorted(lv.begin(), lv.end())) return false;
    if (std::adjacent_find(lv.begin(), lv.end()) != lv.end()) return false;
    for (const TreePath& p : lv) {
      TreePath parent(p.begin(), p.end() - 1);
      if (!contains(parent)) return false;
    }
  }
  return true;
}

}  // namespace wsf::net

#include "wsf/profile.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "wsf/error.hpp"
#include "wsf/util.hpp"

namespace wsf::net {

namespace {
constexpr int kMaxDepth = 1 << 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

int exponent_of(double gamma, double v) { return int(std::floor(gamma * std::log2(v))); }
}  // namespace

int poly_level_exponent(double gamma, int n) { return exponent_of(gamma, double(n) + 1.0); }

struct SphericalProfile::Impl {
  ProfileRule rule = ProfileRule::Explicit;
  int depth = 0;
  std::vector<int> branching;      // [1..depth]; [0] unused
  std::vector<double> resistance;  // [1..depth]; [0] unused
  std::vector<double> size;        // |T_n|, [0..depth]
  int geo_b = 0;
  double gamma = 0.0;
  bool has_tail = false;
  std::function<TailEstimate(int)> tail;
  SeriesVerdict verdict = SeriesVerdict::Unknown;
  std::optional<int> branch_bound;

  static std::shared_ptr<Impl> make(ProfileRule rule, std::vector<int> b, std::vector<double> r);
};

std::shared_ptr<SphericalProfile::Impl> SphericalProfile::Impl::make(ProfileRule rule, std::vector<int> b,
                                                                     std::vector<double> r) {
  if (b.size() != r.size()) fail(ErrorCode::InvalidParameter, "branching/resistance length mismatch");
  auto impl = std::make_shared<Impl>();
  impl->rule = rule;
  impl->depth = int(b.size());
  if (impl->depth > kMaxDepth) fail(ErrorCode::InvalidParameter, "profile depth exceeds 2^20");
  impl->branching.assign(1, 1);
  impl->resistance.assign(1, 0.0);
  impl->size.assign(1, 1.0);
  for (int n = 1; n <= impl->depth; ++n) {
    int bn = b[n - 1];
    double rn = r[n - 1];
    if (bn < 1) fail(ErrorCode::InvalidParameter, "branching must be >= 1 at level " + std::to_string(n));
    if (!(rn > 0.0) || !std::isfinite(rn))
      fail(ErrorCode::InvalidParameter, "resistance must be positive and finite at level " + std::to_string(n));
    impl->branching.push_back(bn);
    impl->resistance.push_back(rn);
    double sz = impl->size.back() * double(bn);
    if (!std::isfinite(sz)) fail(ErrorCode::InvalidParameter, "level size overflows at level " + std::to_string(n));
    impl->size.push_back(sz);
  }
  return impl;
}

namespace {

// Tail of the poly rule, L_n = sum_{m>n} 2^{-E(m)} with E(m) = floor(gamma
// log2(m+1)). Terms are grouped by the value j of the exponent: the levels
// with E(m) = j form an integer interval, counted exactly while the
// boundaries stay below 2^53 and by the real-length geometric tail beyond
// (the per-group counting error there is at most 1, i.e. bounded by 2^{1-j}).
TailEstimate poly_tail(double gamma, int n) {
  if (gamma <= 1.0) return {kInf, 0.0};
  const double ratio = std::exp2(1.0 / gamma - 1.0);  // < 1
  double vlo = double(n) + 2.0;                       // v = m+1 runs over >= n+2
  int j = exponent_of(gamma, vlo);
  CompensatedSum acc;
  double splice_error = 0.0;
  for (;;) {
    double vhi_real = std::exp2(double(j + 1) / gamma);
    if (vhi_real > 9.0e15) {
      // Real-length contribution of the current group from vlo, then the
      // exact geometric sum over all later groups.
      acc.add((vhi_real - vlo) * std::exp2(-double(j)));
      double geo = (std::exp2(1.0 / gamma) - 1.0) * std::pow(ratio, double(j + 1)) / (1.0 - ratio);
      acc.add(geo);
      splice_error = std::exp2(1.0 - double(j));
      break;
    }
    // First integer v with exponent > j, nudged so the grouping agrees with
    // the pointwise floor used for the level sizes.
    double vhi = std::ceil(vhi_real);
    while (exponent_of(gamma, vhi) <= j) vhi += 1.0;
    while (vhi - 1.0 >= vlo && exponent_of(gamma, vhi - 1.0) > j) vhi -= 1.0;
    if (vhi > vlo) acc.add((vhi - vlo) * std::exp2(-double(j)));
    vlo = std::max(vlo, vhi);
    ++j;
  }
  double value = acc.value();
  return {value, splice_error + 1e-13 * value};
}

}  // namespace

SphericalProfile SphericalProfile::binary(int depth) {
  if (depth < 0) fail(ErrorCode::InvalidParameter, "negative depth");
  auto impl = Impl::make(ProfileRule::Binary, std::vector<int>(std::size_t(depth), 2),
                         std::vector<double>(std::size_t(depth), 1.0));
  impl->has_tail = true;
  impl->tail = [](int n) { return TailEstimate{std::exp2(-double(n)), 0.0}; };
  impl->verdict = SeriesVerdict::Diverges;  // ratio test, |T_{n+1}|/|T_n| = 2
  impl->branch_bound = 2;
  return SphericalProfile(std::move(impl));
}

SphericalProfile SphericalProfile::geometric(int b, int depth) {
  if (b < 1) fail(ErrorCode::InvalidParameter, "geometric branching must be >= 1");
  if (depth < 0) fail(ErrorCode::InvalidParameter, "negative depth");
  auto impl = Impl::make(ProfileRule::Geometric, std::vector<int>(std::size_t(depth), b),
                        std::vector<double>(std::size_t(depth), 1.0));
  impl->geo_b = b;
  impl->has_tail = true;
  if (b == 1) {
    impl->tail = [](int) { return TailEstimate{kInf, 0.0}; };
    impl->verdict = SeriesVerdict::Unknown;  // series undefined for a recurrent tail
  } else {
    impl->tail = [b](int n) {
      double v = std::pow(double(b), -double(n)) / double(b - 1);
      return TailEstimate{v, 2e-16 * v};
    };
    impl->verdict = SeriesVerdict::Diverges;  // ratio test, |T_{n+1}|/|T_n| = b
  }
  impl->branch_bound = b;
  return SphericalProfile(std::move(impl));
}

SphericalProfile SphericalProfile::poly(double gamma, int depth) {
  if (!(gamma > 0.0) || !std::isfinite(gamma) || gamma > 50.0)
    fail(ErrorCode::InvalidParameter, "poly exponent must be in (0, 50]");
  if (depth < 0) fail(ErrorCode::InvalidParameter, "negative depth");
  std::vector<int> b;
  std::vector<double> r(std::size_t(depth), 1.0);
  b.reserve(std::size_t(depth));
  for (int n = 1; n <= depth; ++n) {
    int e = poly_level_exponent(gamma, n) - poly_level_exponent(gamma, n - 1);
    b.push_back(1 << e);
  }
  auto impl = Impl::make(ProfileRule::Poly, std::move(b), std::move(r));
  impl->gamma = gamma;
  impl->has_tail = true;
  impl->tail = [gamma](int n) { return poly_tail(gamma, n); };
  // |T_n| is within a factor 2 of (n+1)^gamma, so the series converges for
  // gamma > 1 (polynomial test) and the tail diverges otherwise.
  impl->verdict = gamma > 1.0 ? SeriesVerdict::Converges : SeriesVerdict::Unknown;
  impl->branch_bound = 1 << (int(std::floor(gamma)) + 1);
  return SphericalProfile(std::move(impl));
}

SphericalProfile SphericalProfile::explicit_data(std::vector<int> branching, std::vector<double> resistance) {
  auto impl = Impl::make(ProfileRule::Explicit, std::move(branching), std::move(resistance));
  return SphericalProfile(std::move(impl));
}

SphericalProfile SphericalProfile::custom(std::vector<int> branching, std::vector<double> resistance,
                                          CustomTail tail) {
  if (!tail.tail) fail(ErrorCode::InvalidParameter, "custom profile needs a tail closed form");
  auto impl = Impl::make(ProfileRule::Custom, std::move(branching), std::move(resistance));
  impl->has_tail = true;
  impl->tail = std::move(tail.tail);
  impl->verdict = tail.series;
  impl->branch_bound = tail.branching_bound;
  return SphericalProfile(std::move(impl));
}

ProfileRule SphericalProfile::rule() const { return impl_->rule; }
int SphericalProfile::depth() const { return impl_->depth; }

int SphericalProfile::branching(int n) const {
  if (n < 1 || n > impl_->depth) fail(ErrorCode::InvalidParameter, "level out of range");
  return impl_->branching[std::size_t(n)];
}

double SphericalProfile::resistance(int n) const {
  if (n < 1 || n > impl_->depth) fail(ErrorCode::InvalidParameter, "level out of range");
  return impl_->resistance[std::size_t(n)];
}

double SphericalProfile::level_size(int n) const {
  if (n < 0 || n > impl_->depth) fail(ErrorCode::InvalidParameter, "level out of range");
  return impl_->size[std::size_t(n)];
}

int SphericalProfile::max_branching() const {
  int m = 1;
  for (int n = 1; n <= impl_->depth; ++n) m = std::max(m, impl_->branching[std::size_t(n)]);
  return m;
}

bool SphericalProfile::has_tail_rule() const { return impl_->has_tail; }

TailEstimate SphericalProfile::tail_beyond(int n) const {
  if (!impl_->has_tail) fail(ErrorCode::MissingTailRule, "explicit profile cannot answer tail queries");
  if (n < 0 || n > impl_->depth) fail(ErrorCode::InvalidParameter, "level out of range");
  return impl_->tail(n);
}

SeriesVerdict SphericalProfile::series_verdict() const { return impl_->verdict; }
std::optional<int> SphericalProfile::branching_bound() const { return impl_->branch_bound; }

int SphericalProfile::geometric_b() const {
  if (impl_->rule != ProfileRule::Geometric) fail(ErrorCode::InvalidParameter, "not a geometric profile");
  return impl_->geo_b;
}

double SphericalProfile::poly_gamma() const {
  if (impl_->rule != ProfileRule::Poly) fail(ErrorCode::InvalidParameter, "not a poly profile");
  return impl_->gamma;
}

SphericalProfile SphericalProfile::shifted(int levels) const {
  if (levels < 0 || levels > impl_->depth) fail(ErrorCode::InvalidParameter, "shift out of range");
  if (levels == 0) return *this;
  // Self-similar rules stay themselves.
  if (impl_->rule == ProfileRule::Binary) return binary(impl_->depth - levels);
  if (impl_->rule == ProfileRule::Geometric) return geometric(impl_->geo_b, impl_->depth - levels);
  std::vector<int> b(impl_->branching.begin() + 1 + levels, impl_->branching.end());
  std::vector<double> r(impl_->resistance.begin() + 1 + levels, impl_->resistance.end());
  if (!impl_->has_tail) return explicit_data(std::move(b), std::move(r));
  // Subtree below one level-`levels` vertex: tails rescale by |T_levels|.
  double scale = impl_->size[std::size_t(levels)];
  auto parent = impl_;
  CustomTail tail;
  tail.tail = [parent, scale, levels](int n) {
    TailEstimate t = parent->tail(n + levels);
    return TailEstimate{scale * t.value, scale * t.bound};
  };
  tail.series = impl_->verdict;  // the shifted series has identical terms from the shift on
  tail.branching_bound = impl_->branch_bound;
  return custom(std::move(b), std::move(r), std::move(tail));
}

SphericalProfile SphericalProfile::extended(int new_depth) const {
  switch (impl_->rule) {
    case ProfileRule::Binary: return binary(new_depth);
    case ProfileRule::Geometric: return geometric(impl_->geo_b, new_depth);
    case ProfileRule::Poly: return poly(impl_->gamma, new_depth);
    default:
      fail(ErrorCode::UnsupportedDepth, "only parametric rules can be regenerated at a new depth");
  }
}

SphericalProfile SphericalProfile::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("profile json: ") + e.what());
  }
  try {
    std::string rule = j.at("rule").get<std::string>();
    if (rule == "binary") return binary(j.at("depth").get<int>());
    if (rule == "geometric") return geometric(j.at("b").get<int>(), j.at("depth").get<int>());
    if (rule == "poly") return poly(j.at("gamma").get<double>(), j.at("depth").get<int>());
    if (rule == "explicit")
      return explicit_data(j.at("branching").get<std::vector<int>>(),
                           j.at("resistance").get<std::vector<double>>());
    fail(ErrorCode::InvalidInput, "unknown profile rule '" + rule + "'");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("profile json: ") + e.what());
  }
}

SphericalProfile SphericalProfile::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string SphericalProfile::to_json_text() const {
  nlohmann::json j;
  switch (impl_->rule) {
    case ProfileRule::Binary:
      j["rule"] = "binary";
      j["depth"] = impl_->depth;
      break;
    case ProfileRule::Geometric:
      j["rule"] = "geometric";
      j["b"] = impl_->geo_b;
      j["depth"] = impl_->depth;
      break;
    case ProfileRule::Poly:
      j["rule"] = "poly";
      j["gamma"] = impl_->gamma;
      j["depth"] = impl_->depth;
      break;
    case ProfileRule::Explicit: {
      j["rule"] = "explicit";
      j["branching"] = std::vector<int>(impl_->branching.begin() + 1, impl_->branching.end());
      j["resistance"] = std::vector<double>(impl_->resistance.begin() + 1, impl_->resistance.end());
      break;
    }
    case ProfileRule::Custom:
      fail(ErrorCode::InvalidParameter, "custom tail closed forms are not serializable");
  }
  return j.dump();
}

}  // namespace wsf::net

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "support/oracles.hpp"
#include "wsf/detkernel.hpp"
#include "wsf/error.hpp"
#include "wsf/profile.hpp"
#include "wsf/truncation.hpp"

using namespace wsf;
using net::FiniteNetwork;
namespace dk = wsf::detkernel;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

FiniteNetwork triangle() {
  return FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c"],"edges":[{"u":"a","v":"b"},{"u":"b","v":"c"},{"u":"c","v":"a"}]})");
}

FiniteNetwork weighted_triangle() {
  return FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c"],"edges":[{"u":"a","v":"b","c":2.0},{"u":"b","v":"c"},{"u":"c","v":"a"}]})");
}

FiniteNetwork four_cycle() {
  return FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c","d"],"edges":[{"u":"a","v":"b"},{"u":"b","v":"c"},{"u":"c","v":"d"},{"u":"d","v":"a"}]})");
}

FiniteNetwork k4() {
  return FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c","d"],"edges":[{"u":"a","v":"b"},{"u":"a","v":"c"},{"u":"a","v":"d"},
          {"u":"b","v":"c"},{"u":"b","v":"d"},{"u":"c","v":"d"}]})");
}

double kernel_vs_oracle(const FiniteNetwork& g) {
  auto kernel = dk::transfer_kernel(g, dk::TransferVariant::Wsf);
  auto dist = dk::enumerate_spanning_trees(g);
  double worst = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    worst = std::max(worst, std::abs(dk::inclusion_prob(kernel, {e}) - dist.marginal(e)));
    for (int f = e + 1; f < g.edge_count(); ++f)
      worst = std::max(worst, std::abs(dk::inclusion_prob(kernel, {e, f}) - dist.pair_marginal(e, f)));
  }
  return worst;
}

}  // namespace

TEST_CASE("star and cycle spaces") {
  for (auto g : {triangle(), four_cycle(), k4(), weighted_triangle()}) {
    auto star = dk::star_space(g);
    auto cycle = dk::cycle_space(g);
    CHECK(star.dim == g.vertex_count() - 1);
    CHECK(cycle.dim == g.edge_count() - g.vertex_count() + 1);
    CHECK(star.dim + cycle.dim == g.edge_count());

    // mutual orthogonality and orthonormality of both bases
    double worst = 0.0;
    if (star.dim > 0 && cycle.dim > 0) worst = (star.onb.transpose() * cycle.onb).cwiseAbs().maxCoeff();
    CHECK(worst <= 1e-10);
    Eigen::MatrixXd sg = star.onb.transpose() * star.onb;
    CHECK((sg - Eigen::MatrixXd::Identity(star.dim, star.dim)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("orthonormalize drops dependent columns") {
  Eigen::MatrixXd m(3, 3);
  m.col(0) << 1, 0, 0;
  m.col(1) << 1, 1e-14, 0;  // dependent up to noise
  m.col(2) << 0, 0, 2;
  auto q = dk::orthonormalize(m);
  CHECK(q.cols() == 2);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("transfer kernel matches the enumeration oracle") {
  CHECK(kernel_vs_oracle(triangle()) <= 1e-10);
  CHECK(kernel_vs_oracle(weighted_triangle()) <= 1e-10);
  CHECK(kernel_vs_oracle(four_cycle()) <= 1e-10);
  CHECK(kernel_vs_oracle(k4()) <= 1e-10);

  auto g = triangle();
  auto kernel = dk::transfer_kernel(g, dk::TransferVariant::Wsf);
  for (int e = 0; e < 3; ++e) CHECK(kernel.k(e, e) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(std::abs(kernel.k(0, 1)) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(dk::inclusion_prob(kernel, {}) == 1.0);
  CHECK(code_of([&] { dk::inclusion_prob(kernel, {1, 1}); }) == ErrorCode::InvalidInput);

  auto diag = dk::kernel_diagnostics(kernel);
  CHECK(diag.symmetry_error <= 1e-12);
  CHECK(diag.idempotency_error <= 1e-12);
  CHECK(diag.eig_min >= -1e-12);
  CHECK(diag.eig_max <= 1.0 + 1e-12);
  CHECK(diag.trace == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("wsf and fsf kernels coincide on finite networks") {
  for (auto g : {triangle(), weighted_triangle(), four_cycle(), k4()}) {
    auto a = dk::transfer_kernel(g, dk::TransferVariant::Wsf);
    auto b = dk::transfer_kernel(g, dk::TransferVariant::Fsf);
    CHECK((a.k - b.k).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("edge orientation does not change probabilities") {
  auto flipped = FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c"],"edges":[{"u":"b","v":"a"},{"u":"b","v":"c"},{"u":"a","v":"c"}]})");
  auto k1 = dk::transfer_kernel(triangle(), dk::TransferVariant::Wsf);
  auto k2 = dk::transfer_kernel(flipped, dk::TransferVariant::Wsf);
  for (int e = 0; e < 3; ++e)
    CHECK(dk::inclusion_prob(k1, {e}) == doctest::Approx(dk::inclusion_prob(k2, {e})).epsilon(1e-12));
  for (int e = 0; e < 3; ++e)
    for (int f = e + 1; f < 3; ++f)
      CHECK(dk::inclusion_prob(k1, {e, f}) ==
            doctest::Approx(dk::inclusion_prob(k2, {e, f})).epsilon(1e-12));
}

TEST_CASE("conditioned kernels reproduce oracle conditionals") {
  for (auto g : {triangle(), weighted_triangle(), four_cycle(), k4()}) {
    auto dist = dk::enumerate_spanning_trees(g);
    for (int e = 0; e < g.edge_count(); ++e) {
      for (bool present : {true, false}) {
        auto basis = dk::condition_edge(
            g, e, present ? net::EdgeStatus::Present : net::EdgeStatus::Absent);
        auto kernel = dk::projection_kernel(basis);
        for (std::size_t i = 0; i < basis.edges.size(); ++i) {
          double want = dist.conditional_marginal(basis.edges[i], e, present);
          CHECK(kernel.k(Eigen::Index(i), Eigen::Index(i)) == doctest::Approx(want).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("conditioning subspaces are strictly nested for non-forced edges") {
  auto g = triangle();
  auto h1 = dk::condition_edge(g, 0, net::EdgeStatus::Present);
  auto h2 = dk::condition_edge(g, 0, net::EdgeStatus::Absent);
  auto rel = dk::subspace_compare(h1, h2);
  CHECK(rel.first_in_second);
  CHECK(!rel.second_in_first);
  CHECK(!rel.equal);
  CHECK(rel.dim_gap == 1);
  CHECK(rel.max_residual_12 <= 1e-8);

  // mismatched coordinates are rejected
  auto other = dk::condition_edge(g, 1, net::EdgeStatus::Present);
  CHECK(code_of([&] { dk::subspace_compare(h1, other); }) == ErrorCode::CoordinateMismatch);
}

TEST_CASE("degenerate conditioning on a bridge") {
  auto g = FiniteNetwork::from_json_text(
      R"({"vertices":["a","b"],"edges":[{"u":"a","v":"b"}]})");
  CHECK(code_of([&] { dk::condition_edge(g, 0, net::EdgeStatus::Absent); }) ==
        ErrorCode::DegenerateConditioning);
  auto basis = dk::condition_edge(g, 0, net::EdgeStatus::Present);
  CHECK(basis.dim == 0);
}

TEST_CASE("determinantal sampling follows the tree distribution") {
  auto g = weighted_triangle();
  auto star = dk::star_space(g);
  auto dist = dk::enumerate_spanning_trees(g);
  std::map<std::string, long> freq;
  const long n = 30000;
  RngSeed seed(31);
  for (long r = 0; r < n; ++r) {
    auto sample = dk::dpp_sample(star, seed.child(std::uint32_t(r)));
    REQUIRE(sample.size() == std::size_t(star.dim));
    std::string key;
    for (int e : sample) key += char('0' + e);
    freq[key] += 1;
  }
  for (std::size_t t = 0; t < dist.trees.size(); ++t) {
    std::string key;
    for (int e = 0; e < dist.edge_count; ++e)
      if (dist.trees[t] >> e & 1u) key += char('0' + e);
    double p = dist.prob[t];
    CHECK(std::abs(double(freq[key]) / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / double(n)));
  }

  // determinism
  CHECK(dk::dpp_sample(star, RngSeed(5)) == dk::dpp_sample(star, RngSeed(5)));
}

TEST_CASE("enumeration oracle") {
  auto dist = dk::enumerate_spanning_trees(weighted_triangle());
  REQUIRE(dist.trees.size() == 3);
  CHECK(dist.total_weight == doctest::Approx(5.0));
  double total = 0;
  for (double p : dist.prob) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dist.marginal(0) == doctest::Approx(0.8));
  CHECK(dist.pair_marginal(0, 1) == doctest::Approx(0.4));
  CHECK(dist.conditional_marginal(1, 0, true) == doctest::Approx(0.5));
  CHECK(dist.conditional_marginal(1, 0, false) == doctest::Approx(1.0));

  // a spanning tree network has exactly one tree: everything is forced
  auto path = FiniteNetwork::from_json_text(
      R"({"vertices":["a","b","c"],"edges":[{"u":"a","v":"b"},{"u":"b","v":"c"}]})");
  auto pd = dk::enumerate_spanning_trees(path);
  REQUIRE(pd.trees.size() == 1);
  CHECK(pd.marginal(0) == 1.0);
  CHECK(code_of([&] { pd.conditional_marginal(1, 0, false); }) == ErrorCode::DegenerateConditioning);

  // budget: 28 edges is past the cap
  std::string k8 = R"({"vertices":["a","b","c","d","e","f","g","h"],"edges":[)";
  const char* names = "abcdefgh";
  bool first = true;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      if (!first) k8 += ",";
      first = false;
      k8 += std::string("{\"u\":\"") + names[i] + "\",\"v\":\"" + names[j] + "\"}";
    }
  k8 += "]}";
  CHECK(code_of([&] { dk::enumerate_spanning_trees(FiniteNetwork::from_json_text(k8)); }) ==
        ErrorCode::EnumerationTooLarge);
}

TEST_CASE("wired truncation kernel agrees with enumeration and the potential theory") {
  auto profile = net::SphericalProfile::binary(20);
  auto trunc = net::truncate_wired(profile, 2);
  CHECK(kernel_vs_oracle(trunc.network) <= 1e-10);

  // the wired closure is exact: the level-1 edge probability on the finite
  // truncation equals the infinite-tree value 3/4
  auto kernel = dk::transfer_kernel(trunc.network, dk::TransferVariant::Wsf);
  int e0 = trunc.tree_edges[0];
  CHECK(kernel.k(e0, e0) == doctest::Approx(0.75).epsilon(1e-12));

  auto diag = dk::kernel_diagnostics(kernel);
  CHECK(diag.trace == doctest::Approx(double(trunc.network.vertex_count() - 1)).epsilon(1e-10));
}

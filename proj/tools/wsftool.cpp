// wsftool: command-line surface over the library. Every command is
// deterministic given its full flag set; seeds are mandatory wherever
// randomness is involved and floating-point output is fixed at 10
// significant digits so goldens stay byte-stable.
//
// Exit codes: 0 success, 2 malformed input or flags, 3 recurrence,
// 4 sampler/diagnostic failures, 5 degenerate conditioning, 6 enumeration
// budget.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "wsf/detkernel.hpp"
#include "wsf/error.hpp"
#include "wsf/martingale.hpp"
#include "wsf/network.hpp"
#include "wsf/potential.hpp"
#include "wsf/profile.hpp"
#include "wsf/rng.hpp"
#include "wsf/sampler.hpp"
#include "wsf/truncation.hpp"
#include "wsf/util.hpp"

namespace {

using nlohmann::json;
using wsf::Error;
using wsf::ErrorCode;
using wsf::RngSeed;
using wsf::format_g10;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingTailRule:
    case ErrorCode::RecurrentTail:
    case ErrorCode::RecurrentProfile:
      return 3;
    case ErrorCode::ZeroSurvival:
    case ErrorCode::RejectionBudgetExceeded:
    case ErrorCode::InsufficientData:
    case ErrorCode::NumericalDegeneracy:
      return 4;
    case ErrorCode::DegenerateConditioning:
      return 5;
    case ErrorCode::EnumerationTooLarge:
      return 6;
    default:
      return 2;
  }
}

// Doubles are rounded through the 10-digit formatter and re-parsed, so the
// JSON writer emits exactly the rounded decimal. Non-finite values become
// strings since JSON has no literal for them.
json jnum(double x) {
  if (!std::isfinite(x)) return json(format_g10(x));
  return json(std::strtod(format_g10(x).c_str(), nullptr));
}

json jnum_vec(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(jnum(x));
  return a;
}

// Minimal CSV quoting: fields holding commas or quotes get wrapped, quotes
// doubled. Shape keys contain commas, everything else here never does.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_payload(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) wsf::fail(ErrorCode::InvalidInput, "cannot write '" + out_path + "'");
  f << payload;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// "--condition EDGE=0|1": the left side is an edge selector (an edge id for
// finite graphs, a level number for profile trees), the right side the
// conditioned status.
std::pair<std::string, bool> parse_condition(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 2 != spec.size())
    wsf::fail(ErrorCode::InvalidInput, "condition must look like EDGE=0 or EDGE=1: '" + spec + "'");
  char s = spec[eq + 1];
  if (s != '0' && s != '1')
    wsf::fail(ErrorCode::InvalidInput, "condition status must be 0 or 1: '" + spec + "'");
  return {spec.substr(0, eq), s == '1'};
}

int parse_level(const std::string& text) {
  try {
    std::size_t pos = 0;
    int level = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return level;
  } catch (const std::exception&) {
    wsf::fail(ErrorCode::InvalidInput, "edge selector for profile trees is a level number: '" + text + "'");
  }
}

struct Options {
  std::string graph, profile, out, law = "rayperc", format = "csv", root, condition;
  int depth = 0;
  long samples = 1000;
  std::uint64_t seed = 0;
  int terms = 32;
};

wsf::net::SphericalProfile profile_for_depth(const std::string& path, int needed) {
  auto p = wsf::net::SphericalProfile::from_json_file(path);
  if (p.depth() < needed) p = p.extended(needed);
  return p;
}

// ---- classify ----

void cmd_classify(const Options& opt) {
  auto profile = wsf::net::SphericalProfile::from_json_file(opt.profile);
  auto report = wsf::potential::classify(profile, opt.terms);
  json j;
  j["classification"] = wsf::potential::tolerance_name(report.classification);
  j["essentially_deletion_tolerant"] = report.essentially_deletion_tolerant;
  j["transient"] = report.transient;
  j["series_test"] = wsf::potential::series_test_name(report.fired);
  j["terms"] = int(report.partial_sums.size());
  j["partial_sums"] = jnum_vec(report.partial_sums);
  j["tail_bound"] = jnum(report.tail_bound);
  print_json(j);
}

// ---- sample ----

void cmd_sample_wilson(const Options& opt) {
  auto network = wsf::net::FiniteNetwork::from_json_file(opt.graph);
  int root = network.vertex_index(opt.root.empty() ? network.vertex_name(0) : opt.root);
  RngSeed seed(opt.seed);
  if (opt.format == "json") {
    json rows = json::array();
    for (long r = 0; r < opt.samples; ++r) {
      auto cfg = wsf::sampler::wilson_ust(network, root, seed.child(std::uint32_t(r)));
      json status;
      for (int e = 0; e < network.edge_count(); ++e)
        status[network.edge(e).id] = int(cfg.status[std::size_t(e)]);
      rows.push_back({{"replica_id", r}, {"status", status}});
    }
    write_payload(opt.out, rows.dump(2) + "\n");
    return;
  }
  std::string csv = "replica_id";
  for (int e = 0; e < network.edge_count(); ++e) csv += "," + network.edge(e).id;
  csv += "\n";
  for (long r = 0; r < opt.samples; ++r) {
    auto cfg = wsf::sampler::wilson_ust(network, root, seed.child(std::uint32_t(r)));
    csv += std::to_string(r);
    for (std::uint8_t s : cfg.status) csv += s ? ",1" : ",0";
    csv += "\n";
  }
  write_payload(opt.out, csv);
}

void emit_component_batch(const Options& opt,
                          const std::function<wsf::net::ComponentSample(const RngSeed&)>& draw) {
  RngSeed seed(opt.seed);
  if (opt.format == "json") {
    json rows = json::array();
    for (long r = 0; r < opt.samples; ++r) {
      auto comp = draw(seed.child(std::uint32_t(r)));
      json card = json::array();
      for (int n = 0; n <= comp.depth(); ++n) card.push_back(comp.cardinality(n));
      rows.push_back({{"replica_id", r},
                      {"reach", comp.reach()},
                      {"cardinality", card},
                      {"shape", comp.shape_key()}});
    }
    write_payload(opt.out, rows.dump(2) + "\n");
    return;
  }
  std::string csv = "replica_id,reach";
  for (int n = 0; n <= opt.depth; ++n) csv += ",c" + std::to_string(n);
  csv += ",shape\n";
  for (long r = 0; r < opt.samples; ++r) {
    auto comp = draw(seed.child(std::uint32_t(r)));
    csv += std::to_string(r) + "," + std::to_string(comp.reach());
    for (int n = 0; n <= comp.depth(); ++n) csv += "," + std::to_string(comp.cardinality(n));
    csv += "," + csv_field(comp.shape_key()) + "\n";
  }
  write_payload(opt.out, csv);
}

// Wired margin: the truncation is taken 30 levels past the requested depth,
// which puts the truncation error of the restricted law far below Monte
// Carlo resolution for every profile the classifier accepts.
constexpr int kWiredMargin = 30;

void cmd_sample_wsf(const Options& opt) {
  auto profile = profile_for_depth(opt.profile, opt.depth + kWiredMargin);
  emit_component_batch(opt, [&](const RngSeed& s) {
    return wsf::sampler::wsf_root_component(profile, opt.depth + kWiredMargin, opt.depth, s);
  });
}

void cmd_sample_component(const Options& opt) {
  auto profile = profile_for_depth(opt.profile, opt.depth);
  if (opt.law == "rayperc") {
    emit_component_batch(
        opt, [&](const RngSeed& s) { return wsf::sampler::root_component_sample(profile, opt.depth, s); });
  } else if (opt.law == "perc") {
    emit_component_batch(
        opt, [&](const RngSeed& s) { return wsf::sampler::perc_component_sample(profile, opt.depth, s); });
  } else {
    emit_component_batch(opt, [&](const RngSeed& s) {
      return wsf::sampler::survival_conditioned_perc(profile, opt.depth, s).component;
    });
  }
}

void cmd_sample_pair(const Options& opt) {
  if (opt.condition.empty())
    wsf::fail(ErrorCode::InvalidInput, "sample pair needs --condition LEVEL=0|1");
  auto [selector, present] = parse_condition(opt.condition);
  int edge_level = parse_level(selector);
  auto profile = profile_for_depth(opt.profile, opt.depth);
  auto status = present ? wsf::net::EdgeStatus::Present : wsf::net::EdgeStatus::Absent;
  RngSeed seed(opt.seed);

  if (opt.format == "json") {
    json rows = json::array();
    for (long r = 0; r < opt.samples; ++r) {
      auto pair = wsf::sampler::conditioned_pair_sample(profile, edge_level, status, opt.depth,
                                                        seed.child(std::uint32_t(r)));
      json child_card = json::array(), root_card = json::array();
      for (int n = 0; n <= pair.child_side.depth(); ++n) child_card.push_back(pair.child_side.cardinality(n));
      for (int n = 0; n <= pair.root_side.depth(); ++n) root_card.push_back(pair.root_side.cardinality(n));
      rows.push_back({{"replica_id", r},
                      {"ray_on_child_side", pair.ray_on_child_side},
                      {"alpha", jnum(pair.alpha)},
                      {"child_cardinality", child_card},
                      {"root_cardinality", root_card},
                      {"child_shape", pair.child_side.shape_key()},
                      {"root_shape", pair.root_side.shape_key()}});
    }
    write_payload(opt.out, rows.dump(2) + "\n");
    return;
  }
  std::string csv = "replica_id,ray_on_child_side,alpha,child_reach,root_reach,child_shape,root_shape\n";
  for (long r = 0; r < opt.samples; ++r) {
    auto pair = wsf::sampler::conditioned_pair_sample(profile, edge_level, status, opt.depth,
                                                      seed.child(std::uint32_t(r)));
    csv += std::to_string(r) + "," + std::to_string(int(pair.ray_on_child_side)) + "," +
           format_g10(pair.alpha) + "," + std::to_string(pair.child_side.reach()) + "," +
           std::to_string(pair.root_side.reach()) + "," + csv_field(pair.child_side.shape_key()) +
           "," + csv_field(pair.root_side.shape_key()) + "\n";
  }
  write_payload(opt.out, csv);
}

// ---- diagnose ----

std::string trajectory_csv(const wsf::martingale::TrajectoryBatch& batch) {
  std::string csv = "replica_id,law";
  for (int n = 0; n <= batch.depth; ++n) csv += ",W_" + std::to_string(n);
  csv += "\n";
  for (std::size_t r = 0; r < batch.trajectories.size(); ++r) {
    csv += std::to_string(r);
    csv += ",";
    csv += wsf::martingale::law_name(batch.trajectories[r].law);
    for (double w : batch.trajectories[r].w) csv += "," + format_g10(w);
    csv += "\n";
  }
  return csv;
}

json trajectory_json(const wsf::martingale::TrajectoryBatch& batch) {
  json rows = json::array();
  for (std::size_t r = 0; r < batch.trajectories.size(); ++r)
    rows.push_back({{"replica_id", r},
                    {"law", wsf::martingale::law_name(batch.trajectories[r].law)},
                    {"w", jnum_vec(batch.trajectories[r].w)}});
  return rows;
}

void cmd_diagnose(const Options& opt) {
  auto profile = profile_for_depth(opt.profile, opt.depth);
  auto law = wsf::martingale::law_from_name(opt.law);
  auto batch =
      wsf::martingale::trajectory_batch(profile, opt.depth, opt.samples, law, RngSeed(opt.seed));

  json j;
  j["law"] = opt.law;
  j["depth"] = batch.depth;
  j["replicas"] = long(batch.trajectories.size());
  json levels = json::array();
  for (int n = 0; n <= batch.depth; ++n) {
    const auto& s = batch.levels[std::size_t(n)];
    levels.push_back({{"n", n},
                      {"mean", jnum(s.mean)},
                      {"se_mean", jnum(s.se_mean)},
                      {"median", jnum(s.median)},
                      {"q25", jnum(s.q25)},
                      {"q75", jnum(s.q75)}});
  }
  j["levels"] = levels;
  std::vector<double> expected;
  for (int n = 0; n <= batch.depth; ++n) expected.push_back(wsf::potential::expected_w(profile, n));
  j["expected_w"] = jnum_vec(expected);

  // The verdict reads ray-biased trajectories; other laws get the summary
  // only (their trajectories lack the drift the verdict is about).
  if (law == wsf::martingale::Law::RayPerc) {
    auto report = wsf::martingale::tolerance_diagnosis(batch.trajectories, profile);
    j["mean_w"] = jnum_vec(report.mean_w);
    j["median_w"] = jnum_vec(report.median_w);
    j["slope_median"] = jnum(report.slope_median);
    j["slope_expected"] = jnum(report.slope_expected);
    j["verdict"] = report.verdict;
    j["heuristic"] = report.heuristic;
  }

  if (!opt.out.empty())
    write_payload(opt.out, opt.format == "json" ? trajectory_json(batch).dump(2) + "\n"
                                                : trajectory_csv(batch));
  print_json(j);
}

// ---- kernel ----

void cmd_kernel(const Options& opt) {
  auto network = wsf::net::FiniteNetwork::from_json_file(opt.graph);
  wsf::detkernel::Kernel kernel;
  json j;
  if (!opt.condition.empty()) {
    auto [selector, present] = parse_condition(opt.condition);
    int edge = network.edge_index(selector);
    auto basis = wsf::detkernel::condition_edge(
        network, edge, present ? wsf::net::EdgeStatus::Present : wsf::net::EdgeStatus::Absent);
    kernel = wsf::detkernel::projection_kernel(basis);
    j["variant"] = "conditioned";
    j["condition"] = {{"edge", selector}, {"status", present ? 1 : 0}};
  } else {
    kernel = wsf::detkernel::transfer_kernel(network, wsf::detkernel::TransferVariant::Wsf);
    j["variant"] = "wsf";
  }

  json ids = json::array();
  for (int e : kernel.edges) ids.push_back(network.edge(e).id);
  j["edges"] = ids;
  auto diag = wsf::detkernel::kernel_diagnostics(kernel);
  j["dim"] = jnum(diag.trace);
  j["symmetry_error"] = jnum(diag.symmetry_error);
  j["idempotency_error"] = jnum(diag.idempotency_error);
  j["eig_min"] = jnum(diag.eig_min);
  j["eig_max"] = jnum(diag.eig_max);

  json singleton;
  for (std::size_t i = 0; i < kernel.edges.size(); ++i)
    singleton[network.edge(kernel.edges[i]).id] = jnum(kernel.k(Eigen::Index(i), Eigen::Index(i)));
  j["singleton"] = singleton;
  json pairs = json::array();
  for (std::size_t i = 0; i < kernel.edges.size(); ++i)
    for (std::size_t k = i + 1; k < kernel.edges.size(); ++k)
      pairs.push_back({network.edge(kernel.edges[i]).id, network.edge(kernel.edges[k]).id,
                       jnum(wsf::detkernel::inclusion_prob(kernel, {kernel.edges[i], kernel.edges[k]}))});
  j["pair"] = pairs;
  json rows = json::array();
  for (Eigen::Index r = 0; r < kernel.k.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < kernel.k.cols(); ++c) row.push_back(jnum(kernel.k(r, c)));
    rows.push_back(row);
  }
  j["kernel"] = rows;

  if (!opt.out.empty()) {
    std::string csv;
    for (std::size_t i = 0; i < kernel.edges.size(); ++i)
      csv += (i ? "," : "") + network.edge(kernel.edges[i]).id;
    csv += "\n";
    for (Eigen::Index r = 0; r < kernel.k.rows(); ++r) {
      for (Eigen::Index c = 0; c < kernel.k.cols(); ++c)
        csv += (c ? "," : "") + format_g10(kernel.k(r, c));
      csv += "\n";
    }
    write_payload(opt.out, csv);
  }
  print_json(j);
}

// ---- oracle ----

void cmd_oracle(const Options& opt) {
  auto network = wsf::net::FiniteNetwork::from_json_file(opt.graph);
  auto dist = wsf::detkernel::enumerate_spanning_trees(network);
  int m = dist.edge_count;

  json j;
  j["edge_count"] = m;
  json ids = json::array();
  for (int e = 0; e < m; ++e) ids.push_back(network.edge(e).id);
  j["edges"] = ids;
  j["tree_count"] = long(dist.trees.size());
  j["total_weight"] = jnum(dist.total_weight);

  json trees = json::array();
  for (std::size_t t = 0; t < dist.trees.size(); ++t) {
    json edges = json::array();
    for (int e = 0; e < m; ++e)
      if (dist.trees[t] >> e & 1u) edges.push_back(network.edge(e).id);
    trees.push_back({{"edges", edges}, {"prob", jnum(dist.prob[t])}});
  }
  j["trees"] = trees;

  json marginals;
  for (int e = 0; e < m; ++e) marginals[network.edge(e).id] = jnum(dist.marginal(e));
  j["marginals"] = marginals;
  json pairs = json::array();
  for (int e = 0; e < m; ++e)
    for (int f = e + 1; f < m; ++f)
      pairs.push_back({network.edge(e).id, network.edge(f).id, jnum(dist.pair_marginal(e, f))});
  j["pair_marginals"] = pairs;

  // Degenerate conditioning events (forced or impossible edges) are skipped
  // rather than reported as errors; the oracle describes what has mass.
  json conditionals = json::array();
  for (int e = 0; e < m; ++e) {
    double pe = dist.marginal(e);
    for (int f = 0; f < m; ++f) {
      if (f == e) continue;
      if (pe > 0.0)
        conditionals.push_back({{"edge", network.edge(f).id},
                                {"given", network.edge(e).id},
                                {"status", 1},
                                {"prob", jnum(dist.conditional_marginal(f, e, true))}});
      if (pe < 1.0)
        conditionals.push_back({{"edge", network.edge(f).id},
                                {"given", network.edge(e).id},
                                {"status", 0},
                                {"prob", jnum(dist.conditional_marginal(f, e, false))}});
    }
  }
  j["conditionals"] = conditionals;

  if (!opt.out.empty())
    write_payload(opt.out, j.dump(2) + "\n");
  else
    print_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanning-forest tolerance toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "master seed (mandatory, no implicit entropy)")->required();
  };
  auto add_samples = [&](CLI::App* cmd) {
    cmd->add_option("--samples", opt.samples, "replica count")->check(CLI::PositiveNumber);
  };
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", opt.out, "output file (default stdout)"); };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", opt.format, "batch format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_law = [&](CLI::App* cmd) {
    cmd->add_option("--law", opt.law, "sampling law")->check(CLI::IsMember({"perc", "rayperc", "survival"}));
  };

  auto* classify = app.add_subcommand("classify", "tolerance class of a profile");
  classify->add_option("--profile", opt.profile, "profile json")->required();
  classify->add_option("--terms", opt.terms, "series evidence length")->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "batch samplers (csv out)");
  sample->require_subcommand(1);

  auto* wilson = sample->add_subcommand("wilson", "spanning trees of a finite network");
  wilson->add_option("--graph", opt.graph, "network json")->required();
  wilson->add_option("--root", opt.root, "walk root (default: first vertex)");
  add_samples(wilson); add_seed(wilson); add_out(wilson); add_format(wilson);

  auto* swsf = sample->add_subcommand("wsf", "root component via the wired truncation");
  swsf->add_option("--profile", opt.profile, "profile json")->required();
  swsf->add_option("--depth", opt.depth, "component depth")->required()->check(CLI::NonNegativeNumber);
  add_samples(swsf); add_seed(swsf); add_out(swsf); add_format(swsf);

  auto* scomp = sample->add_subcommand("component", "root component via ray plus percolation");
  scomp->add_option("--profile", opt.profile, "profile json")->required();
  scomp->add_option("--depth", opt.depth, "component depth")->required()->check(CLI::NonNegativeNumber);
  add_law(scomp); add_samples(scomp); add_seed(scomp); add_out(scomp); add_format(scomp);

  auto* spair = sample->add_subcommand("pair", "two-sided component conditioned on one edge");
  spair->add_option("--profile", opt.profile, "profile json")->required();
  spair->add_option("--depth", opt.depth, "tree depth cap")->required()->check(CLI::PositiveNumber);
  spair->add_option("--condition", opt.condition, "LEVEL=0|1: the conditioned edge's level and status")
      ->required();
  add_samples(spair); add_seed(spair); add_out(spair); add_format(spair);

  auto* diagnose = app.add_subcommand("diagnose", "density trajectory diagnostics");
  diagnose->add_option("--profile", opt.profile, "profile json")->required();
  diagnose->add_option("--depth", opt.depth, "trajectory depth")->required()->check(CLI::PositiveNumber);
  add_law(diagnose); add_samples(diagnose); add_seed(diagnose); add_out(diagnose); add_format(diagnose);

  auto* kernel = app.add_subcommand("kernel", "transfer kernel and inclusion probabilities");
  kernel->add_option("--graph", opt.graph, "network json")->required();
  kernel->add_option("--condition", opt.condition, "EDGE=0|1: condition on one edge's status");
  add_out(kernel);

  auto* oracle = app.add_subcommand("oracle", "exact spanning-tree distribution");
  oracle->add_option("--graph", opt.graph, "network json")->required();
  add_out(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*classify) cmd_classify(opt);
    else if (*wilson) cmd_sample_wilson(opt);
    else if (*swsf) cmd_sample_wsf(opt);
    else if (*scomp) cmd_sample_component(opt);
    else if (*spair) cmd_sample_pair(opt);
    else if (*diagnose) cmd_diagnose(opt);
    else if (*kernel) cmd_kernel(opt);
    else if (*oracle) cmd_oracle(opt);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

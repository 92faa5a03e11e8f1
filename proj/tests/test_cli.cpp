#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "support/oracles.hpp"

// WSFTOOL_PATH is injected by the build; every test drives the real binary.

namespace {

namespace fs = std::filesystem;
using oracles::run_command;

struct Fixtures {
  fs::path dir;
  std::string binary_json, poly2_json, ray_json, k3_json, edge_json;

  Fixtures() {
    dir = fs::temp_directory_path() / ("wsftool-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto put = [&](const char* name, const char* text) {
      fs::path p = dir / name;
      std::ofstream(p) << text;
      return p.string();
    };
    binary_json = put("binary.json", R"({"rule":"binary","depth":40})");
    poly2_json = put("poly2.json", R"({"rule":"poly","gamma":2.0,"depth":40})");
    ray_json = put("ray.json", R"({"rule":"geometric","b":1,"depth":40})");
    k3_json = put("k3.json",
                  R"({"vertices":["a","b","c"],"edges":[{"u":"a","v":"b"},{"u":"b","v":"c"},{"u":"c","v":"a"}]})");
    edge_json = put("edge.json", R"({"vertices":["a","b"],"edges":[{"u":"a","v":"b"}]})");
  }
  ~Fixtures() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

std::string tool() { return std::string(WSFTOOL_PATH); }

}  // namespace

TEST_CASE("classify command") {
  Fixtures fx;
  auto r = run_command(tool() + " classify --profile " + fx.binary_json);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"classification\": \"ChangeIntolerant\"") != std::string::npos);
  CHECK(r.output.find("\"series_test\": \"ratio\"") != std::string::npos);

  auto p = run_command(tool() + " classify --profile " + fx.poly2_json);
  CHECK(p.exit_code == 0);
  CHECK(p.output.find("InsertionTolerant") != std::string::npos);
  CHECK(p.output.find("\"essentially_deletion_tolerant\": true") != std::string::npos);

  CHECK(run_command(tool() + " classify --profile " + fx.ray_json).exit_code == 3);
  CHECK(run_command(tool() + " classify --profile /no/such/file.json").exit_code == 2);
}

TEST_CASE("sampling commands are deterministic per seed") {
  Fixtures fx;
  std::string cmd = tool() + " sample component --profile " + fx.binary_json +
                    " --depth 5 --samples 60 --seed 42";
  auto a = run_command(cmd);
  auto b = run_command(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
  auto c = run_command(tool() + " sample component --profile " + fx.binary_json +
                       " --depth 5 --samples 60 --seed 43");
  CHECK(a.output != c.output);

  // header documents the columns
  CHECK(a.output.rfind("replica_id,reach,c0,c1,c2,c3,c4,c5,shape\n", 0) == 0);

  // the seed flag is mandatory
  CHECK(run_command(tool() + " sample component --profile " + fx.binary_json +
                    " --depth 5 --samples 10").exit_code == 2);
}

TEST_CASE("wilson and wsf sample batches") {
  Fixtures fx;
  auto w = run_command(tool() + " sample wilson --graph " + fx.k3_json +
                       " --samples 20 --seed 7 --root a");
  REQUIRE(w.exit_code == 0);
  CHECK(w.output.rfind("replica_id,e1,e2,e3\n", 0) == 0);
  CHECK(std::count(w.output.begin(), w.output.end(), '\n') == 21);

  auto s = run_command(tool() + " sample wsf --profile " + fx.binary_json +
                       " --depth 3 --samples 10 --seed 9");
  REQUIRE(s.exit_code == 0);
  CHECK(s.output.rfind("replica_id,reach,c0,c1,c2,c3,shape\n", 0) == 0);

  auto p = run_command(tool() + " sample pair --profile " + fx.binary_json +
                       " --depth 3 --samples 10 --seed 3 --condition 1=1");
  REQUIRE(p.exit_code == 0);
  CHECK(p.output.rfind("replica_id,ray_on_child_side,alpha,child_reach,root_reach,", 0) == 0);
  CHECK(run_command(tool() + " sample pair --profile " + fx.binary_json +
                    " --depth 3 --samples 5 --seed 3 --condition 1=2").exit_code == 2);
  CHECK(run_command(tool() + " sample pair --profile " + fx.binary_json +
                    " --depth 3 --samples 5 --seed 3 --condition nonsense").exit_code == 2);
}

TEST_CASE("diagnose command") {
  Fixtures fx;
  fs::path csv = fs::temp_directory_path() / "wsftool-traj.csv";
  auto r = run_command(tool() + " diagnose --profile " + fx.binary_json +
                       " --depth 6 --samples 400 --seed 11 --out " + csv.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("\"verdict\": \"CONSISTENT-WITH-DIVERGENCE\"") != std::string::npos);
  CHECK(r.output.find("\"expected_w\"") != std::string::npos);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "replica_id,law,W_0,W_1,W_2,W_3,W_4,W_5,W_6");
  std::error_code ec;
  fs::remove(csv, ec);

  CHECK(run_command(tool() + " diagnose --profile " + fx.binary_json +
                    " --depth 6 --samples 10 --seed 1").exit_code == 4);

  auto p = run_command(tool() + " diagnose --profile " + fx.poly2_json +
                       " --depth 8 --samples 400 --seed 5");
  CHECK(p.exit_code == 0);
  CHECK(p.output.find("CONSISTENT-WITH-BOUNDEDNESS") != std::string::npos);
}

TEST_CASE("kernel and oracle commands") {
  Fixtures fx;
  auto k = run_command(tool() + " kernel --graph " + fx.k3_json);
  REQUIRE(k.exit_code == 0);
  CHECK(k.output.find("0.6666666667") != std::string::npos);

  auto kc = run_command(tool() + " kernel --graph " + fx.k3_json + " --condition e1=1");
  REQUIRE(kc.exit_code == 0);
  CHECK(kc.output.find("\"e2\": 0.5") != std::string::npos);

  CHECK(run_command(tool() + " kernel --graph " + fx.edge_json + " --condition e1=0").exit_code == 5);
  CHECK(run_command(tool() + " kernel --graph " + fx.k3_json + " --condition zz=1").exit_code == 2);

  auto o = run_command(tool() + " oracle --graph " + fx.k3_json);
  REQUIRE(o.exit_code == 0);
  CHECK(o.output.find("\"tree_count\": 3") != std::string::npos);
  CHECK(o.output.find("0.3333333333") != std::string::npos);
}

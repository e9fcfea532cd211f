// SPDX-License-Identifier: Apache-2.0
//
// riscf — RIS-assisted cell-free MIMO downlink simulator
// Copyright (C) 2026 riscf contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "riscf.hpp"
#include "riscf/cli.hpp"

namespace fs = std::filesystem;
using riscf::cli::run_cli;

namespace {

// Small system so CLI round trips stay fast.
const std::vector<std::string> kSmall = {
    "--override", "num_aps=2",      "--override", "ap_antennas=4",
    "--override", "num_ues=3",      "--override", "ue_antennas=2",
    "--override", "num_ris=2",      "--override", "ris_grid_h=3",
    "--override", "ris_grid_v=3",   "--override", "quota_ue_per_ris=2",
    "--override", "quota_ris_per_ue=1"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("riscf_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CoutCapture {
  std::stringstream buffer;
  std::streambuf* saved;
  CoutCapture() : saved(std::cout.rdbuf(buffer.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(saved); }
};

} // namespace

TEST_CASE("validate accepts the defaults and rejects overloads") {
  {
    CoutCapture capture;
    CHECK(run_cli({"validate"}) == 0);
    CHECK(capture.buffer.str() == "ok\n");
  }
  // 20 UEs with 2 antennas exceed 4x4 AP antennas
  CHECK(run_cli({"validate", "--override", "num_ues=20", "--override",
                 "ue_antennas=2"}) == 1);
  CHECK(run_cli({"run", "--override", "num_ues=20", "--override",
                 "ue_antennas=2"}) == 1);
  // unknown key is a config error
  CHECK(run_cli({"validate", "--override", "nope=1"}) == 1);
}

TEST_CASE("bad invocations exit with usage errors") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"sweep"}) == 1); // missing required axis/grid
  CHECK(run_cli({"run", "--no-such-flag"}) == 1);
  CHECK(run_cli({"run", "--scheme", "bogus"}) == 1);
}

TEST_CASE("run emits a JSON result and artifacts") {
  TempDir dir("run");
  std::string out;
  {
    CoutCapture capture;
    const int rc = run_cli(with_small({"run", "--seed", "11", "-o",
                                       dir.path.string(), "--dump-traces"}));
    REQUIRE(rc == 0);
    out = capture.buffer.str();
  }
  const auto j = nlohmann::json::parse(out);
  CHECK(j.at("scheme") == "proposed");
  CHECK(j.at("wsr").get<double>() > 0.0);
  CHECK(j.at("per_ue_rates").size() == 3);
  CHECK(j.at("config").at("run.rng_seed") == "11");
  CHECK(j.at("provenance").get<std::string>().rfind("riscf-", 0) == 0);

  CHECK(fs::exists(dir.path / "run.json"));
  CHECK(fs::exists(dir.path / "association.csv"));
  CHECK(fs::exists(dir.path / "mm_trace.csv"));
  CHECK(fs::exists(dir.path / "bd_diagnostics.csv"));
  CHECK(slurp(dir.path / "mm_trace.csv").rfind("# riscf-", 0) == 0);

  // association CSV is K rows of M binary entries
  std::istringstream assoc(slurp(dir.path / "association.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(assoc, line)) {
    ++rows;
    CHECK(line.size() == 3); // "x,y"
  }
  CHECK(rows == 3);
}

TEST_CASE("sweep grid produces one row per point and scheme") {
  TempDir dir("sweep");
  {
    CoutCapture capture;
    const int rc = run_cli(with_small(
        {"sweep", "--axis", "power_dbm", "--grid", "12:3:27", "--schemes",
         "proposed,without_ris", "--drops", "2", "--seed", "3", "-o",
         dir.path.string()}));
    REQUIRE(rc == 0);
  }
  const std::string csv = slurp(dir.path / "sweep.csv");
  REQUIRE_FALSE(csv.empty());
  CHECK(csv.rfind("# riscf-", 0) == 0);

  std::istringstream in(csv);
  std::string line;
  int comment = 0, data = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) == 0) {
      ++comment;
      continue;
    }
    if (!header_seen) {
      CHECK(line == "sweep_value,scheme,mean_wsr,stderr,n");
      header_seen = true;
      continue;
    }
    ++data;
  }
  CHECK(comment > 10); // full config echo
  CHECK(data == 6 * 2);
}

TEST_CASE("identical invocations give byte-identical files") {
  TempDir dir_a("bytes_a"), dir_b("bytes_b");
  const auto args = [&](const fs::path& out) {
    return with_small({"sweep", "--axis", "csi_delta_r", "--grid",
                       "0:0.3:0.6", "--schemes", "proposed", "--drops", "2",
                       "--seed", "5", "-o", out.string()});
  };
  {
    CoutCapture capture;
    REQUIRE(run_cli(args(dir_a.path)) == 0);
    REQUIRE(run_cli(args(dir_b.path)) == 0);
  }
  CHECK(slurp(dir_a.path / "sweep.csv") == slurp(dir_b.path / "sweep.csv"));
}

TEST_CASE("cdf output satisfies the CDF axioms") {
  TempDir dir("cdf");
  {
    CoutCapture capture;
    REQUIRE(run_cli(with_small({"cdf", "--schemes", "proposed", "--drops",
                                "8", "--seed", "2", "-o",
                                dir.path.string()})) == 0);
  }
  std::istringstream in(slurp(dir.path / "cdf.csv"));
  std::string line;
  double prev_wsr = -1e300, prev_cdf = 0.0, last_cdf = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("scheme", 0) == 0)
      continue;
    std::stringstream row(line);
    std::string scheme, wsr_s, cdf_s;
    std::getline(row, scheme, ',');
    std::getline(row, wsr_s, ',');
    std::getline(row, cdf_s, ',');
    const double wsr = std::stod(wsr_s);
    const double cdf = std::stod(cdf_s);
    CHECK(wsr >= prev_wsr);
    CHECK(cdf > prev_cdf);
    CHECK(cdf <= 1.0 + 1e-12);
    prev_wsr = wsr;
    prev_cdf = cdf;
    last_cdf = cdf;
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(last_cdf == Catch::Approx(1.0));
}

TEST_CASE("channel dump round-trips through the regression format") {
  TempDir dir("dump");
  {
    CoutCapture capture;
    REQUIRE(run_cli(with_small({"dump-channels", "--seed", "9", "-o",
                                dir.path.string()})) == 0);
  }
  const auto j = nlohmann::json::parse(slurp(dir.path / "channels.json"));
  const riscf::ChannelSet parsed = riscf::channels_from_json(j);
  REQUIRE(parsed.num_ues() == 3);
  REQUIRE(parsed.num_ris() == 2);
  CHECK(parsed.direct[0].n_rows == 2);
  CHECK(parsed.direct[0].n_cols == 8);
  CHECK(parsed.ap_ris[0].n_rows == 9);
  CHECK(parsed.ris_ue[1][2].n_cols == 9);

  // must agree with a direct in-process generation at the same seed
  riscf::SystemConfig cfg;
  cfg.num_aps = 2;
  cfg.ap_antennas = 4;
  cfg.num_ues = 3;
  cfg.ue_antennas = 2;
  cfg.num_ris = 2;
  cfg.ris_grid_h = 3;
  cfg.ris_grid_v = 3;
  cfg.quota_ue_per_ris = 2;
  cfg.quota_ris_per_ue = 1;
  cfg.rng_seed = 9;
  riscf::Rng topo_rng = riscf::Rng::derived(9, {riscf::stream::topology});
  const auto topo = riscf::generate_topology(cfg, topo_rng);
  riscf::Rng chan_rng = riscf::Rng::derived(9, {riscf::stream::channels});
  const auto truth = riscf::generate_channels(topo, cfg, chan_rng);
  CHECK(arma::norm(parsed.direct[1] - truth.direct[1], "fro") <
        1e-12 * arma::norm(truth.direct[1], "fro"));
}

TEST_CASE("config files feed the CLI") {
  TempDir dir("cfgfile");
  const fs::path cfg_path = dir.path / "case.cfg";
  std::ofstream(cfg_path) << "[system]\n"
                             "num_aps = 2\n"
                             "ap_antennas = 4\n"
                             "num_ues = 3\n"
                             "ue_antennas = 2\n"
                             "num_ris = 2\n"
                             "ris_grid_h = 3\n"
                             "ris_grid_v = 3\n"
                             "[matching]\n"
                             "quota_ue_per_ris = 2\n"
                             "quota_ris_per_ue = 1\n";
  {
    CoutCapture capture;
    CHECK(run_cli({"validate", "-c", cfg_path.string()}) == 0);
  }
  CHECK(run_cli({"validate", "-c", (dir.path / "missing.cfg").string()}) == 1);
}

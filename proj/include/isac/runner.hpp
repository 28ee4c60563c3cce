// SPDX-License-Identifier: Apache-2.0
//
// isac-hbf: hybrid beamforming for integrated sensing and communication
// Copyright (C) 2026 The isac-hbf authors
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
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/scenario.hpp"
#include "isac/tradeoff.hpp"

namespace isac {

inline const std::vector<std::string> kModes = {"pcrb-min", "tradeoff", "pattern", "sweep",
                                                "validate-mc"};

struct RunConfig {
  std::string mode = "tradeoff";
  Scenario scenario = Scenario::defaults();
  std::vector<double> rate_grid{1, 2, 3, 4, 5, 6, 7, 8};
  TradeoffOptions solver;
  int mc_trials = 2000;
  int mc_grid = 4096;
  int pattern_points = 2048;
  std::string out_dir = "out";
  int workers = 0;
  std::string input_hash;  // git blob hash of the config bytes
};

// Strict parse: unknown keys, wrong types and invalid values throw
// ConfigError. Power and noise are given in dBm, gains in dB.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// sha1("blob <size>\0" + bytes), lower-case hex.
std::string git_blob_hash(const std::string& bytes);

// Every field after defaults and overrides, as compact JSON.
std::string resolved_config(const RunConfig& cfg);

struct PcrbMinResult {
  HybridBeamformer hybrid;
  CMatrix digital_covariance;
  double pcrb_hybrid = 0.0;
  double pcrb_digital = 0.0;
  double eig_ratio = 0.0;
  int newton_steps = 0;
};
PcrbMinResult pcrb_min(const Instance& in, int n_rf, double power, std::uint64_t seed);

struct SweepRow {
  double rate_target = 0.0;
  std::string status;  // ok, infeasible, solver_failure
  double pcrb_upper_proposed = 0.0;
  double pcrb_exact_proposed = 0.0;
  double pcrb_digital = 0.0;
  double pcrb_bench1 = 0.0;
  double pcrb_bench2 = 0.0;
  bool bench1_feasible = false;
  bool bench2_feasible = false;
  double achieved_rate = 0.0;
  int outer_iters = 0;
  double inherited_from = 0.0;  // rate target whose solution was kept, NaN if own
  TradeoffSolution proposed;
};

// Chain over an increasing grid. Each point runs the alternating optimization from the
// previous point's analog matrix and from the phases of the fully-digital
// optimum, keeping the better result. A point whose PCRB exceeds
// that of the next feasible point inherits the next solution, which meets
// the lower target too.
std::vector<SweepRow> sweep_rate(const Instance& in, const RunConfig& cfg,
                                 std::ostream* log = nullptr);

// Runs cfg.mode and writes result.json plus the mode's CSV into cfg.out_dir.
// Exit codes: 0 success, 1 solver failure, 2 infeasible rate.
int run_scenario(const RunConfig& cfg, std::ostream& log);

// Minimal SVG line chart: first CSV column against every other column.
void csv_to_svg(const std::string& csv_path, const std::string& svg_path);

}  // namespace isac

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
#include <iostream>

#include "CLI11.hpp"

#include "isac/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hybrid beamforming for integrated sensing and communication"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = -1;
  for (const auto& mode : isac::kModes) {
    auto* sub = app.add_subcommand(mode, "run mode " + mode);
    sub->add_option("--config", config_path, "scenario JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "solver and Monte-Carlo seed");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::NonNegativeNumber);
  }
  std::string csv_path, svg_path;
  auto* plot = app.add_subcommand("plot", "SVG line chart of a result CSV");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--out", svg_path, "output SVG (default: input with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  if (plot->parsed()) {
    try {
      if (svg_path.empty()) {
        svg_path = csv_path.substr(0, csv_path.rfind('.')) + ".svg";
      }
      isac::csv_to_svg(csv_path, svg_path);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "plot: " << e.what() << "\n";
      return 1;
    }
  }

  isac::RunConfig cfg;
  try {
    cfg = isac::load_config(config_path);
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  }
  cfg.mode = app.get_subcommands().front()->get_name();
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed != 0) cfg.scenario.seed = seed;
  if (workers >= 0) cfg.workers = workers;

  try {
    return isac::run_scenario(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

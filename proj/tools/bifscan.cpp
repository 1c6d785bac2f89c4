// Copyright 2026 The bifscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bifscan: BIF detection and CPF scans from the command line.

#include "bif/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"CPF correlation scans and bidirectional-information-flow checks"};
  app.require_subcommand(1);

  std::string panel, model, out;
  double threshold = bif::kDefaultBifThreshold;

  auto* fig1 = app.add_subcommand("fig1", "write one equal-interval CPF panel (a, b or c) as CSV");
  fig1->add_option("panel", panel, "a, b or c")->required()->check(CLI::IsMember({"a", "b", "c"}));
  fig1->add_option("--out", out, "output CSV path")->required();

  auto* check = app.add_subcommand("check-bif", "random-scheme Markov test; exit 1 when a BIF is detected");
  check->add_option("model", model, "model file (TOML)")->required();
  check->add_option("--out", out, "output CSV path")->required();
  check->add_option("--threshold", threshold, "largest Markov residual treated as zero")
      ->check(CLI::NonNegativeNumber);

  auto* scan = app.add_subcommand("scan", "deterministic and random CPF over the model's grid");
  scan->add_option("model", model, "model file (TOML)")->required();
  scan->add_option("--out", out, "output CSV path")->required();

  auto* mc = app.add_subcommand("mc", "Monte Carlo joint tables against the exact engine");
  mc->add_option("model", model, "model file (TOML)")->required();
  mc->add_option("--out", out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*fig1) return bif::cmd_fig1(panel, out, std::cerr);
  if (*check) return bif::cmd_check_bif(model, out, threshold, std::cerr);
  if (*scan) return bif::cmd_scan(model, out, std::cerr);
  return bif::cmd_mc(model, out, std::cerr);
}

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

// Command implementations behind the bifscan executable. Every command
// returns its exit code: 0 success / no BIF, 1 BIF detected (check-bif
// only), 2 error (diagnostic on `err`).

#pragma once

#include "bif/model_file.hpp"

#include <iosfwd>
#include <string>

namespace bif {

inline constexpr double kDefaultBifThreshold = 1e-9;

struct ScanResult {
  std::string csv;
  double max_residual = 0.0;    // over rows of the random scheme
  double max_random_cpf = 0.0;  // max |C| over rows of the random scheme
};

/// Deterministic and random CPF over the declared grid (random only when
/// random_only is set); MC columns when the file has an mc block.
ScanResult scan_model(const ModelFile& mf, bool random_only = false);

/// Per-cell Monte Carlo frequencies against the exact table.
std::string mc_model(const ModelFile& mf);

int cmd_fig1(const std::string& panel, const std::string& out_path, std::ostream& err);
int cmd_check_bif(const std::string& model_path, const std::string& out_path, double threshold,
                  std::ostream& err);
int cmd_scan(const std::string& model_path, const std::string& out_path, std::ostream& err);
int cmd_mc(const std::string& model_path, const std::string& out_path, std::ostream& err);

}  // namespace bif

// Copyright 2026 The BaLeRO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BALERO_BENCHMARK_H
#define BALERO_BENCHMARK_H

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "balero/estimators.h"
#include "balero/metrics.h"
#include "balero/simulator.h"

namespace balero {

struct BenchmarkConfig {
    std::string scenario;
    /// Shot counts to evaluate. Smaller counts reuse a prefix of the largest
    /// sample, so one seed describes one growing experiment.
    std::vector<int64_t> n_shots = {100, 1000, 10000};
    int n_seeds = 20;
    uint64_t seed = 1;
    InferenceOptions inference;
    /// ry-sweep: theta_k = 2 pi k / theta_points.
    int theta_points = 41;
    /// bitstring-prep and bv-output target.
    std::string bitstring = "0110";
    /// bv-output; solved from the detector when absent.
    std::optional<double> depolarizing;
    /// Shots per prepared state used to calibrate the simulated device;
    /// 0 skips calibration and hands the generating models to the estimators.
    int64_t calibration_shots = 100000;
    std::vector<Estimator> estimators = {Estimator::Balero, Estimator::Counts, Estimator::Inversion};

    void validate() const;
};

/// Data for one plot, written as CSV with a header row.
struct PlotTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct BenchmarkResult {
    std::string scenario;
    std::vector<MetricReport> metrics;
    std::vector<PlotTable> plots;
    /// Scenario constants such as the solved depolarizing strength.
    std::vector<std::pair<std::string, double>> facts;
    /// Number of pairwise runs that stopped on max_sweeps.
    int max_sweeps_hits = 0;
};

std::vector<std::string> scenario_names();

BenchmarkResult run_benchmark(const BenchmarkConfig &config);

/// Depolarizing strength at which separatrix counts are expected to miss the
/// ideal bitstring by `target` in total population error:
/// 2 (1 - P(assigned target)) = target.
double solve_depolarizing(const ConfusionMatrix &confusion, BasisIndex target, double target_error);

/// Seed of the `index`-th stream derived from `base`.
uint64_t derive_seed(uint64_t base, uint64_t index);

}  // namespace balero

#endif

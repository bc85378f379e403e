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

#ifndef BALERO_METRICS_H
#define BALERO_METRICS_H

#include <cstdint>
#include <span>
#include <string>

#include "balero/bayes_single.h"
#include "balero/simulator.h"

namespace balero {

struct MetricReport {
    std::string name;
    double value = 0;
    int64_t n_shots = 0;
    /// "balero", "counts" or "inversion".
    std::string estimator;
    uint64_t seed = 0;
};

/// sum_i |exact_i - estimated_i|.
double total_population_error(const TrueState &exact, const PopulationEstimate &estimated);
double total_population_error(std::span<const double> exact, std::span<const double> estimated);

/// (1 / 2pi) * integral over one period of |cos^2(theta/2) - rho_g(theta)|,
/// by the periodic trapezoidal rule. `theta_grid` must be strictly increasing
/// and lie in [0, 2pi].
double avg_ground_population_error(std::span<const double> theta_grid, std::span<const double> estimates);

/// 1 - (rho_g|g + rho_e|e) / 2.
double readout_error(double prepared_ground_estimate, double prepared_excited_estimate);

}  // namespace balero

#endif

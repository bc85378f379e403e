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

#include "balero/metrics.h"

#include <cmath>
#include <numbers>

#include "balero/error.h"

namespace balero {

double total_population_error(std::span<const double> exact, std::span<const double> estimated) {
    if (exact.size() != estimated.size()) {
        throw Error(ErrorCode::DimensionMismatch, "population vectors have different lengths");
    }
    double total = 0;
    for (size_t k = 0; k < exact.size(); ++k) {
        total += std::abs(exact[k] - estimated[k]);
    }
    return total;
}

double total_population_error(const TrueState &exact, const PopulationEstimate &estimated) {
    return total_population_error(exact.populations, estimated.populations);
}

double avg_ground_population_error(std::span<const double> theta_grid, std::span<const double> estimates) {
    const double period = 2 * std::numbers::pi;
    if (theta_grid.size() != estimates.size() || theta_grid.size() < 2) {
        throw Error(ErrorCode::GridMismatch, "theta grid and estimates must align and hold at least two points");
    }
    for (size_t k = 0; k < theta_grid.size(); ++k) {
        if (theta_grid[k] < 0 || theta_grid[k] > period || (k > 0 && !(theta_grid[k] > theta_grid[k - 1]))) {
            throw Error(ErrorCode::GridMismatch, "theta grid must be strictly increasing within [0, 2pi]");
        }
    }
    auto err = [&](size_t k) {
        double c = std::cos(theta_grid[k] / 2);
        return std::abs(c * c - estimates[k]);
    };
    double integral = 0;
    for (size_t k = 1; k < theta_grid.size(); ++k) {
        integral += 0.5 * (theta_grid[k] - theta_grid[k - 1]) * (err(k) + err(k - 1));
    }
    // Close the period; the integrand is 2pi-periodic.
    double wrap = theta_grid.front() + period - theta_grid.back();
    integral += 0.5 * wrap * (err(0) + err(theta_grid.size() - 1));
    return integral / period;
}

double readout_error(double prepared_ground_estimate, double prepared_excited_estimate) {
    return 1 - 0.5 * (prepared_ground_estimate + prepared_excited_estimate);
}

}  // namespace balero

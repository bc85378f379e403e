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

#ifndef BALERO_BAYES_SINGLE_H
#define BALERO_BAYES_SINGLE_H

#include <span>
#include <vector>

#include "balero/detector_model.h"

namespace balero {

/// Posterior density over rho_g on a uniform grid of [0, 1] (rho_e = 1 - rho_g).
/// `log_weights[k]` is the log density at rho_g = k / (n_points - 1);
/// normalized so the trapezoidal integral of exp(log_weights) is 1.
struct PosteriorGrid1D {
    int n_points = 0;
    std::vector<double> log_weights;

    double rho_at(int k) const {
        return static_cast<double>(k) / (n_points - 1);
    }
    double trapezoid_mass() const;
};

/// Populations over computational basis states, with posterior std devs.
struct PopulationEstimate {
    std::vector<double> populations;
    std::vector<double> std_devs;
};

constexpr int kDefaultSingleGridPoints = 1001;

PosteriorGrid1D uniform_prior(int n_points = kDefaultSingleGridPoints);

/// log(rho_g * P_g(x) + (1 - rho_g) * P_e(x)).
double log_likelihood_single(const QubitResponseModel &model, double rho_g, double x);

/// Multiplies in the likelihood of every shot and renormalizes once.
PosteriorGrid1D update_posterior(const PosteriorGrid1D &grid, const QubitResponseModel &model, std::span<const double> shots);

/// Posterior mean and std of rho_g by trapezoidal quadrature.
PopulationEstimate estimate(const PosteriorGrid1D &grid);

/// Shifts log_weights so the trapezoidal integral is 1.
void normalize(PosteriorGrid1D &grid);

}  // namespace balero

#endif

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

#ifndef BALERO_ESTIMATORS_H
#define BALERO_ESTIMATORS_H

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balero/baselines.h"
#include "balero/bayes_single.h"
#include "balero/multiqubit.h"

namespace balero {

enum class Estimator { Balero, Counts, Inversion };

std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view name);
/// "all" expands to every estimator.
std::vector<Estimator> parse_estimator_list(std::string_view name);

struct InferenceOptions {
    int grid_points = kDefaultSingleGridPoints;
    int pair_grid_points = kDefaultPairGridPoints;
    int simplex_divisions = kDefaultSimplexDivisions;
    double epsilon = 1e-4;
    int max_sweeps = 50;

    /// Throws InvalidArgument / InvalidResolution on out-of-range values.
    void validate() const;
};

/// Which posterior backs a Bayesian estimate.
enum class InferencePath { Single, Joint, Pairwise };
std::string_view inference_path_name(InferencePath path);

struct BaleroOutput {
    PopulationEstimate estimate;
    InferencePath path = InferencePath::Single;
    /// Present on the single-qubit path.
    std::optional<PosteriorGrid1D> posterior;
    /// Present on the pairwise path.
    std::optional<PairwiseResult> pairwise;
};

/// Bayesian populations: the 1D grid for one qubit, the exact simplex for
/// two, the pairwise heuristic seeded from `separatrices` counts beyond.
BaleroOutput run_balero(
    std::span<const QubitResponseModel> models,
    std::span<const Separatrix> separatrices,
    std::span<const ShotVector> shots,
    const InferenceOptions &options = {});

/// Separatrix counts fractions over 2^n basis states.
std::vector<double> run_counts(std::span<const Separatrix> separatrices, std::span<const ShotVector> shots);

InversionResult run_inversion(
    std::span<const QubitResponseModel> models, std::span<const Separatrix> separatrices, std::span<const ShotVector> shots);

std::vector<Separatrix> fit_separatrices(std::span<const QubitResponseModel> models);

}  // namespace balero

#endif

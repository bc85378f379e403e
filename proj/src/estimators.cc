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

#include "balero/estimators.h"

#include "balero/error.h"

namespace balero {

std::string_view estimator_name(Estimator e) {
    switch (e) {
        case Estimator::Balero:
            return "balero";
        case Estimator::Counts:
            return "counts";
        case Estimator::Inversion:
            return "inversion";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    for (Estimator e : {Estimator::Balero, Estimator::Counts, Estimator::Inversion}) {
        if (estimator_name(e) == name) {
            return e;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> parse_estimator_list(std::string_view name) {
    if (name == "all") {
        return {Estimator::Balero, Estimator::Counts, Estimator::Inversion};
    }
    return {parse_estimator(name)};
}

void InferenceOptions::validate() const {
    if (grid_points < 3 || pair_grid_points < 3) {
        throw Error(ErrorCode::InvalidResolution, "grid resolutions must be at least 3 points");
    }
    if (simplex_divisions < 1) {
        throw Error(ErrorCode::InvalidResolution, "simplex divisions must be positive");
    }
    if (!(epsilon > 0)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    }
    if (max_sweeps < 0) {
        throw Error(ErrorCode::InvalidArgument, "max_sweeps must be non-negative");
    }
}

std::string_view inference_path_name(InferencePath path) {
    switch (path) {
        case InferencePath::Single:
            return "single";
        case InferencePath::Joint:
            return "joint";
        case InferencePath::Pairwise:
            return "pairwise";
    }
    return "unknown";
}

BaleroOutput run_balero(
    std::span<const QubitResponseModel> models,
    std::span<const Separatrix> separatrices,
    std::span<const ShotVector> shots,
    const InferenceOptions &options) {
    options.validate();
    if (models.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no response models");
    }
    BaleroOutput out;
    if (models.size() == 1) {
        std::vector<double> xs;
        xs.reserve(shots.size());
        for (const ShotVector &v : shots) {
            if (v.size() != 1) {
                throw Error(ErrorCode::DimensionMismatch, "single-qubit shots must carry one detector value");
            }
            xs.push_back(v[0]);
        }
        out.posterior = update_posterior(uniform_prior(options.grid_points), models[0], xs);
        out.estimate = estimate(*out.posterior);
        out.path = InferencePath::Single;
        return out;
    }
    if (static_cast<int>(models.size()) <= kMaxJointQubits) {
        SimplexPosterior prior = uniform_simplex_prior(static_cast<int>(models.size()), options.simplex_divisions);
        out.estimate = estimate(joint_update(prior, models, shots));
        out.path = InferencePath::Joint;
        return out;
    }
    if (separatrices.size() != models.size()) {
        throw Error(ErrorCode::DimensionMismatch, "need one separatrix per qubit to seed the pairwise path");
    }
    Counts counts = assign_counts(separatrices, shots);
    PairwiseState state =
        pairwise_state_from_counts(counts_to_vector(counts, static_cast<int>(models.size())), options.epsilon, options.max_sweeps);
    PairwiseResult result = iterate_pairwise(state, models, shots, options.pair_grid_points);
    out.estimate.populations = result.state.estimates;
    out.estimate.std_devs = result.state.std_devs;
    out.path = InferencePath::Pairwise;
    out.pairwise = std::move(result);
    return out;
}

std::vector<double> run_counts(std::span<const Separatrix> separatrices, std::span<const ShotVector> shots) {
    return count_fractions(assign_counts(separatrices, shots), static_cast<int>(separatrices.size()));
}

InversionResult run_inversion(
    std::span<const QubitResponseModel> models, std::span<const Separatrix> separatrices, std::span<const ShotVector> shots) {
    return invert_confusion(run_counts(separatrices, shots), build_confusion(models, separatrices));
}

std::vector<Separatrix> fit_separatrices(std::span<const QubitResponseModel> models) {
    std::vector<Separatrix> out;
    out.reserve(models.size());
    for (const QubitResponseModel &m : models) {
        out.push_back(fit_separatrix(m));
    }
    return out;
}

}  // namespace balero

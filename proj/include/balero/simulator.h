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

#ifndef BALERO_SIMULATOR_H
#define BALERO_SIMULATOR_H

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "balero/detector_model.h"
#include "balero/multiqubit.h"

namespace balero {

/// Exact populations of a prepared register, over 2^n basis states.
struct TrueState {
    std::vector<double> populations;

    int n_qubits() const;
};

/// Throws unless the populations form a distribution over 2^n states.
void validate(const TrueState &state);

struct NoiseConfig {
    double depolarizing_strength = 0;
    uint64_t seed = 0;
};

/// R_y(theta) applied to |0>.
TrueState ry_populations(double theta);
/// (|00> + |11>) / sqrt(2).
TrueState bell_populations();
TrueState bitstring_populations(std::string_view bits);
/// (1 - lambda) * rho + lambda * uniform.
TrueState apply_depolarizing(const TrueState &state, const NoiseConfig &cfg);

struct SampleOptions {
    bool lift_to_iq = false;
    /// Spread orthogonal to the projection axis when lifting; defaults to
    /// each qubit's p_g main std, i.e. round clouds.
    std::optional<double> transverse_std;
};

struct ShotBatch {
    std::vector<ShotVector> x;
    /// Filled when lifting to IQ: iq[s][q].
    std::vector<std::vector<IQShot>> iq;
    /// Basis state drawn for every shot.
    std::vector<BasisIndex> prepared;
};

/// Draws a basis state per shot from `state`, then a detector value per qubit
/// from P_g or P_e. Deterministic in `seed`.
ShotBatch sample_shots(
    const TrueState &state,
    std::span<const QubitResponseModel> models,
    size_t n_shots,
    uint64_t seed,
    const SampleOptions &options = {});

/// Reset-and-measure plus flip-and-measure records in the IQ plane.
CalibrationDataset sample_calibration(const QubitResponseModel &truth, size_t n_shots_per_state, uint64_t seed);

/// Symmetric detector: main means -+separation/2 with unit-scaled std, each
/// state's leak sitting on the other state's main component.
QubitResponseModel make_detector(
    std::string qubit_id, double separation, double std, double ground_leak, double excited_leak, ProjectionSpec projection);

/// Five qubits with ~5% separatrix misassignment each.
std::vector<QubitResponseModel> quito_like_preset();

/// Four qubits whose separatrix readout of "0110" misassigns 8% of shots,
/// i.e. counts-based total population error 0.16.
std::vector<QubitResponseModel> bitstring_preset();

}  // namespace balero

#endif

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

#ifndef BALERO_BASELINES_H
#define BALERO_BASELINES_H

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "balero/detector_model.h"
#include "balero/multiqubit.h"

namespace balero {

/// Single-shot threshold discriminator on the projected axis.
struct Separatrix {
    double threshold = 0;
    /// Values at or below the threshold read as "0".
    bool ground_below = true;

    int assign(double x) const {
        bool below = x <= threshold;
        return below == ground_below ? 0 : 1;
    }
};

/// Equal-likelihood point of P_g and P_e between the two main means.
Separatrix fit_separatrix(const QubitResponseModel &model);

/// Bitstring -> number of shots assigned to it.
using Counts = std::map<std::string, uint64_t>;

Counts assign_counts(std::span<const Separatrix> separatrices, std::span<const ShotVector> shots);

/// Dense form indexed by basis value, length 2^n_qubits.
std::vector<uint64_t> counts_to_vector(const Counts &counts, int n_qubits);
std::vector<double> count_fractions(const Counts &counts, int n_qubits);
uint64_t total_counts(const Counts &counts);

/// Probability that a shot from `model` is misassigned by `sep`, averaged over
/// the two prepared states. Closed form through Gaussian tails.
double misassignment_rate(const QubitResponseModel &model, const Separatrix &sep);

/// entries[a * dim + b] = P(assigned a | prepared b).
struct ConfusionMatrix {
    int n_qubits = 0;
    std::vector<double> entries;

    size_t dim() const {
        return size_t{1} << n_qubits;
    }
    double at(size_t assigned, size_t prepared) const {
        return entries[assigned * dim() + prepared];
    }
};

ConfusionMatrix single_qubit_confusion(const QubitResponseModel &model, const Separatrix &sep);
ConfusionMatrix kron(const ConfusionMatrix &a, const ConfusionMatrix &b);
/// Tensor product of the per-qubit matrices, qubit 1 outermost.
ConfusionMatrix build_confusion(std::span<const QubitResponseModel> models, std::span<const Separatrix> separatrices);

std::vector<double> apply_confusion(const ConfusionMatrix &confusion, std::span<const double> populations);

struct InversionResult {
    /// May leave [0, 1]; never clipped.
    std::vector<double> quasi_populations;
    double condition_number = 0;
};

InversionResult invert_confusion(std::span<const double> fractions, const ConfusionMatrix &confusion);
InversionResult invert_confusion(const Counts &counts, const ConfusionMatrix &confusion);

}  // namespace balero

#endif

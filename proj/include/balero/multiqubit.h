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

#ifndef BALERO_MULTIQUBIT_H
#define BALERO_MULTIQUBIT_H

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balero/bayes_single.h"
#include "balero/detector_model.h"

namespace balero {

/// Computational basis state. Qubit 1 (index 0 in a model list) is the most
/// significant bit, so "0110" is index 6.
struct BasisIndex {
    uint32_t value = 0;

    /// 0 for ground, 1 for excited.
    int bit(int qubit, int n_qubits) const {
        return static_cast<int>((value >> (n_qubits - 1 - qubit)) & 1u);
    }
    auto operator<=>(const BasisIndex &) const = default;
};

std::string to_bitstring(BasisIndex state, int n_qubits);
BasisIndex from_bitstring(std::string_view bits);

/// Detector values for one shot, one entry per qubit.
using ShotVector = std::vector<double>;

/// sum_k log P_{bit_k(state)}(x_k).
double basis_log_density(std::span<const QubitResponseModel> models, BasisIndex state, std::span<const double> x_vec);

/// Posterior density over the full population simplex, sampled on the lattice
/// {k / divisions : sum k = divisions}. `node_weights` is the quadrature rule
/// (trapezoidal for one qubit, equal-volume cells otherwise); densities are
/// with respect to Lebesgue measure on the first 2^n_q - 1 coordinates.
struct SimplexPosterior {
    int n_q = 0;
    int divisions = 0;
    std::vector<double> nodes;  // num_nodes() x num_states(), row-major
    std::vector<double> node_weights;
    std::vector<double> log_weights;

    size_t num_states() const {
        return size_t{1} << n_q;
    }
    size_t num_nodes() const {
        return log_weights.size();
    }
    std::span<const double> node(size_t k) const {
        return {nodes.data() + k * num_states(), num_states()};
    }
    double mass() const;
};

constexpr int kMaxJointQubits = 2;
constexpr int kDefaultSimplexDivisions = 64;

SimplexPosterior uniform_simplex_prior(int n_q, int divisions = kDefaultSimplexDivisions);
SimplexPosterior joint_update(
    const SimplexPosterior &post, std::span<const QubitResponseModel> models, std::span<const ShotVector> shots);
PopulationEstimate estimate(const SimplexPosterior &post);

/// Working state of the pairwise heuristic: every population outside the
/// current pair is frozen at its estimate R_k.
struct PairwiseState {
    std::vector<double> estimates;
    /// Posterior std from the latest pair update touching each state.
    std::vector<double> std_devs;
    /// Sorted, unique.
    std::vector<BasisIndex> active_set;
    double epsilon = 1e-4;
    int max_sweeps = 50;
};

constexpr int kDefaultPairGridPoints = 501;

/// log(rho_i P_i(x) + rho_j P_j(x) + sum_{k != i,j} R_k P_k(x)), with the
/// sum restricted to the active set. Requires rho_i + rho_j to equal the
/// mass not frozen elsewhere.
double pairwise_conditional_log(
    std::span<const QubitResponseModel> models,
    BasisIndex i,
    BasisIndex j,
    const PairwiseState &state,
    double rho_i,
    double rho_j,
    std::span<const double> x_vec);

/// One pass over all active pairs in lexicographic order.
PairwiseState pairwise_sweep(
    const PairwiseState &state,
    std::span<const QubitResponseModel> models,
    std::span<const ShotVector> shots,
    int grid_points = kDefaultPairGridPoints);

enum class StopReason { Converged, MaxSweeps, Singleton };
std::string_view stop_reason_name(StopReason reason);

struct PairwiseResult {
    PairwiseState state;
    int sweeps = 0;
    StopReason stop_reason = StopReason::MaxSweeps;
    /// max_k |R_k - R_k_prev| over the last sweep.
    double last_change = 0;
};

PairwiseResult iterate_pairwise(
    const PairwiseState &state,
    std::span<const QubitResponseModel> models,
    std::span<const ShotVector> shots,
    int grid_points = kDefaultPairGridPoints);

/// States with a nonzero count. `counts` is indexed by basis value.
std::vector<BasisIndex> prune_active_set(std::span<const uint64_t> counts);

/// Active set from `prune_active_set`, R_k = count_k / N.
PairwiseState pairwise_state_from_counts(std::span<const uint64_t> counts, double epsilon = 1e-4, int max_sweeps = 50);

}  // namespace balero

#endif

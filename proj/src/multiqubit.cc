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

#include "balero/multiqubit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "balero/error.h"
#include "numeric.h"

namespace balero {

namespace {

void check_models(std::span<const QubitResponseModel> models, size_t x_size) {
    if (models.size() != x_size) {
        std::stringstream ss;
        ss << "shot has " << x_size << " detector values but " << models.size() << " response models were given";
        throw Error(ErrorCode::DimensionMismatch, ss.str());
    }
}

void check_state_index(BasisIndex s, size_t num_states) {
    if (s.value >= num_states) {
        throw Error(ErrorCode::InvalidArgument, "basis index " + std::to_string(s.value) + " out of range");
    }
}

void enumerate_nodes(int states_left, int remaining, int divisions, std::vector<int> &prefix, std::vector<double> &out) {
    if (states_left == 1) {
        for (int k : prefix) {
            out.push_back(static_cast<double>(k) / divisions);
        }
        out.push_back(static_cast<double>(remaining) / divisions);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        prefix.push_back(k);
        enumerate_nodes(states_left - 1, remaining - k, divisions, prefix, out);
        prefix.pop_back();
    }
}

void normalize_simplex(SimplexPosterior &post) {
    double peak = *std::max_element(post.log_weights.begin(), post.log_weights.end());
    double mass = 0;
    for (size_t k = 0; k < post.num_nodes(); ++k) {
        mass += post.node_weights[k] * std::exp(post.log_weights[k] - peak);
    }
    double shift = peak + std::log(mass);
    for (double &w : post.log_weights) {
        w -= shift;
    }
}

void validate_pairwise_state(const PairwiseState &state, size_t num_states) {
    if (state.estimates.size() != num_states) {
        throw Error(ErrorCode::DimensionMismatch, "pairwise estimates do not cover every basis state");
    }
    if (state.active_set.empty()) {
        throw Error(ErrorCode::NoActivePairs, "active set is empty");
    }
    double total = 0;
    for (double r : state.estimates) {
        if (!(r >= 0)) {
            throw Error(ErrorCode::MassViolation, "negative population estimate");
        }
        total += r;
    }
    if (std::abs(total - 1) > 1e-9) {
        std::stringstream ss;
        ss << "population estimates sum to " << total;
        throw Error(ErrorCode::MassViolation, ss.str());
    }
    for (size_t a = 0; a < state.active_set.size(); ++a) {
        check_state_index(state.active_set[a], num_states);
        if (a > 0 && !(state.active_set[a - 1] < state.active_set[a])) {
            throw Error(ErrorCode::InvalidArgument, "active set must be sorted and unique");
        }
    }
    size_t a = 0;
    for (uint32_t k = 0; k < num_states; ++k) {
        bool active = a < state.active_set.size() && state.active_set[a].value == k;
        if (active) {
            ++a;
        } else if (state.estimates[k] > 1e-12) {
            throw Error(ErrorCode::MassViolation, "state outside the active set carries population");
        }
    }
}

bool is_active(const PairwiseState &state, BasisIndex s) {
    return std::binary_search(state.active_set.begin(), state.active_set.end(), s);
}

int qubit_count(size_t num_models) {
    return static_cast<int>(num_models);
}

/// Per-shot densities of the active states, normalized across the active set
/// so every entry lies in [0, 1]. The dropped per-shot scale is constant in
/// the populations and cancels in any posterior.
struct ShotTable {
    size_t n_shots = 0;
    std::vector<std::vector<double>> v;
    std::vector<std::vector<double>> log_v;
};

ShotTable build_table(
    std::span<const BasisIndex> states, std::span<const QubitResponseModel> models, std::span<const ShotVector> shots) {
    ShotTable table;
    table.n_shots = shots.size();
    table.v.assign(states.size(), std::vector<double>(shots.size()));
    table.log_v.assign(states.size(), std::vector<double>(shots.size()));
    std::vector<double> logs(states.size());
    for (size_t s = 0; s < shots.size(); ++s) {
        check_models(models, shots[s].size());
        double c = detail::kNegInf;
        for (size_t a = 0; a < states.size(); ++a) {
            logs[a] = basis_log_density(models, states[a], shots[s]);
            c = detail::log_sum_exp(c, logs[a]);
        }
        for (size_t a = 0; a < states.size(); ++a) {
            table.log_v[a][s] = logs[a] - c;
            table.v[a][s] = std::exp(logs[a] - c);
        }
    }
    return table;
}

void sweep_on_table(PairwiseState &state, const ShotTable &table, int grid_points) {
    const size_t n_active = state.active_set.size();
    const size_t n = table.n_shots;
    std::vector<double> alpha(n), beta(n);
    PosteriorGrid1D grid = uniform_prior(grid_points);
    std::vector<double> tau(grid_points), prod(grid_points), log_sum(grid_points);
    for (int g = 0; g < grid_points; ++g) {
        tau[g] = grid.rho_at(g);
    }

    for (size_t a = 0; a < n_active; ++a) {
        for (size_t b = a + 1; b < n_active; ++b) {
            uint32_t ia = state.active_set[a].value;
            uint32_t ib = state.active_set[b].value;
            double others = 0;
            for (size_t k = 0; k < n_active; ++k) {
                if (k != a && k != b) {
                    others += state.estimates[state.active_set[k].value];
                }
            }
            double mass = std::max(1 - others, 0.0);
            if (mass <= 0) {
                state.estimates[ia] = 0;
                state.estimates[ib] = 0;
                state.std_devs[ia] = 0;
                state.std_devs[ib] = 0;
                continue;
            }
            for (size_t s = 0; s < n; ++s) {
                double f = 0;
                for (size_t k = 0; k < n_active; ++k) {
                    if (k != a && k != b) {
                        f += state.estimates[state.active_set[k].value] * table.v[k][s];
                    }
                }
                alpha[s] = f + mass * table.v[b][s];
                beta[s] = mass * (table.v[a][s] - table.v[b][s]);
            }

            // Posterior over tau, with rho_a = tau * mass and rho_b = (1 - tau) * mass.
            // Shot-outer, grid-inner so the product update vectorizes; `bound`
            // tracks a lower bound of every running product to know when to
            // move them into log space.
            std::fill(prod.begin(), prod.end(), 1.0);
            std::fill(log_sum.begin(), log_sum.end(), 0.0);
            double bound = 1;
            for (size_t s = 0; s < n; ++s) {
                const double al = alpha[s];
                const double be = beta[s];
                const double lowest = std::min(al, al + be);
                double floor = lowest;
                if (lowest < detail::LogProductAccumulator::kTiny) {
                    floor = 1;
                    for (int g = 0; g < grid_points; ++g) {
                        double t = al + tau[g] * be;
                        if (t >= detail::LogProductAccumulator::kTiny) {
                            floor = std::min(floor, t);
                        }
                    }
                }
                if (bound * floor < detail::LogProductAccumulator::kFlush) {
                    for (int g = 0; g < grid_points; ++g) {
                        log_sum[g] += std::log(prod[g]);
                        prod[g] = 1;
                    }
                    bound = 1;
                }
                bound *= floor;
                if (lowest >= detail::LogProductAccumulator::kTiny) {
                    for (int g = 0; g < grid_points; ++g) {
                        prod[g] *= al + tau[g] * be;
                    }
                    continue;
                }
                for (int g = 0; g < grid_points; ++g) {
                    double t = al + tau[g] * be;
                    if (t >= detail::LogProductAccumulator::kTiny) {
                        prod[g] *= t;
                        continue;
                    }
                    if (t >= std::numeric_limits<double>::min()) {
                        log_sum[g] += std::log(t);
                        continue;
                    }
                    double lt = detail::log_sum_exp(
                        detail::safe_log(tau[g] * mass) + table.log_v[a][s],
                        detail::safe_log((1 - tau[g]) * mass) + table.log_v[b][s]);
                    for (size_t k = 0; k < n_active; ++k) {
                        if (k != a && k != b) {
                            lt = detail::log_sum_exp(
                                lt, detail::safe_log(state.estimates[state.active_set[k].value]) + table.log_v[k][s]);
                        }
                    }
                    // Zero likelihood; keep the grid finite with a huge penalty.
                    log_sum[g] += lt == detail::kNegInf ? -1e300 : lt;
                }
            }
            for (int g = 0; g < grid_points; ++g) {
                grid.log_weights[g] = log_sum[g] + std::log(prod[g]);
            }
            normalize(grid);
            PopulationEstimate est = estimate(grid);
            state.estimates[ia] = mass * est.populations[0];
            state.estimates[ib] = mass - state.estimates[ia];
            state.std_devs[ia] = mass * est.std_devs[0];
            state.std_devs[ib] = mass * est.std_devs[0];
        }
    }
}

}  // namespace

std::string to_bitstring(BasisIndex state, int n_qubits) {
    std::string out(static_cast<size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if (state.bit(q, n_qubits)) {
            out[static_cast<size_t>(q)] = '1';
        }
    }
    return out;
}

BasisIndex from_bitstring(std::string_view bits) {
    if (bits.empty() || bits.size() > 31) {
        throw Error(ErrorCode::InvalidArgument, "bitstring must have between 1 and 31 characters");
    }
    uint32_t v = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::InvalidArgument, "bitstring '" + std::string(bits) + "' contains a non-binary character");
        }
        v = (v << 1) | static_cast<uint32_t>(c - '0');
    }
    return BasisIndex{v};
}

double basis_log_density(std::span<const QubitResponseModel> models, BasisIndex state, std::span<const double> x_vec) {
    check_models(models, x_vec.size());
    const int n_q = qubit_count(models.size());
    check_state_index(state, size_t{1} << n_q);
    double total = 0;
    for (int q = 0; q < n_q; ++q) {
        const auto &m = models[static_cast<size_t>(q)];
        total += eval_log_density(state.bit(q, n_q) ? m.p_e : m.p_g, x_vec[static_cast<size_t>(q)]);
    }
    return total;
}

double SimplexPosterior::mass() const {
    double total = 0;
    for (size_t k = 0; k < num_nodes(); ++k) {
        total += node_weights[k] * std::exp(log_weights[k]);
    }
    return total;
}

SimplexPosterior uniform_simplex_prior(int n_q, int divisions) {
    if (n_q < 1) {
        throw Error(ErrorCode::InvalidArgument, "need at least one qubit");
    }
    if (n_q > kMaxJointQubits) {
        throw Error(
            ErrorCode::TooManyQubits,
            "exact joint inference supports up to " + std::to_string(kMaxJointQubits) + " qubits; use the pairwise path");
    }
    if (divisions < 2) {
        throw Error(ErrorCode::InvalidResolution, "simplex grid needs at least 2 divisions");
    }
    SimplexPosterior post;
    post.n_q = n_q;
    post.divisions = divisions;
    const int d = 1 << n_q;
    std::vector<int> prefix;
    enumerate_nodes(d, divisions, divisions, prefix, post.nodes);
    const size_t count = post.nodes.size() / static_cast<size_t>(d);

    if (d == 2) {
        double h = 1.0 / divisions;
        post.node_weights.assign(count, h);
        post.node_weights.front() = 0.5 * h;
        post.node_weights.back() = 0.5 * h;
    } else {
        // Volume of the standard simplex in d - 1 free coordinates is 1/(d-1)!.
        double volume = 1;
        for (int k = 2; k < d; ++k) {
            volume /= k;
        }
        post.node_weights.assign(count, volume / static_cast<double>(count));
    }
    post.log_weights.assign(count, 0.0);
    normalize_simplex(post);
    return post;
}

SimplexPosterior joint_update(
    const SimplexPosterior &post, std::span<const QubitResponseModel> models, std::span<const ShotVector> shots) {
    if (post.n_q > kMaxJointQubits) {
        throw Error(ErrorCode::TooManyQubits, "exact joint inference is limited to 2 qubits; use the pairwise path");
    }
    if (static_cast<int>(models.size()) != post.n_q) {
        throw Error(ErrorCode::DimensionMismatch, "model count does not match the posterior's qubit count");
    }
    SimplexPosterior out = post;
    if (shots.empty()) {
        return out;
    }
    const size_t d = post.num_states();
    std::vector<BasisIndex> states(d);
    for (size_t k = 0; k < d; ++k) {
        states[k] = BasisIndex{static_cast<uint32_t>(k)};
    }
    ShotTable table = build_table(states, models, shots);

    const size_t n = table.n_shots;
    const size_t m = post.num_nodes();
    std::vector<double> v(n * d), log_v(n * d), lowest(n, 1.0);
    for (size_t s = 0; s < n; ++s) {
        for (size_t k = 0; k < d; ++k) {
            v[s * d + k] = table.v[k][s];
            log_v[s * d + k] = table.log_v[k][s];
            lowest[s] = std::min(lowest[s], table.v[k][s]);
        }
    }

    // Nodes are processed in cache-sized blocks. Within a block every shot
    // multiplies a running product per node; `bound` is a lower bound on all
    // of them (the smallest normalized density bounds every convex
    // combination) and decides when to move the products into log space.
    constexpr size_t kBlock = 256;
    std::vector<double> coord(d * kBlock), mix(kBlock), prod(kBlock), log_sum(kBlock);
    for (size_t start = 0; start < m; start += kBlock) {
        const size_t len = std::min(kBlock, m - start);
        for (size_t j = 0; j < len; ++j) {
            std::span<const double> rho = post.node(start + j);
            for (size_t k = 0; k < d; ++k) {
                coord[k * kBlock + j] = rho[k];
            }
        }
        std::fill(prod.begin(), prod.end(), 1.0);
        std::fill(log_sum.begin(), log_sum.end(), 0.0);
        double bound = 1;
        for (size_t s = 0; s < n; ++s) {
            const double *vs = &v[s * d];
            for (size_t j = 0; j < len; ++j) {
                mix[j] = coord[j] * vs[0];
            }
            for (size_t k = 1; k < d; ++k) {
                const double *ck = &coord[k * kBlock];
                for (size_t j = 0; j < len; ++j) {
                    mix[j] += ck[j] * vs[k];
                }
            }
            double floor = lowest[s];
            if (floor < detail::LogProductAccumulator::kTiny) {
                floor = 1;
                for (size_t j = 0; j < len; ++j) {
                    if (mix[j] >= detail::LogProductAccumulator::kTiny) {
                        floor = std::min(floor, mix[j]);
                    }
                }
            }
            if (bound * floor < detail::LogProductAccumulator::kFlush) {
                for (size_t j = 0; j < len; ++j) {
                    log_sum[j] += std::log(prod[j]);
                    prod[j] = 1;
                }
                bound = 1;
            }
            bound *= floor;
            if (lowest[s] >= detail::LogProductAccumulator::kTiny) {
                for (size_t j = 0; j < len; ++j) {
                    prod[j] *= mix[j];
                }
                continue;
            }
            for (size_t j = 0; j < len; ++j) {
                if (mix[j] >= detail::LogProductAccumulator::kTiny) {
                    prod[j] *= mix[j];
                } else if (mix[j] >= std::numeric_limits<double>::min()) {
                    log_sum[j] += std::log(mix[j]);
                } else {
                    double lt = detail::kNegInf;
                    for (size_t k = 0; k < d; ++k) {
                        lt = detail::log_sum_exp(lt, detail::safe_log(coord[k * kBlock + j]) + log_v[s * d + k]);
                    }
                    log_sum[j] += lt == detail::kNegInf ? -1e300 : lt;
                }
            }
        }
        for (size_t j = 0; j < len; ++j) {
            out.log_weights[start + j] += log_sum[j] + std::log(prod[j]);
        }
    }
    normalize_simplex(out);
    return out;
}

PopulationEstimate estimate(const SimplexPosterior &post) {
    const size_t d = post.num_states();
    std::vector<double> m1(d, 0.0), m2(d, 0.0);
    double mass = 0;
    for (size_t node = 0; node < post.num_nodes(); ++node) {
        double w = post.node_weights[node] * std::exp(post.log_weights[node]);
        mass += w;
        std::span<const double> rho = post.node(node);
        for (size_t k = 0; k < d; ++k) {
            m1[k] += w * rho[k];
            m2[k] += w * rho[k] * rho[k];
        }
    }
    PopulationEstimate est;
    for (size_t k = 0; k < d; ++k) {
        double mean = m1[k] / mass;
        est.populations.push_back(mean);
        est.std_devs.push_back(std::sqrt(std::max(m2[k] / mass - mean * mean, 0.0)));
    }
    return est;
}

double pairwise_conditional_log(
    std::span<const QubitResponseModel> models,
    BasisIndex i,
    BasisIndex j,
    const PairwiseState &state,
    double rho_i,
    double rho_j,
    std::span<const double> x_vec) {
    check_models(models, x_vec.size());
    const size_t num_states = size_t{1} << qubit_count(models.size());
    if (state.estimates.size() != num_states) {
        throw Error(ErrorCode::DimensionMismatch, "pairwise estimates do not cover every basis state");
    }
    check_state_index(i, num_states);
    check_state_index(j, num_states);
    if (i == j || !is_active(state, i) || !is_active(state, j)) {
        throw Error(ErrorCode::InvalidArgument, "pair must be two distinct active states");
    }
    if (!(rho_i >= 0) || !(rho_j >= 0)) {
        throw Error(ErrorCode::MassViolation, "pair populations must be non-negative");
    }
    // The stored R_i, R_j are stale by definition; check the state as it
    // would be with the candidate pair values in place.
    PairwiseState candidate = state;
    candidate.estimates[i.value] = rho_i;
    candidate.estimates[j.value] = rho_j;
    validate_pairwise_state(candidate, num_states);
    double frozen = 0;
    for (BasisIndex k : state.active_set) {
        if (k != i && k != j) {
            frozen += state.estimates[k.value];
        }
    }
    if (std::abs(rho_i + rho_j - (1 - frozen)) > 1e-9) {
        std::stringstream ss;
        ss << "rho_i + rho_j = " << rho_i + rho_j << " but the free mass is " << 1 - frozen;
        throw Error(ErrorCode::MassViolation, ss.str());
    }
    double total = detail::log_sum_exp(
        detail::safe_log(rho_i) + basis_log_density(models, i, x_vec),
        detail::safe_log(rho_j) + basis_log_density(models, j, x_vec));
    for (BasisIndex k : state.active_set) {
        if (k != i && k != j && state.estimates[k.value] > 0) {
            total = detail::log_sum_exp(total, std::log(state.estimates[k.value]) + basis_log_density(models, k, x_vec));
        }
    }
    return total;
}

PairwiseState pairwise_sweep(
    const PairwiseState &state,
    std::span<const QubitResponseModel> models,
    std::span<const ShotVector> shots,
    int grid_points) {
    const size_t num_states = size_t{1} << qubit_count(models.size());
    validate_pairwise_state(state, num_states);
    if (state.active_set.size() < 2) {
        throw Error(ErrorCode::NoActivePairs, "pairwise sweep needs at least two active states");
    }
    if (grid_points < 3) {
        throw Error(ErrorCode::InvalidResolution, "pair grid needs at least 3 points");
    }
    PairwiseState out = state;
    out.std_devs.resize(num_states, 0.0);
    ShotTable table = build_table(state.active_set, models, shots);
    sweep_on_table(out, table, grid_points);
    return out;
}

std::string_view stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::Converged:
            return "converged";
        case StopReason::MaxSweeps:
            return "max_sweeps";
        case StopReason::Singleton:
            return "singleton";
    }
    return "unknown";
}

PairwiseResult iterate_pairwise(
    const PairwiseState &state,
    std::span<const QubitResponseModel> models,
    std::span<const ShotVector> shots,
    int grid_points) {
    const size_t num_states = size_t{1} << qubit_count(models.size());
    validate_pairwise_state(state, num_states);
    if (grid_points < 3) {
        throw Error(ErrorCode::InvalidResolution, "pair grid needs at least 3 points");
    }
    PairwiseResult result;
    result.state = state;
    result.state.std_devs.resize(num_states, 0.0);

    if (state.active_set.size() == 1) {
        std::fill(result.state.estimates.begin(), result.state.estimates.end(), 0.0);
        result.state.estimates[state.active_set.front().value] = 1;
        std::fill(result.state.std_devs.begin(), result.state.std_devs.end(), 0.0);
        result.stop_reason = StopReason::Singleton;
        return result;
    }
    if (state.max_sweeps <= 0) {
        result.stop_reason = StopReason::MaxSweeps;
        return result;
    }

    ShotTable table = build_table(state.active_set, models, shots);
    std::vector<double> previous;
    for (int sweep = 1; sweep <= state.max_sweeps; ++sweep) {
        previous = result.state.estimates;
        sweep_on_table(result.state, table, grid_points);
        result.sweeps = sweep;
        double change = 0;
        for (size_t k = 0; k < num_states; ++k) {
            change = std::max(change, std::abs(result.state.estimates[k] - previous[k]));
        }
        result.last_change = change;
        if (change < state.epsilon) {
            result.stop_reason = StopReason::Converged;
            return result;
        }
    }
    result.stop_reason = StopReason::MaxSweeps;
    return result;
}

std::vector<BasisIndex> prune_active_set(std::span<const uint64_t> counts) {
    std::vector<BasisIndex> active;
    for (size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > 0) {
            active.push_back(BasisIndex{static_cast<uint32_t>(k)});
        }
    }
    if (active.empty()) {
        throw Error(ErrorCode::EmptyCounts, "no state received any counts");
    }
    return active;
}

PairwiseState pairwise_state_from_counts(std::span<const uint64_t> counts, double epsilon, int max_sweeps) {
    PairwiseState state;
    state.active_set = prune_active_set(counts);
    uint64_t total = 0;
    for (uint64_t c : counts) {
        total += c;
    }
    state.estimates.resize(counts.size());
    for (size_t k = 0; k < counts.size(); ++k) {
        state.estimates[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    }
    state.std_devs.assign(counts.size(), 0.0);
    state.epsilon = epsilon;
    state.max_sweeps = max_sweeps;
    return state;
}

}  // namespace balero

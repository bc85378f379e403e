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

#include "balero/simulator.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "balero/baselines.h"
#include "balero/error.h"

namespace balero {

namespace {

double draw(const BimodalResponse &r, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const GaussianComponent &c = unit(rng) < r.leak_weight ? r.leak : r.main;
    return c.mean + c.std * normal(rng);
}

IQShot lift(const ProjectionSpec &spec, double x, double transverse) {
    double c = std::cos(spec.angle);
    double s = std::sin(spec.angle);
    double along = x + spec.offset;
    return IQShot{along * c - transverse * s, along * s + transverse * c};
}

/// Bisection for a decreasing function crossing `target` on [lo, hi].
double solve_decreasing(const std::function<double(double)> &f, double target, double lo, double hi) {
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

int TrueState::n_qubits() const {
    int n = 0;
    while ((size_t{1} << n) < populations.size()) {
        ++n;
    }
    return n;
}

void validate(const TrueState &state) {
    size_t d = state.populations.size();
    if (d < 2 || (d & (d - 1)) != 0) {
        throw Error(ErrorCode::DimensionMismatch, "population vector length must be a power of two");
    }
    double total = 0;
    for (double p : state.populations) {
        if (!(p >= 0)) {
            throw Error(ErrorCode::InvalidArgument, "populations must be non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1) > 1e-12) {
        std::stringstream ss;
        ss << "populations sum to " << total;
        throw Error(ErrorCode::InvalidArgument, ss.str());
    }
}

TrueState ry_populations(double theta) {
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    double g = c * c;
    double e = s * s;
    double total = g + e;
    return TrueState{{g / total, e / total}};
}

TrueState bell_populations() {
    return TrueState{{0.5, 0.0, 0.0, 0.5}};
}

TrueState bitstring_populations(std::string_view bits) {
    if (bits.empty()) {
        throw Error(ErrorCode::InvalidArgument, "bitstring must not be empty");
    }
    BasisIndex index = from_bitstring(bits);
    TrueState state;
    state.populations.assign(size_t{1} << bits.size(), 0.0);
    state.populations[index.value] = 1;
    return state;
}

TrueState apply_depolarizing(const TrueState &state, const NoiseConfig &cfg) {
    validate(state);
    double lambda = cfg.depolarizing_strength;
    if (!(lambda >= 0 && lambda <= 1)) {
        throw Error(ErrorCode::InvalidArgument, "depolarizing strength must lie in [0, 1]");
    }
    TrueState out = state;
    double uniform = 1.0 / static_cast<double>(state.populations.size());
    for (double &p : out.populations) {
        p = (1 - lambda) * p + lambda * uniform;
    }
    return out;
}

ShotBatch sample_shots(
    const TrueState &state,
    std::span<const QubitResponseModel> models,
    size_t n_shots,
    uint64_t seed,
    const SampleOptions &options) {
    validate(state);
    const int n_q = state.n_qubits();
    if (static_cast<int>(models.size()) != n_q) {
        throw Error(ErrorCode::DimensionMismatch, "need one response model per qubit of the state");
    }
    if (n_shots < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_shots must be at least 1");
    }
    std::vector<double> cumulative(state.populations.size());
    std::partial_sum(state.populations.begin(), state.populations.end(), cumulative.begin());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    ShotBatch batch;
    batch.x.reserve(n_shots);
    batch.prepared.reserve(n_shots);
    for (size_t s = 0; s < n_shots; ++s) {
        double u = unit(rng) * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        size_t idx = std::min(static_cast<size_t>(it - cumulative.begin()), cumulative.size() - 1);
        BasisIndex basis{static_cast<uint32_t>(idx)};
        ShotVector xs(static_cast<size_t>(n_q));
        for (int q = 0; q < n_q; ++q) {
            const auto &m = models[static_cast<size_t>(q)];
            xs[static_cast<size_t>(q)] = draw(basis.bit(q, n_q) ? m.p_e : m.p_g, rng);
        }
        if (options.lift_to_iq) {
            std::vector<IQShot> iq(static_cast<size_t>(n_q));
            for (int q = 0; q < n_q; ++q) {
                const auto &m = models[static_cast<size_t>(q)];
                double spread = options.transverse_std.value_or(m.p_g.main.std);
                iq[static_cast<size_t>(q)] = lift(m.projection, xs[static_cast<size_t>(q)], spread * normal(rng));
            }
            batch.iq.push_back(std::move(iq));
        }
        batch.x.push_back(std::move(xs));
        batch.prepared.push_back(basis);
    }
    return batch;
}

CalibrationDataset sample_calibration(const QubitResponseModel &truth, size_t n_shots_per_state, uint64_t seed) {
    CalibrationDataset data;
    data.qubit_id = truth.qubit_id;
    std::span<const QubitResponseModel> one(&truth, 1);
    SampleOptions opts;
    opts.lift_to_iq = true;
    ShotBatch g = sample_shots(TrueState{{1.0, 0.0}}, one, n_shots_per_state, seed, opts);
    ShotBatch e = sample_shots(TrueState{{0.0, 1.0}}, one, n_shots_per_state, seed ^ 0x9e3779b97f4a7c15ULL, opts);
    for (const auto &shot : g.iq) {
        data.ground_shots.push_back(shot[0]);
    }
    for (const auto &shot : e.iq) {
        data.excited_shots.push_back(shot[0]);
    }
    return data;
}

QubitResponseModel make_detector(
    std::string qubit_id, double separation, double std, double ground_leak, double excited_leak, ProjectionSpec projection) {
    QubitResponseModel m;
    m.qubit_id = std::move(qubit_id);
    m.projection = projection;
    GaussianComponent g{-separation / 2, std};
    GaussianComponent e{separation / 2, std};
    m.p_g = BimodalResponse{g, e, ground_leak};
    m.p_e = BimodalResponse{e, g, excited_leak};
    return m;
}

std::vector<QubitResponseModel> quito_like_preset() {
    struct Leaks {
        double ground;
        double excited;
    };
    const Leaks leaks[] = {{0.015, 0.035}, {0.020, 0.040}, {0.010, 0.050}, {0.025, 0.030}, {0.020, 0.045}};
    const double target = 0.05;
    std::vector<QubitResponseModel> out;
    for (int q = 0; q < 5; ++q) {
        ProjectionSpec proj{0.3 + 0.5 * q, 0.8 - 0.2 * q};
        auto rate = [&](double separation) {
            QubitResponseModel m = make_detector("Q" + std::to_string(q), separation, 1.0, leaks[q].ground, leaks[q].excited, proj);
            return misassignment_rate(m, fit_separatrix(m));
        };
        double separation = solve_decreasing(rate, target, 0.5, 12.0);
        out.push_back(make_detector("Q" + std::to_string(q), separation, 1.0, leaks[q].ground, leaks[q].excited, proj));
    }
    return out;
}

std::vector<QubitResponseModel> bitstring_preset() {
    const double ground_leak = 0.008;
    const double excited_leak = 0.016;
    const std::string bits = "0110";
    // Probability that the whole string survives separatrix readout.
    auto survival = [&](double separation) {
        double p = 1;
        for (size_t q = 0; q < bits.size(); ++q) {
            QubitResponseModel m = make_detector("Q", separation, 1.0, ground_leak, excited_leak, {});
            ConfusionMatrix c = single_qubit_confusion(m, fit_separatrix(m));
            size_t b = bits[q] == '1' ? 1 : 0;
            p *= c.at(b, b);
        }
        return 1 - p;
    };
    double separation = solve_decreasing(survival, 0.08, 0.5, 12.0);
    std::vector<QubitResponseModel> out;
    for (int q = 0; q < 4; ++q) {
        ProjectionSpec proj{-1.0 + 0.6 * q, 0.5 + 0.25 * q};
        out.push_back(make_detector("Q" + std::to_string(q), separation, 1.0, ground_leak, excited_leak, proj));
    }
    return out;
}

}  // namespace balero

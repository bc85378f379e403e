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

#include "balero/benchmark.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "balero/error.h"

namespace balero {

namespace {

constexpr uint64_t kCalibrationStream = 0xC0FFEE;
constexpr uint64_t kExcitedStream = 0xE0E0;

/// Detector used by the estimators next to the generating one.
struct Device {
    std::vector<QubitResponseModel> truth;
    std::vector<QubitResponseModel> fitted;
    std::vector<Separatrix> separatrices;
};

Device make_device(std::vector<QubitResponseModel> truth, const BenchmarkConfig &config) {
    Device d;
    d.truth = std::move(truth);
    for (size_t q = 0; q < d.truth.size(); ++q) {
        if (config.calibration_shots == 0) {
            d.fitted.push_back(d.truth[q]);
            continue;
        }
        uint64_t seed = derive_seed(derive_seed(config.seed, kCalibrationStream), q);
        d.fitted.push_back(calibrate_qubit(sample_calibration(d.truth[q], static_cast<size_t>(config.calibration_shots), seed)));
    }
    d.separatrices = fit_separatrices(d.fitted);
    return d;
}

/// Samples through the IQ plane of the generating device and projects with
/// the fitted one, as a real readout chain would.
std::vector<ShotVector> observe(const Device &d, const TrueState &state, size_t n, uint64_t seed, const BenchmarkConfig &config) {
    if (config.calibration_shots == 0) {
        return sample_shots(state, d.truth, n, seed).x;
    }
    SampleOptions opts;
    opts.lift_to_iq = true;
    ShotBatch batch = sample_shots(state, d.truth, n, seed, opts);
    std::vector<ShotVector> out(n, ShotVector(d.fitted.size()));
    for (size_t s = 0; s < n; ++s) {
        for (size_t q = 0; q < d.fitted.size(); ++q) {
            out[s][q] = project(d.fitted[q].projection, batch.iq[s][q]);
        }
    }
    return out;
}

std::span<const ShotVector> prefix(const std::vector<ShotVector> &shots, int64_t n) {
    return std::span<const ShotVector>(shots).first(static_cast<size_t>(n));
}

bool wants(const BenchmarkConfig &config, Estimator e) {
    return std::find(config.estimators.begin(), config.estimators.end(), e) != config.estimators.end();
}

std::vector<double> flatten_single(std::span<const ShotVector> shots) {
    std::vector<double> xs;
    xs.reserve(shots.size());
    for (const ShotVector &v : shots) {
        xs.push_back(v[0]);
    }
    return xs;
}

int64_t max_shots(const BenchmarkConfig &config) {
    return *std::max_element(config.n_shots.begin(), config.n_shots.end());
}

std::vector<int64_t> sorted_shots(const BenchmarkConfig &config) {
    std::vector<int64_t> out = config.n_shots;
    std::sort(out.begin(), out.end());
    return out;
}

void push_metric(BenchmarkResult &r, std::string name, Estimator e, int64_t n, uint64_t seed, double value) {
    r.metrics.push_back(MetricReport{std::move(name), value, n, std::string(estimator_name(e)), seed});
}

/// Single-qubit estimates of rho_g for each requested shot count, reusing
/// the posterior between prefixes.
struct SingleQubitTrack {
    std::vector<double> balero, counts, inversion;
};

SingleQubitTrack track_single(
    const QubitResponseModel &model, const Separatrix &sep, const std::vector<ShotVector> &shots, const BenchmarkConfig &config) {
    SingleQubitTrack t;
    std::vector<double> xs = flatten_single(shots);
    ConfusionMatrix confusion = single_qubit_confusion(model, sep);
    PosteriorGrid1D post = uniform_prior(config.inference.grid_points);
    int64_t done = 0;
    size_t ground = 0;
    for (int64_t n : sorted_shots(config)) {
        std::span<const double> fresh = std::span<const double>(xs).subspan(static_cast<size_t>(done), static_cast<size_t>(n - done));
        if (wants(config, Estimator::Balero)) {
            post = update_posterior(post, model, fresh);
            t.balero.push_back(estimate(post).populations[0]);
        }
        for (double x : fresh) {
            ground += sep.assign(x) == 0;
        }
        double frac = static_cast<double>(ground) / static_cast<double>(n);
        t.counts.push_back(frac);
        if (wants(config, Estimator::Inversion)) {
            std::vector<double> f = {frac, 1 - frac};
            t.inversion.push_back(invert_confusion(f, confusion).quasi_populations[0]);
        }
        done = n;
    }
    return t;
}

// Inversion is left out here: its quasi-populations can exceed 1, which
// makes 1 - (rho_g|g + rho_e|e) / 2 negative and meaningless as an error.
BenchmarkResult readout_fidelity(const BenchmarkConfig &config) {
    BenchmarkResult r;
    Device d = make_device(quito_like_preset(), config);
    const size_t n_q = d.truth.size();
    std::vector<int64_t> shot_counts = sorted_shots(config);
    for (size_t q = 0; q < n_q; ++q) {
        r.facts.emplace_back("misassignment[" + d.truth[q].qubit_id + "]", misassignment_rate(d.truth[q], fit_separatrix(d.truth[q])));
    }

    std::vector<std::vector<double>> plot_rows(shot_counts.size(), std::vector<double>(4, 0.0));
    for (int s = 0; s < config.n_seeds; ++s) {
        uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(s));
        std::vector<std::vector<double>> device_avg(3, std::vector<double>(shot_counts.size(), 0.0));
        for (size_t q = 0; q < n_q; ++q) {
            Device single;
            single.truth = {d.truth[q]};
            single.fitted = {d.fitted[q]};
            single.separatrices = {d.separatrices[q]};
            uint64_t qseed = derive_seed(seed, q);
            auto ground = observe(single, TrueState{{1, 0}}, static_cast<size_t>(max_shots(config)), qseed, config);
            auto excited = observe(single, TrueState{{0, 1}}, static_cast<size_t>(max_shots(config)), qseed ^ kExcitedStream, config);
            SingleQubitTrack g = track_single(d.fitted[q], d.separatrices[q], ground, config);
            SingleQubitTrack e = track_single(d.fitted[q], d.separatrices[q], excited, config);
            const std::string name = "readout_error[" + d.truth[q].qubit_id + "]";
            for (size_t k = 0; k < shot_counts.size(); ++k) {
                std::vector<std::pair<Estimator, double>> values;
                if (wants(config, Estimator::Balero)) {
                    values.emplace_back(Estimator::Balero, readout_error(g.balero[k], 1 - e.balero[k]));
                }
                if (wants(config, Estimator::Counts)) {
                    values.emplace_back(Estimator::Counts, readout_error(g.counts[k], 1 - e.counts[k]));
                }
                for (auto [est, v] : values) {
                    push_metric(r, name, est, shot_counts[k], seed, v);
                    device_avg[static_cast<size_t>(est)][k] += v / static_cast<double>(n_q);
                }
            }
        }
        for (size_t k = 0; k < shot_counts.size(); ++k) {
            for (Estimator est : config.estimators) {
                if (est == Estimator::Inversion) {
                    continue;
                }
                double v = device_avg[static_cast<size_t>(est)][k];
                push_metric(r, "readout_error", est, shot_counts[k], seed, v);
                plot_rows[k][1 + static_cast<size_t>(est)] += v / config.n_seeds;
            }
        }
    }
    PlotTable plot{"readout_fidelity", {"n_shots", "balero", "counts"}, {}};
    for (size_t k = 0; k < shot_counts.size(); ++k) {
        plot_rows[k][0] = static_cast<double>(shot_counts[k]);
        plot.rows.push_back({plot_rows[k][0], plot_rows[k][1], plot_rows[k][2]});
    }
    r.plots.push_back(std::move(plot));
    return r;
}

BenchmarkResult ry_sweep(const BenchmarkConfig &config) {
    BenchmarkResult r;
    Device d = make_device({quito_like_preset().front()}, config);
    std::vector<int64_t> shot_counts = sorted_shots(config);
    const int t_points = config.theta_points;
    std::vector<double> theta(static_cast<size_t>(t_points));
    for (int k = 0; k < t_points; ++k) {
        theta[static_cast<size_t>(k)] = 2 * std::numbers::pi * k / t_points;
    }

    PlotTable plot{"ry_sweep", {"theta", "ideal", "counts", "balero", "inversion"}, {}};
    for (int s = 0; s < config.n_seeds; ++s) {
        uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(s));
        // per estimator, per shot count, per theta
        std::vector<std::vector<std::vector<double>>> est(3, std::vector<std::vector<double>>(shot_counts.size()));
        for (int k = 0; k < t_points; ++k) {
            TrueState state = ry_populations(theta[static_cast<size_t>(k)]);
            auto shots = observe(d, state, static_cast<size_t>(max_shots(config)), derive_seed(seed, static_cast<uint64_t>(k)), config);
            SingleQubitTrack t = track_single(d.fitted[0], d.separatrices[0], shots, config);
            for (size_t c = 0; c < shot_counts.size(); ++c) {
                if (wants(config, Estimator::Balero)) {
                    est[0][c].push_back(t.balero[c]);
                }
                est[1][c].push_back(t.counts[c]);
                if (wants(config, Estimator::Inversion)) {
                    est[2][c].push_back(t.inversion[c]);
                }
            }
            if (s == 0) {
                auto last = [](const std::vector<double> &v) { return v.empty() ? std::nan("") : v.back(); };
                plot.rows.push_back({theta[static_cast<size_t>(k)], state.populations[0], t.counts.back(), last(t.balero), last(t.inversion)});
            }
        }
        for (Estimator e : config.estimators) {
            for (size_t c = 0; c < shot_counts.size(); ++c) {
                push_metric(r, "delta_rho_g", e, shot_counts[c], seed, avg_ground_population_error(theta, est[static_cast<size_t>(e)][c]));
            }
        }
    }
    r.plots.push_back(std::move(plot));
    return r;
}

/// Shared body of the multi-qubit scenarios: per seed and shot count, every
/// estimator's total population error against `truth`.
void multi_qubit_run(
    BenchmarkResult &r, const Device &d, const TrueState &truth, const std::string &plot_name, const BenchmarkConfig &config,
    const std::optional<TrueState> &ideal = std::nullopt) {
    std::vector<int64_t> shot_counts = sorted_shots(config);
    const size_t dim = truth.populations.size();
    const int n_q = static_cast<int>(d.truth.size());
    ConfusionMatrix confusion = build_confusion(d.fitted, d.separatrices);
    PlotTable plot{plot_name, {"state", "exact", "counts", "balero", "inversion"}, {}};
    for (int s = 0; s < config.n_seeds; ++s) {
        uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(s));
        auto shots = observe(d, truth, static_cast<size_t>(max_shots(config)), seed, config);
        for (size_t c = 0; c < shot_counts.size(); ++c) {
            const int64_t n = shot_counts[c];
            auto batch = prefix(shots, n);
            std::vector<double> counts = count_fractions(assign_counts(d.separatrices, batch), n_q);
            std::vector<double> balero_pop, inversion_pop;
            if (wants(config, Estimator::Balero)) {
                BaleroOutput out = run_balero(d.fitted, d.separatrices, batch, config.inference);
                balero_pop = out.estimate.populations;
                push_metric(r, "delta_rho_tot", Estimator::Balero, n, seed, total_population_error(truth.populations, balero_pop));
                if (out.pairwise) {
                    push_metric(r, "pairwise_sweeps", Estimator::Balero, n, seed, out.pairwise->sweeps);
                    bool converged = out.pairwise->stop_reason != StopReason::MaxSweeps;
                    push_metric(r, "pairwise_converged", Estimator::Balero, n, seed, converged ? 1 : 0);
                    r.max_sweeps_hits += converged ? 0 : 1;
                }
            }
            if (wants(config, Estimator::Counts)) {
                push_metric(r, "delta_rho_tot", Estimator::Counts, n, seed, total_population_error(truth.populations, counts));
                if (ideal) {
                    push_metric(r, "counts_error_vs_ideal", Estimator::Counts, n, seed, total_population_error(ideal->populations, counts));
                }
            }
            if (wants(config, Estimator::Inversion)) {
                inversion_pop = invert_confusion(counts, confusion).quasi_populations;
                push_metric(r, "delta_rho_tot", Estimator::Inversion, n, seed, total_population_error(truth.populations, inversion_pop));
            }
            if (s == 0 && c + 1 == shot_counts.size()) {
                for (size_t k = 0; k < dim; ++k) {
                    auto at = [k](const std::vector<double> &v) { return v.empty() ? std::nan("") : v[k]; };
                    plot.rows.push_back({static_cast<double>(k), truth.populations[k], counts[k], at(balero_pop), at(inversion_pop)});
                }
            }
        }
    }
    r.plots.push_back(std::move(plot));
}

BenchmarkResult bell(const BenchmarkConfig &config) {
    BenchmarkResult r;
    auto preset = quito_like_preset();
    Device d = make_device({preset[0], preset[1]}, config);
    multi_qubit_run(r, d, bell_populations(), "bell", config);
    return r;
}

Device bitstring_device(const BenchmarkConfig &config) {
    auto preset = bitstring_preset();
    if (config.bitstring.size() != preset.size()) {
        std::stringstream ss;
        ss << "the bitstring preset has " << preset.size() << " qubits but the target '" << config.bitstring << "' has "
           << config.bitstring.size();
        throw Error(ErrorCode::InvalidArgument, ss.str());
    }
    return make_device(std::move(preset), config);
}

BenchmarkResult bitstring_prep(const BenchmarkConfig &config) {
    BenchmarkResult r;
    Device d = bitstring_device(config);
    multi_qubit_run(r, d, bitstring_populations(config.bitstring), "bitstring_prep", config);
    return r;
}

BenchmarkResult bv_output(const BenchmarkConfig &config) {
    BenchmarkResult r;
    Device d = bitstring_device(config);
    TrueState ideal = bitstring_populations(config.bitstring);
    double lambda = config.depolarizing.value_or(
        solve_depolarizing(build_confusion(d.truth, fit_separatrices(d.truth)), from_bitstring(config.bitstring), 0.20));
    r.facts.emplace_back("depolarizing_strength", lambda);
    TrueState noisy = apply_depolarizing(ideal, NoiseConfig{lambda, config.seed});
    multi_qubit_run(r, d, noisy, "bv_output", config, ideal);
    return r;
}

}  // namespace

void BenchmarkConfig::validate() const {
    if (n_shots.empty()) {
        throw Error(ErrorCode::InvalidArgument, "n_shots list is empty");
    }
    for (int64_t n : n_shots) {
        if (n < 1) {
            throw Error(ErrorCode::InvalidArgument, "shot counts must be positive");
        }
    }
    if (n_seeds < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_seeds must be positive");
    }
    if (theta_points < 2) {
        throw Error(ErrorCode::InvalidResolution, "theta_points must be at least 2");
    }
    if (calibration_shots < 0 || (calibration_shots > 0 && calibration_shots < 100)) {
        throw Error(ErrorCode::InvalidArgument, "calibration_shots must be 0 or at least 100");
    }
    if (depolarizing && !(*depolarizing >= 0 && *depolarizing <= 1)) {
        throw Error(ErrorCode::InvalidArgument, "depolarizing strength must lie in [0, 1]");
    }
    if (estimators.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no estimators selected");
    }
    inference.validate();
}

std::vector<std::string> scenario_names() {
    return {"readout-fidelity", "ry-sweep", "bell", "bitstring-prep", "bv-output"};
}

BenchmarkResult run_benchmark(const BenchmarkConfig &config) {
    config.validate();
    BenchmarkResult r;
    if (config.scenario == "readout-fidelity") {
        r = readout_fidelity(config);
    } else if (config.scenario == "ry-sweep") {
        r = ry_sweep(config);
    } else if (config.scenario == "bell") {
        r = bell(config);
    } else if (config.scenario == "bitstring-prep") {
        r = bitstring_prep(config);
    } else if (config.scenario == "bv-output") {
        r = bv_output(config);
    } else {
        throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + config.scenario + "'");
    }
    r.scenario = config.scenario;
    return r;
}

double solve_depolarizing(const ConfusionMatrix &confusion, BasisIndex target, double target_error) {
    const size_t dim = confusion.dim();
    if (target.value >= dim) {
        throw Error(ErrorCode::InvalidArgument, "target state out of range");
    }
    // P(assigned t) = (1 - lambda) M_tt + lambda * mean_b M_tb.
    double keep = confusion.at(target.value, target.value);
    double mixed = 0;
    for (size_t b = 0; b < dim; ++b) {
        mixed += confusion.at(target.value, b);
    }
    mixed /= static_cast<double>(dim);
    double want = 1 - target_error / 2;
    if (!(keep > mixed) || want > keep || want < mixed) {
        throw Error(ErrorCode::InvalidArgument, "requested counts error is not reachable by depolarizing this device");
    }
    return (keep - want) / (keep - mixed);
}

uint64_t derive_seed(uint64_t base, uint64_t index) {
    // splitmix64 finalizer over the combined words.
    uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace balero

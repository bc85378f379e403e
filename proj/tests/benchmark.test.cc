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

#include <cmath>
#include <set>

#include "balero/error.h"
#include "gtest/gtest.h"

using namespace balero;

TEST(estimators, parse_names) {
    EXPECT_EQ(parse_estimator("balero"), Estimator::Balero);
    EXPECT_EQ(parse_estimator("counts"), Estimator::Counts);
    EXPECT_EQ(parse_estimator("inversion"), Estimator::Inversion);
    EXPECT_EQ(parse_estimator_list("all").size(), 3u);
    EXPECT_EQ(parse_estimator_list("counts"), std::vector<Estimator>{Estimator::Counts});
    EXPECT_THROW(parse_estimator("mle"), Error);
}

TEST(estimators, options_validation) {
    InferenceOptions o;
    EXPECT_NO_THROW(o.validate());
    o.grid_points = 1;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.epsilon = 0;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.max_sweeps = -1;
    EXPECT_THROW(o.validate(), Error);
}

TEST(estimators, path_follows_register_size) {
    std::vector<QubitResponseModel> preset = quito_like_preset();
    for (int n_q : {1, 2, 3}) {
        std::vector<QubitResponseModel> models(preset.begin(), preset.begin() + n_q);
        std::vector<Separatrix> seps = fit_separatrices(models);
        TrueState state = bitstring_populations(std::string(static_cast<size_t>(n_q), '1'));
        ShotBatch batch = sample_shots(state, models, 300, 5);
        InferenceOptions o;
        o.simplex_divisions = 16;
        BaleroOutput out = run_balero(models, seps, batch.x, o);
        InferencePath want = n_q == 1 ? InferencePath::Single : n_q == 2 ? InferencePath::Joint : InferencePath::Pairwise;
        EXPECT_EQ(out.path, want);
        EXPECT_EQ(out.posterior.has_value(), n_q == 1);
        EXPECT_EQ(out.pairwise.has_value(), n_q == 3);
        ASSERT_EQ(out.estimate.populations.size(), size_t{1} << n_q);
        EXPECT_GT(out.estimate.populations.back(), 0.9);
    }
}

TEST(benchmark, derive_seed_is_deterministic_and_distinct) {
    EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
    std::set<uint64_t> seen;
    for (uint64_t base : {0, 1, 2}) {
        for (uint64_t k = 0; k < 100; ++k) {
            seen.insert(derive_seed(base, k));
        }
    }
    EXPECT_EQ(seen.size(), 300u);
}

TEST(benchmark, solved_depolarizing_hits_target_counts_error) {
    std::vector<QubitResponseModel> models = bitstring_preset();
    std::vector<Separatrix> seps = fit_separatrices(models);
    ConfusionMatrix c = build_confusion(models, seps);
    BasisIndex target = from_bitstring("0110");
    double lambda = solve_depolarizing(c, target, 0.20);
    ASSERT_GT(lambda, 0);
    ASSERT_LT(lambda, 1);

    // Oracle: expected counts fractions of the depolarized state, compared
    // with the ideal basis state.
    TrueState noisy = apply_depolarizing(bitstring_populations("0110"), NoiseConfig{lambda, 0});
    std::vector<double> expected = apply_confusion(c, noisy.populations);
    double l1 = 0;
    for (size_t k = 0; k < expected.size(); ++k) {
        l1 += std::abs(expected[k] - (k == target.value ? 1.0 : 0.0));
    }
    EXPECT_NEAR(l1, 0.20, 1e-12);
}

TEST(benchmark, config_validation) {
    BenchmarkConfig c;
    c.scenario = "bell";
    EXPECT_NO_THROW(c.validate());
    c.n_shots = {};
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.n_seeds = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.n_shots = {0};
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.scenario = "bitstring-prep";
    c.bitstring = "01";
    c.n_shots = {10};
    c.n_seeds = 1;
    c.calibration_shots = 0;
    EXPECT_THROW(run_benchmark(c), Error);
    c.scenario = "nope";
    try {
        run_benchmark(c);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownScenario);
    }
}

TEST(benchmark, scenarios_are_reproducible) {
    EXPECT_EQ(scenario_names().size(), 5u);
    BenchmarkConfig c;
    c.scenario = "bell";
    c.n_shots = {50, 200};
    c.n_seeds = 2;
    c.calibration_shots = 2000;
    c.inference.simplex_divisions = 16;
    BenchmarkResult a = run_benchmark(c);
    BenchmarkResult b = run_benchmark(c);
    ASSERT_EQ(a.metrics.size(), b.metrics.size());
    ASSERT_EQ(a.metrics.size(), 2u * 2u * 3u);
    for (size_t k = 0; k < a.metrics.size(); ++k) {
        EXPECT_EQ(a.metrics[k].value, b.metrics[k].value);
        EXPECT_EQ(a.metrics[k].seed, b.metrics[k].seed);
        EXPECT_GE(a.metrics[k].value, 0);
    }
    c.seed = 2;
    BenchmarkResult other = run_benchmark(c);
    EXPECT_NE(other.metrics[0].value, a.metrics[0].value);
}

TEST(benchmark, estimator_subset_is_respected) {
    BenchmarkConfig c;
    c.scenario = "readout-fidelity";
    c.n_shots = {100};
    c.n_seeds = 1;
    c.calibration_shots = 0;
    c.estimators = {Estimator::Counts};
    BenchmarkResult r = run_benchmark(c);
    ASSERT_FALSE(r.metrics.empty());
    for (const MetricReport &m : r.metrics) {
        EXPECT_EQ(m.estimator, "counts");
    }
    int misassignments = 0;
    for (const auto &[name, v] : r.facts) {
        misassignments += name.starts_with("misassignment[");
    }
    EXPECT_EQ(misassignments, 5);
}

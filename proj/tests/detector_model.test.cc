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

#include "balero/detector_model.h"

#include <cmath>
#include <numbers>
#include <random>

#include "balero/error.h"
#include "balero/simulator.h"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace balero;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected balero::Error";
    return ErrorCode::InvalidArgument;
}

std::vector<IQShot> cloud(double ci, double cq, double sigma, size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> ni(ci, sigma), nq(cq, sigma);
    std::vector<IQShot> out(n);
    for (auto &s : out) {
        s = {ni(rng), nq(rng)};
    }
    return out;
}

}  // namespace

TEST(fit_projection, axis_aligned_centroids) {
    std::vector<IQShot> g = {{-0.1, 0}, {0.1, 0}};
    std::vector<IQShot> e = {{0.9, 0}, {1.1, 0}};
    ProjectionSpec spec = fit_projection(g, e);
    EXPECT_NEAR(spec.angle, 0, 1e-12);
    EXPECT_NEAR(spec.offset, 0.5, 1e-12);

    std::vector<IQShot> g2 = {{0, -0.5}, {0, 0.5}};
    std::vector<IQShot> e2 = {{0, 1.5}, {0, 2.5}};
    spec = fit_projection(g2, e2);
    EXPECT_NEAR(spec.angle, std::numbers::pi / 2, 1e-12);
    EXPECT_NEAR(spec.offset, 1.0, 1e-12);
    EXPECT_NEAR(project(spec, {0, 0}), -1.0, 1e-12);
    EXPECT_NEAR(project(spec, {0, 2}), 1.0, 1e-12);
}

TEST(fit_projection, diagonal_clouds_match_sample_mean_oracle) {
    auto g = cloud(1, 1, 0.5, 10000, 11);
    auto e = cloud(3, 3, 0.5, 10000, 12);
    double gi = 0, gq = 0, ei = 0, eq = 0;
    for (size_t k = 0; k < g.size(); ++k) {
        gi += g[k].i;
        gq += g[k].q;
        ei += e[k].i;
        eq += e[k].q;
    }
    double oracle = std::atan2(eq - gq, ei - gi);
    ProjectionSpec spec = fit_projection(g, e);
    EXPECT_NEAR(spec.angle, oracle, 1e-12);
    EXPECT_NEAR(spec.angle, std::numbers::pi / 4, 0.02);
}

TEST(fit_projection, errors) {
    std::vector<IQShot> a = {{1, 1}, {1, 1}};
    EXPECT_EQ(code_of([&] { fit_projection(a, a); }), ErrorCode::DegenerateClouds);
    std::vector<IQShot> one = {{0, 0}};
    EXPECT_EQ(code_of([&] { fit_projection(one, a); }), ErrorCode::InsufficientSamples);
    std::vector<IQShot> bad = {{0, NAN}, {1, 1}};
    EXPECT_EQ(code_of([&] { fit_projection(bad, a); }), ErrorCode::InvalidArgument);
}

TEST(project, examples) {
    EXPECT_DOUBLE_EQ(project({0, 0}, {2.5, 7}), 2.5);
    EXPECT_NEAR(project({std::numbers::pi / 2, 1}, {3, 4}), 3.0, 1e-12);
    EXPECT_NEAR(project({std::numbers::pi / 4, 0}, {1, 1}), std::sqrt(2.0), 1e-12);
}

TEST(project, affine_in_the_shot) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 200; ++trial) {
        ProjectionSpec spec{u(rng) / 3, u(rng)};
        IQShot a{u(rng), u(rng)};
        IQShot b{u(rng), u(rng)};
        double direct = std::cos(spec.angle) * (a.i - b.i) + std::sin(spec.angle) * (a.q - b.q);
        EXPECT_NEAR(project(spec, a) - project(spec, b), direct, 1e-12);
    }
}

TEST(fit_bimodal, recovers_separated_mixture) {
    auto xs = oracle::sample_mixture(100000, 0, 1, 4, 1, 0.05, 21);
    BimodalResponse r = fit_bimodal(xs);
    EXPECT_NEAR(r.main.mean, 0, 0.05);
    EXPECT_NEAR(r.main.std, 1, 0.05);
    EXPECT_NEAR(r.leak.mean, 4, 0.05);
    EXPECT_NEAR(r.leak.std, 1, 0.05);
    EXPECT_NEAR(r.leak_weight, 0.05, 0.01);
}

TEST(fit_bimodal, pure_gaussian_collapses_to_single_component) {
    auto xs = oracle::sample_mixture(100000, 2, 0.5, 0, 1, 0.0, 22);
    BimodalResponse r = fit_bimodal(xs);
    EXPECT_NEAR(r.main.mean, 2, 0.01);
    EXPECT_LE(r.leak_weight, 0.05);
    for (double x = 2 - 1.5; x <= 2 + 1.5; x += 0.05) {
        double want = static_cast<double>(oracle::gauss_pdf(x, 2, 0.5));
        EXPECT_NEAR(std::exp(eval_log_density(r, x)) / want, 1.0, 0.05) << "x=" << x;
    }
}

TEST(fit_bimodal, guards) {
    std::vector<double> few(50, 1.0);
    EXPECT_EQ(code_of([&] { fit_bimodal(few); }), ErrorCode::InsufficientSamples);
    std::vector<double> flat(200, 3.0);
    EXPECT_EQ(code_of([&] { fit_bimodal(flat); }), ErrorCode::FitDiverged);
    std::vector<double> nan_samples(200, 0.0);
    nan_samples[7] = NAN;
    EXPECT_EQ(code_of([&] { fit_bimodal(nan_samples); }), ErrorCode::InvalidArgument);
}

TEST(fit_bimodal, log_likelihood_is_monotone) {
    for (uint64_t seed : {1, 2, 3}) {
        auto xs = oracle::sample_mixture(20000, -1, 0.8, 1.5, 1.2, 0.3, seed);
        BimodalFit fit = fit_bimodal_detailed(xs);
        ASSERT_GE(fit.log_likelihood_trace.size(), 2u);
        for (size_t k = 1; k < fit.log_likelihood_trace.size(); ++k) {
            EXPECT_GE(fit.log_likelihood_trace[k], fit.log_likelihood_trace[k - 1] - 1e-9) << "iteration " << k;
        }
    }
}

TEST(fit_bimodal, fitted_density_integrates_to_one) {
    auto xs = oracle::sample_mixture(50000, 0, 1, 3, 0.7, 0.2, 31);
    BimodalResponse r = fit_bimodal(xs);
    double sigma = r.max_std();
    double lo = std::min(r.main.mean, r.leak.mean) - 10 * sigma;
    double hi = std::max(r.main.mean, r.leak.mean) + 10 * sigma;
    double mass = oracle::trapezoid([&](double x) { return std::exp(eval_log_density(r, x)); }, lo, hi, 200000);
    EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(fit_bimodal, error_does_not_grow_with_sample_count) {
    auto recovery_error = [](size_t n, uint64_t seed) {
        auto xs = oracle::sample_mixture(n, 0, 1, 5, 1, 0.1, seed);
        BimodalResponse r = fit_bimodal(xs);
        return std::abs(r.main.mean) + std::abs(r.main.std - 1) + std::abs(r.leak.mean - 5) + std::abs(r.leak.std - 1) +
               std::abs(r.leak_weight - 0.1);
    };
    double small = 0, large = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        small += recovery_error(5000, 100 + seed);
        large += recovery_error(10000, 200 + seed);
    }
    EXPECT_LE(large / 20, small / 20);
}

TEST(eval_log_density, examples) {
    BimodalResponse unimodal{{0, 1}, {3, 1}, 0.0};
    EXPECT_NEAR(eval_log_density(unimodal, 0), -0.91893853320467274, 1e-12);

    BimodalResponse twin{{0, 1}, {0, 1}, 0.5};
    for (double x : {-3.0, 0.2, 7.5}) {
        EXPECT_NEAR(eval_log_density(twin, x), std::log(static_cast<double>(oracle::gauss_pdf(x, 0, 1))), 1e-12);
    }

    BimodalResponse mixed{{0, 1}, {5, 2}, 0.1};
    long double oracle = std::log(oracle::mixture_pdf(5.0L, 0, 1, 5, 2, 0.1L));
    EXPECT_NEAR(eval_log_density(mixed, 5), static_cast<double>(oracle), 1e-12);
}

TEST(eval_log_density, finite_far_in_the_tails) {
    BimodalResponse r{{0, 1}, {4, 1}, 0.02};
    for (double x : {-1e5, -300.0, 300.0, 1e5}) {
        double v = eval_log_density(r, x);
        EXPECT_TRUE(std::isfinite(v)) << x;
    }
}

TEST(calibrate_qubit, recovers_overlapping_generating_model) {
    ProjectionSpec truth_proj{0.4, 0.2};
    QubitResponseModel truth = make_detector("q0", 2.0, 1.0, 0.03, 0.05, truth_proj);
    CalibrationDataset data = sample_calibration(truth, 100000, 41);
    QubitResponseModel fit = calibrate_qubit(data);

    // Generating main means, carried through the fitted projection.
    auto fitted_coordinate = [&](double true_x) {
        double along = true_x + truth_proj.offset;
        IQShot p{along * std::cos(truth_proj.angle), along * std::sin(truth_proj.angle)};
        return project(fit.projection, p);
    };
    EXPECT_NEAR(fit.p_g.main.mean, fitted_coordinate(-1.0), 0.05);
    EXPECT_NEAR(fit.p_e.main.mean, fitted_coordinate(1.0), 0.05);
    EXPECT_NEAR(fit.p_g.main.std, 1.0, 0.05);
    EXPECT_NEAR(fit.p_e.main.std, 1.0, 0.05);
    EXPECT_NEAR(fit.p_g.leak_weight, 0.03, 0.01);
    EXPECT_NEAR(fit.p_e.leak_weight, 0.05, 0.01);
    EXPECT_EQ(fit.qubit_id, "q0");
}

TEST(calibrate_qubit, separated_clouds_do_not_overlap) {
    QubitResponseModel truth = make_detector("q1", 100.0, 1.0, 0.0, 0.0, {1.0, 0.0});
    QubitResponseModel fit = calibrate_qubit(sample_calibration(truth, 20000, 42));
    EXPECT_LT(overlap_integral(fit), 1e-12);
    EXPECT_NEAR(fit.p_e.main.mean - fit.p_g.main.mean, 100.0, 0.1);
}

TEST(calibrate_qubit, canonical_orientation_for_any_cloud_geometry) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> angle(-3.1, 3.1);
    for (int trial = 0; trial < 6; ++trial) {
        QubitResponseModel truth = make_detector("q", 3.0, 0.8, 0.02, 0.04, {angle(rng), angle(rng)});
        for (LeakModel mode : {LeakModel::Tied, LeakModel::Free}) {
            CalibrationOptions opts;
            opts.leak_model = mode;
            QubitResponseModel fit = calibrate_qubit(sample_calibration(truth, 5000, 100 + trial), opts);
            EXPECT_LT(fit.p_g.main.mean, fit.p_e.main.mean);
        }
    }
}

TEST(calibrate_qubit, free_mode_on_separated_clouds) {
    QubitResponseModel truth = make_detector("q", 6.0, 1.0, 0.04, 0.06, {0.7, -0.3});
    CalibrationOptions opts;
    opts.leak_model = LeakModel::Free;
    QubitResponseModel fit = calibrate_qubit(sample_calibration(truth, 100000, 43), opts);
    EXPECT_NEAR(fit.p_g.leak_weight, 0.04, 0.01);
    EXPECT_NEAR(fit.p_e.leak_weight, 0.06, 0.01);
    EXPECT_NEAR(fit.p_e.main.mean - fit.p_g.main.mean, 6.0, 0.05);
}

TEST(calibrate_qubit, missing_block_names_the_qubit) {
    CalibrationDataset data;
    data.qubit_id = "Q7";
    data.ground_shots = {{0, 0}, {1, 1}};
    try {
        calibrate_qubit(data);
        FAIL() << "expected an error";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
        EXPECT_NE(std::string(e.what()).find("Q7"), std::string::npos);
    }
}

TEST(fit_tied_pair, log_likelihood_is_monotone) {
    QubitResponseModel truth = make_detector("q", 2.5, 1.0, 0.05, 0.08, {});
    CalibrationDataset data = sample_calibration(truth, 20000, 44);
    ProjectionSpec spec = fit_projection(data.ground_shots, data.excited_shots);
    TiedFit fit = fit_tied_pair(project_all(spec, data.ground_shots), project_all(spec, data.excited_shots));
    for (size_t k = 1; k < fit.log_likelihood_trace.size(); ++k) {
        EXPECT_GE(fit.log_likelihood_trace[k], fit.log_likelihood_trace[k - 1] - 1e-9);
    }
    EXPECT_TRUE(fit.converged);
}

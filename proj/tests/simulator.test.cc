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

#include <cmath>
#include <numbers>

#include "balero/baselines.h"
#include "balero/error.h"
#include "gtest/gtest.h"

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

QubitResponseModel pure_model(double mg, double me, double s) {
    QubitResponseModel m;
    m.p_g = {{mg, s}, {me, s}, 0.0};
    m.p_e = {{me, s}, {mg, s}, 0.0};
    return m;
}

}  // namespace

TEST(ry_populations, examples) {
    EXPECT_NEAR(ry_populations(0).populations[0], 1, 1e-15);
    EXPECT_NEAR(ry_populations(0).populations[1], 0, 1e-15);
    EXPECT_NEAR(ry_populations(std::numbers::pi).populations[0], 0, 1e-15);
    EXPECT_NEAR(ry_populations(std::numbers::pi / 2).populations[0], 0.5, 1e-15);
    for (double t = -7; t < 7; t += 0.37) {
        TrueState s = ry_populations(t);
        EXPECT_NEAR(s.populations[0], std::pow(std::cos(t / 2), 2), 1e-15);
        EXPECT_NEAR(s.populations[0] + s.populations[1], 1, 1e-15);
    }
}

TEST(bell_populations, examples) {
    TrueState s = bell_populations();
    EXPECT_EQ(s.n_qubits(), 2);
    EXPECT_EQ(s.populations, (std::vector<double>{0.5, 0, 0, 0.5}));
}

TEST(bitstring_populations, examples) {
    TrueState s = bitstring_populations("0110");
    ASSERT_EQ(s.populations.size(), 16u);
    EXPECT_EQ(s.populations[6], 1.0);
    EXPECT_EQ(bitstring_populations("0").populations, (std::vector<double>{1, 0}));
    EXPECT_EQ(code_of([] { bitstring_populations(""); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { bitstring_populations("01x"); }), ErrorCode::InvalidArgument);
}

TEST(apply_depolarizing, examples) {
    TrueState s = bitstring_populations("00");
    EXPECT_EQ(apply_depolarizing(s, {0, 0}).populations, s.populations);
    for (double v : apply_depolarizing(s, {1, 0}).populations) {
        EXPECT_NEAR(v, 0.25, 1e-15);
    }
    std::vector<double> want = {0.85, 0.05, 0.05, 0.05};
    auto got = apply_depolarizing(s, {0.2, 0}).populations;
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(got[k], want[k], 1e-15);
    }
    EXPECT_EQ(code_of([&] { apply_depolarizing(s, {1.5, 0}); }), ErrorCode::InvalidArgument);
}

TEST(sample_shots, ground_delta_mean) {
    std::vector<QubitResponseModel> models = {pure_model(0, 5, 0.1)};
    ShotBatch b = sample_shots(TrueState{{1, 0}}, models, 10000, 14);
    double mean = 0;
    for (auto &v : b.x) {
        mean += v[0];
    }
    mean /= b.x.size();
    EXPECT_NEAR(mean, 0.0, 0.004);
}

TEST(sample_shots, deterministic_in_seed) {
    auto models = quito_like_preset();
    TrueState s = apply_depolarizing(bitstring_populations("10101"), {0.3, 0});
    SampleOptions opts;
    opts.lift_to_iq = true;
    ShotBatch a = sample_shots(s, models, 500, 77, opts);
    ShotBatch b = sample_shots(s, models, 500, 77, opts);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.prepared, b.prepared);
    ASSERT_EQ(a.iq.size(), 500u);
    for (size_t k = 0; k < 500; ++k) {
        for (size_t q = 0; q < 5; ++q) {
            EXPECT_EQ(a.iq[k][q].i, b.iq[k][q].i);
        }
    }
    EXPECT_NE(sample_shots(s, models, 500, 78).x, a.x);
}

TEST(sample_shots, iq_lift_projects_back) {
    auto models = quito_like_preset();
    models[2].projection = {1.1, -0.4};
    SampleOptions opts;
    opts.lift_to_iq = true;
    ShotBatch b = sample_shots(bitstring_populations("00100"), models, 200, 15, opts);
    for (size_t k = 0; k < 200; ++k) {
        for (size_t q = 0; q < 5; ++q) {
            EXPECT_NEAR(project(models[q].projection, b.iq[k][q]), b.x[k][q], 1e-12);
        }
    }
}

TEST(sample_shots, balanced_state_binomial_fraction) {
    std::vector<QubitResponseModel> models = {pure_model(-10, 10, 1)};
    const size_t n = 10000;
    ShotBatch b = sample_shots(TrueState{{0.5, 0.5}}, models, n, 16);
    size_t ground = 0;
    for (auto &v : b.x) {
        ground += v[0] < 0;
    }
    EXPECT_NEAR(static_cast<double>(ground) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(sample_shots, validates_inputs) {
    std::vector<QubitResponseModel> one = {pure_model(-1, 1, 1)};
    EXPECT_EQ(code_of([&] { sample_shots(bell_populations(), one, 10, 0); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { sample_shots(TrueState{{0.5, 0.6}}, one, 10, 0); }), ErrorCode::InvalidArgument);
}

TEST(presets, quito_misassignment_near_five_percent) {
    auto models = quito_like_preset();
    ASSERT_EQ(models.size(), 5u);
    for (auto &m : models) {
        EXPECT_NEAR(misassignment_rate(m, fit_separatrix(m)), 0.05, 1e-6) << m.qubit_id;
        EXPECT_LT(m.p_g.main.mean, m.p_e.main.mean);
    }
}

TEST(presets, bitstring_target_survival) {
    auto models = bitstring_preset();
    ASSERT_EQ(models.size(), 4u);
    std::vector<Separatrix> seps;
    for (auto &m : models) {
        seps.push_back(fit_separatrix(m));
    }
    ConfusionMatrix c = build_confusion(models, seps);
    EXPECT_NEAR(c.at(6, 6), 0.92, 1e-6);
}

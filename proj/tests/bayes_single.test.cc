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

#include "balero/bayes_single.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "balero/baselines.h"
#include "balero/error.h"
#include "balero/simulator.h"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace balero;

namespace {

QubitResponseModel pure_model(double mg, double sg, double me, double se) {
    QubitResponseModel m;
    m.p_g = {{mg, sg}, {me, se}, 0.0};
    m.p_e = {{me, se}, {mg, sg}, 0.0};
    m.qubit_id = "q";
    return m;
}

std::vector<double> draw_single(const QubitResponseModel &model, double rho_g, size_t n, uint64_t seed) {
    TrueState s{{rho_g, 1 - rho_g}};
    std::vector<QubitResponseModel> models = {model};
    ShotBatch b = sample_shots(s, models, n, seed);
    std::vector<double> xs;
    xs.reserve(n);
    for (auto &v : b.x) {
        xs.push_back(v[0]);
    }
    return xs;
}

double density_at(const PosteriorGrid1D &g, int k) {
    return std::exp(g.log_weights[k]);
}

}  // namespace

TEST(uniform_prior, examples) {
    PosteriorGrid1D g = uniform_prior(5);
    ASSERT_EQ(g.n_points, 5);
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(density_at(g, k), 1.0, 1e-15);
    }
    PosteriorGrid1D big = uniform_prior(1001);
    EXPECT_NEAR(oracle::trapezoid([&](double r) { return density_at(big, static_cast<int>(std::lround(r * 1000))); }, 0, 1, 1000),
                1.0, 1e-12);
    try {
        uniform_prior(2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidResolution);
    }
}

TEST(log_likelihood_single, pure_state_limits_are_exact) {
    QubitResponseModel m = pure_model(0, 1, 2, 1.3);
    m.p_g.leak_weight = 0.04;
    m.p_e.leak_weight = 0.07;
    for (double x : {-4.0, 0.0, 0.7, 2.0, 9.0}) {
        EXPECT_EQ(log_likelihood_single(m, 1.0, x), eval_log_density(m.p_g, x));
        EXPECT_EQ(log_likelihood_single(m, 0.0, x), eval_log_density(m.p_e, x));
    }
}

TEST(log_likelihood_single, symmetric_midpoint) {
    QubitResponseModel m = pure_model(0, 1, 2, 1);
    long double direct = std::log(0.5L * oracle::gauss_pdf(1, 0, 1) + 0.5L * oracle::gauss_pdf(1, 2, 1));
    EXPECT_NEAR(log_likelihood_single(m, 0.5, 1), static_cast<double>(direct), 1e-12);
    EXPECT_NEAR(log_likelihood_single(m, 0.5, 1), -1.4189385332046727, 1e-12);
}

TEST(update_posterior, empty_shot_list_is_identity) {
    QubitResponseModel m = pure_model(0, 1, 2, 1);
    PosteriorGrid1D g = update_posterior(uniform_prior(11), m, std::vector<double>{0.3});
    PosteriorGrid1D same = update_posterior(g, m, {});
    EXPECT_EQ(same.log_weights, g.log_weights);
}

TEST(update_posterior, separated_supports_concentrate_on_ground) {
    QubitResponseModel m = pure_model(-50, 1, 50, 1);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> near(-50, 1);
    std::vector<double> xs(100);
    for (auto &x : xs) {
        x = near(rng);
    }
    PopulationEstimate e = estimate(update_posterior(uniform_prior(), m, xs));
    EXPECT_GT(e.populations[0], 0.99);
}

TEST(update_posterior, brute_force_product_oracle) {
    QubitResponseModel m = pure_model(0, 1, 1.5, 0.8);
    m.p_g.leak_weight = 0.1;
    m.p_e.leak_weight = 0.2;
    std::vector<double> xs = {-0.4, 1.1, 2.3};
    PosteriorGrid1D g = update_posterior(uniform_prior(5), m, xs);

    std::vector<long double> raw(5);
    for (int k = 0; k < 5; ++k) {
        long double r = k / 4.0L;
        raw[k] = 1;
        for (double x : xs) {
            long double pg = oracle::mixture_pdf(x, 0, 1, 1.5, 0.8, 0.1L);
            long double pe = oracle::mixture_pdf(x, 1.5, 0.8, 0, 1, 0.2L);
            raw[k] *= r * pg + (1 - r) * pe;
        }
    }
    long double mass = 0.25L * (0.5L * raw[0] + raw[1] + raw[2] + raw[3] + 0.5L * raw[4]);
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(density_at(g, k), static_cast<double>(raw[k] / mass), 1e-12) << k;
    }
}

TEST(update_posterior, shot_order_invariance) {
    QubitResponseModel m = make_detector("q", 2.0, 1.0, 0.03, 0.05, {});
    std::vector<double> xs = draw_single(m, 0.7, 2000, 8);
    PosteriorGrid1D a = update_posterior(uniform_prior(), m, xs);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(xs.begin(), xs.end(), rng);
        PosteriorGrid1D b = update_posterior(uniform_prior(), m, xs);
        for (int k = 0; k < a.n_points; ++k) {
            EXPECT_NEAR(a.log_weights[k], b.log_weights[k], 1e-9);
        }
    }
}

TEST(update_posterior, batch_equals_sequential) {
    QubitResponseModel m = make_detector("q", 2.0, 1.0, 0.03, 0.05, {});
    std::vector<double> xs = draw_single(m, 0.4, 300, 9);
    PosteriorGrid1D batch = update_posterior(uniform_prior(), m, xs);
    PosteriorGrid1D seq = uniform_prior();
    for (double x : xs) {
        seq = update_posterior(seq, m, std::span<const double>(&x, 1));
    }
    for (int k = 0; k < batch.n_points; ++k) {
        EXPECT_NEAR(batch.log_weights[k], seq.log_weights[k], 1e-9);
    }
}

TEST(update_posterior, stays_normalized_and_finite) {
    QubitResponseModel m = make_detector("q", 4.0, 1.0, 0.01, 0.02, {});
    for (size_t n : {1u, 10u, 1000u, 100000u}) {
        PosteriorGrid1D g = update_posterior(uniform_prior(), m, draw_single(m, 0.25, n, n));
        EXPECT_NEAR(g.trapezoid_mass(), 1.0, 1e-9);
        for (double lw : g.log_weights) {
            ASSERT_TRUE(std::isfinite(lw));
        }
    }
}

TEST(update_posterior, separated_detector_matches_counts) {
    QubitResponseModel m = pure_model(-20, 1, 20, 1);
    ASSERT_LT(overlap_integral(m), 1e-12);
    std::vector<QubitResponseModel> models = {m};
    std::vector<Separatrix> seps = {fit_separatrix(m)};
    for (size_t n : {1000u, 5000u, 20000u}) {
        for (double rho : {0.0, 0.13, 0.5, 0.9, 1.0}) {
            std::vector<double> xs = draw_single(m, rho, n, 7 * n + static_cast<uint64_t>(rho * 100));
            std::vector<ShotVector> sv;
            for (double x : xs) {
                sv.push_back({x});
            }
            double frac = count_fractions(assign_counts(seps, sv), 1)[0];
            PopulationEstimate e = estimate(update_posterior(uniform_prior(), m, xs));
            EXPECT_LT(std::abs(e.populations[0] - frac), 2.0 / 1001) << n << " " << rho;
        }
    }
}

TEST(update_posterior, posterior_contracts_with_more_shots) {
    QubitResponseModel m = make_detector("q", 2.0, 1.0, 0.03, 0.05, {});
    for (uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<double> xs = draw_single(m, 0.7, 10000, 500 + seed);
        PopulationEstimate few = estimate(update_posterior(uniform_prior(), m, std::span<const double>(xs).first(100)));
        PopulationEstimate many = estimate(update_posterior(uniform_prior(), m, xs));
        EXPECT_LT(many.std_devs[0], few.std_devs[0]) << seed;
    }
}

TEST(estimate, uniform_prior_moments) {
    PopulationEstimate e = estimate(uniform_prior());
    EXPECT_NEAR(e.populations[0], 0.5, 1e-12);
    EXPECT_NEAR(e.populations[1], 0.5, 1e-12);
    EXPECT_NEAR(e.std_devs[0], 1 / std::sqrt(12.0), 1e-6);
}

TEST(estimate, delta_at_ground) {
    PosteriorGrid1D g = uniform_prior(101);
    for (int k = 0; k < 100; ++k) {
        g.log_weights[k] = -1e4;
    }
    normalize(g);
    PopulationEstimate e = estimate(g);
    EXPECT_NEAR(e.populations[0], 1.0, 1.0 / 100);
    EXPECT_NEAR(e.populations[1], 0.0, 1.0 / 100);
}

TEST(estimate, linear_density_mean) {
    PosteriorGrid1D g = uniform_prior(1001);
    for (int k = 1; k < 1001; ++k) {
        g.log_weights[k] = std::log(2 * g.rho_at(k));
    }
    g.log_weights[0] = -800;
    normalize(g);
    EXPECT_NEAR(estimate(g).populations[0], 2.0 / 3.0, 1e-6);
}

TEST(estimate, populations_are_physical) {
    QubitResponseModel m = make_detector("q", 1.0, 1.0, 0.1, 0.1, {});
    for (double rho : {0.0, 0.02, 0.5, 0.98, 1.0}) {
        PopulationEstimate e = estimate(update_posterior(uniform_prior(), m, draw_single(m, rho, 5000, 17)));
        EXPECT_GE(e.populations[0], 0);
        EXPECT_LE(e.populations[0], 1);
        EXPECT_GE(e.populations[1], 0);
        EXPECT_NEAR(e.populations[0] + e.populations[1], 1.0, 1e-12);
    }
}

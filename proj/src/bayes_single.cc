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
#include <sstream>

#include "balero/error.h"
#include "numeric.h"

namespace balero {

namespace {

double trapezoid_weight(int k, int n) {
    double h = 1.0 / (n - 1);
    return (k == 0 || k == n - 1) ? 0.5 * h : h;
}

void check_grid(const PosteriorGrid1D &grid) {
    if (grid.n_points < 3 || static_cast<int>(grid.log_weights.size()) != grid.n_points) {
        std::stringstream ss;
        ss << "posterior grid needs n_points >= 3 matching log_weights, got n_points=" << grid.n_points
           << " with " << grid.log_weights.size() << " weights";
        throw Error(ErrorCode::InvalidResolution, ss.str());
    }
}

}  // namespace

double PosteriorGrid1D::trapezoid_mass() const {
    double mass = 0;
    for (int k = 0; k < n_points; ++k) {
        mass += trapezoid_weight(k, n_points) * std::exp(log_weights[k]);
    }
    return mass;
}

void normalize(PosteriorGrid1D &grid) {
    check_grid(grid);
    double peak = *std::max_element(grid.log_weights.begin(), grid.log_weights.end());
    double mass = 0;
    for (int k = 0; k < grid.n_points; ++k) {
        mass += trapezoid_weight(k, grid.n_points) * std::exp(grid.log_weights[k] - peak);
    }
    double shift = peak + std::log(mass);
    for (double &w : grid.log_weights) {
        w -= shift;
    }
}

PosteriorGrid1D uniform_prior(int n_points) {
    if (n_points < 3) {
        throw Error(ErrorCode::InvalidResolution, "uniform_prior needs n_points >= 3, got " + std::to_string(n_points));
    }
    return PosteriorGrid1D{n_points, std::vector<double>(static_cast<size_t>(n_points), 0.0)};
}

double log_likelihood_single(const QubitResponseModel &model, double rho_g, double x) {
    if (rho_g >= 1) {
        return eval_log_density(model.p_g, x);
    }
    if (rho_g <= 0) {
        return eval_log_density(model.p_e, x);
    }
    return detail::log_sum_exp(
        std::log(rho_g) + eval_log_density(model.p_g, x), std::log1p(-rho_g) + eval_log_density(model.p_e, x));
}

PosteriorGrid1D update_posterior(const PosteriorGrid1D &grid, const QubitResponseModel &model, std::span<const double> shots) {
    check_grid(grid);
    PosteriorGrid1D out = grid;
    if (shots.empty()) {
        return out;
    }

    // Per shot: split the two densities into a shot-dependent scale c_n and
    // normalized weights p_n + q_n = 1, so each term rho*p + (1-rho)*q lies
    // in [0, 1] and can be multiplied without overflow.
    const size_t n = shots.size();
    std::vector<double> p(n), q(n), lp(n), lq(n);
    for (size_t s = 0; s < n; ++s) {
        if (!std::isfinite(shots[s])) {
            throw Error(ErrorCode::InvalidArgument, "update_posterior received a non-finite shot");
        }
        double lg = eval_log_density(model.p_g, shots[s]);
        double le = eval_log_density(model.p_e, shots[s]);
        double c = detail::log_sum_exp(lg, le);
        lp[s] = lg - c;
        lq[s] = le - c;
        p[s] = std::exp(lp[s]);
        q[s] = std::exp(lq[s]);
    }

    for (int k = 0; k < grid.n_points; ++k) {
        double rho = grid.rho_at(k);
        double a = 1 - rho;
        double log_rho = detail::safe_log(rho);
        double log_a = detail::safe_log(a);
        detail::LogProductAccumulator acc;
        for (size_t s = 0; s < n; ++s) {
            double t = rho * p[s] + a * q[s];
            if (t < detail::LogProductAccumulator::kTiny) {
                acc.add_log(detail::log_sum_exp(log_rho + lp[s], log_a + lq[s]));
            } else {
                acc.add_linear(t);
            }
        }
        out.log_weights[k] += acc.total();
    }
    normalize(out);
    return out;
}

PopulationEstimate estimate(const PosteriorGrid1D &grid) {
    check_grid(grid);
    double mass = 0, m1 = 0, m2 = 0;
    for (int k = 0; k < grid.n_points; ++k) {
        double w = trapezoid_weight(k, grid.n_points) * std::exp(grid.log_weights[k]);
        double rho = grid.rho_at(k);
        mass += w;
        m1 += w * rho;
        m2 += w * rho * rho;
    }
    double mean = std::clamp(m1 / mass, 0.0, 1.0);
    double sd = std::sqrt(std::max(m2 / mass - mean * mean, 0.0));
    return PopulationEstimate{{mean, 1 - mean}, {sd, sd}};
}

}  // namespace balero

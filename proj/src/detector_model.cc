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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "balero/error.h"
#include "numeric.h"

namespace balero {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

double wrap_angle(double angle) {
    angle = std::remainder(angle, 2 * std::numbers::pi);
    if (angle <= -std::numbers::pi) {
        angle += 2 * std::numbers::pi;
    }
    return angle;
}

IQShot centroid(std::span<const IQShot> shots) {
    IQShot c;
    for (const auto &s : shots) {
        c.i += s.i;
        c.q += s.q;
    }
    c.i /= static_cast<double>(shots.size());
    c.q /= static_cast<double>(shots.size());
    return c;
}

void check_shots(std::span<const IQShot> shots, const char *name) {
    if (shots.size() < 2) {
        throw Error(ErrorCode::InsufficientSamples, std::string(name) + " needs at least 2 shots");
    }
    for (const auto &s : shots) {
        if (!std::isfinite(s.i) || !std::isfinite(s.q)) {
            throw Error(ErrorCode::InvalidArgument, std::string(name) + " contains a non-finite IQ coordinate");
        }
    }
}

struct Moments {
    double mean = 0;
    double std = 0;
};

Moments sample_moments(std::span<const double> xs) {
    double mean = 0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

/// Median and MAD-based std; falls back to the plain std when the MAD is zero.
GaussianComponent robust_summary(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double median = *mid;
    for (double &x : v) {
        x = std::abs(x - median);
    }
    std::nth_element(v.begin(), mid, v.end());
    double spread = 1.4826 * *mid;
    if (!(spread > 0)) {
        spread = sample_moments(xs).std;
    }
    return {median, spread};
}

struct Mixture {
    double weight[2];
    GaussianComponent comp[2];
};

BimodalResponse single_gaussian_response(const Moments &m) {
    GaussianComponent g{m.mean, m.std};
    return {g, g, 0.0};
}

/// k-means++ seeding of two centers followed by Lloyd iterations in 1D.
/// Returns false when one cluster ends up with fewer than two points.
bool kmeans_init(std::span<const double> xs, uint64_t seed, double std_floor, Mixture &out) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, xs.size() - 1);
    double c0 = xs[pick(rng)];
    std::vector<double> d2(xs.size());
    double total = 0;
    for (size_t k = 0; k < xs.size(); ++k) {
        d2[k] = (xs[k] - c0) * (xs[k] - c0);
        total += d2[k];
    }
    if (!(total > 0)) {
        return false;
    }
    std::discrete_distribution<size_t> d2_pick(d2.begin(), d2.end());
    double c1 = xs[d2_pick(rng)];

    size_t n0 = 0;
    double s0 = 0, s1 = 0;
    for (int iter = 0; iter < 100; ++iter) {
        double cut = 0.5 * (c0 + c1);
        bool low0 = c0 < c1;
        n0 = 0;
        s0 = 0;
        s1 = 0;
        for (double x : xs) {
            if ((x <= cut) == low0) {
                ++n0;
                s0 += x;
            } else {
                s1 += x;
            }
        }
        size_t n1 = xs.size() - n0;
        if (n0 < 2 || n1 < 2) {
            return false;
        }
        double nc0 = s0 / static_cast<double>(n0);
        double nc1 = s1 / static_cast<double>(n1);
        bool stable = nc0 == c0 && nc1 == c1;
        c0 = nc0;
        c1 = nc1;
        if (stable) {
            break;
        }
    }

    double cut = 0.5 * (c0 + c1);
    bool low0 = c0 < c1;
    double v0 = 0, v1 = 0;
    for (double x : xs) {
        if ((x <= cut) == low0) {
            v0 += (x - c0) * (x - c0);
        } else {
            v1 += (x - c1) * (x - c1);
        }
    }
    size_t n1 = xs.size() - n0;
    out.weight[0] = static_cast<double>(n0) / static_cast<double>(xs.size());
    out.weight[1] = 1 - out.weight[0];
    out.comp[0] = {c0, std::max(std::sqrt(v0 / static_cast<double>(n0)), std_floor)};
    out.comp[1] = {c1, std::max(std::sqrt(v1 / static_cast<double>(n1)), std_floor)};
    return true;
}

}  // namespace

double GaussianComponent::log_density(double x) const {
    double z = (x - mean) / std;
    return -0.5 * z * z - std::log(std) - kHalfLogTwoPi;
}

double BimodalResponse::max_std() const {
    return leak_weight > 0 ? std::max(main.std, leak.std) : main.std;
}

ProjectionSpec fit_projection(std::span<const IQShot> ground_shots, std::span<const IQShot> excited_shots) {
    check_shots(ground_shots, "ground_shots");
    check_shots(excited_shots, "excited_shots");
    IQShot g = centroid(ground_shots);
    IQShot e = centroid(excited_shots);
    double di = e.i - g.i;
    double dq = e.q - g.q;
    if (std::hypot(di, dq) < 1e-12) {
        throw Error(ErrorCode::DegenerateClouds, "ground and excited centroids coincide");
    }
    ProjectionSpec spec;
    spec.angle = wrap_angle(std::atan2(dq, di));
    spec.offset = std::cos(spec.angle) * 0.5 * (g.i + e.i) + std::sin(spec.angle) * 0.5 * (g.q + e.q);
    return spec;
}

double project(const ProjectionSpec &spec, const IQShot &shot) {
    return std::cos(spec.angle) * shot.i + std::sin(spec.angle) * shot.q - spec.offset;
}

std::vector<double> project_all(const ProjectionSpec &spec, std::span<const IQShot> shots) {
    double c = std::cos(spec.angle);
    double s = std::sin(spec.angle);
    std::vector<double> out;
    out.reserve(shots.size());
    for (const auto &shot : shots) {
        out.push_back(c * shot.i + s * shot.q - spec.offset);
    }
    return out;
}

BimodalFit fit_bimodal_detailed(std::span<const double> samples, const FitOptions &options) {
    if (samples.size() < 100) {
        std::stringstream ss;
        ss << "fit_bimodal needs at least 100 samples, got " << samples.size();
        throw Error(ErrorCode::InsufficientSamples, ss.str());
    }
    for (double x : samples) {
        if (!std::isfinite(x)) {
            throw Error(ErrorCode::InvalidArgument, "fit_bimodal received a non-finite sample");
        }
    }
    const auto n = static_cast<double>(samples.size());
    Moments overall = sample_moments(samples);
    if (!(overall.std > 0)) {
        throw Error(ErrorCode::FitDiverged, "all samples are identical");
    }
    const double std_floor = 1e-6 * overall.std;
    const double single_ll = -0.5 * n * (2 * std::log(overall.std) + 2 * kHalfLogTwoPi + 1);

    BimodalFit fit;
    auto collapse = [&]() {
        fit.response = single_gaussian_response(overall);
        fit.collapsed_to_single = true;
        return fit;
    };

    Mixture mix{};
    if (options.leak_hint.has_value()) {
        GaussianComponent center = robust_summary(samples);
        mix.weight[0] = 0.9;
        mix.weight[1] = 0.1;
        mix.comp[0] = {center.mean, std::max(center.std, std_floor)};
        mix.comp[1] = {options.leak_hint->mean, std::max(options.leak_hint->std, std_floor)};
    } else if (!kmeans_init(samples, options.seed, std_floor, mix)) {
        return collapse();
    }

    double prev_ll = detail::kNegInf;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const double lw0 = std::log(mix.weight[0]) - std::log(mix.comp[0].std);
        const double lw1 = std::log(mix.weight[1]) - std::log(mix.comp[1].std);
        const double inv0 = 1 / mix.comp[0].std;
        const double inv1 = 1 / mix.comp[1].std;
        const double m0 = mix.comp[0].mean;
        const double m1 = mix.comp[1].mean;

        detail::CompensatedSum ll_sum;
        double r_sum = 0, r_x = 0, r_xx = 0;
        double o_x = 0, o_xx = 0;
        for (double x : samples) {
            double z0 = (x - m0) * inv0;
            double z1 = (x - m1) * inv1;
            double a = lw0 - 0.5 * z0 * z0;
            double b = lw1 - 0.5 * z1 * z1;
            double e = std::exp(-std::abs(a - b));
            double r_big = 1 / (1 + e);
            double r0 = a >= b ? r_big : 1 - r_big;
            ll_sum.add(std::max(a, b) + std::log1p(e));
            double d0 = x - m0;
            double d1 = x - m1;
            r_sum += r0;
            r_x += r0 * d0;
            r_xx += r0 * d0 * d0;
            o_x += (1 - r0) * d1;
            o_xx += (1 - r0) * d1 * d1;
        }
        const double ll = ll_sum.value() - n * kHalfLogTwoPi;
        fit.log_likelihood_trace.push_back(ll);
        fit.iterations = iter + 1;
        fit.response = {mix.comp[0], mix.comp[1], mix.weight[1]};
        if (iter > 0 && (ll - prev_ll) / n < options.tolerance) {
            fit.converged = true;
            break;
        }
        prev_ll = ll;

        double other = n - r_sum;
        if (r_sum < 1e-9 * n || other < 1e-9 * n) {
            return collapse();
        }
        double shift0 = r_x / r_sum;
        double shift1 = o_x / other;
        mix.weight[0] = r_sum / n;
        mix.weight[1] = other / n;
        mix.comp[0].mean = m0 + shift0;
        mix.comp[1].mean = m1 + shift1;
        mix.comp[0].std = std::max(std::sqrt(std::max(r_xx / r_sum - shift0 * shift0, 0.0)), std_floor);
        mix.comp[1].std = std::max(std::sqrt(std::max(o_xx / other - shift1 * shift1, 0.0)), std_floor);
    }

    if (mix.comp[0].std <= std_floor || mix.comp[1].std <= std_floor) {
        throw Error(ErrorCode::FitDiverged, "a mixture component collapsed onto a single point");
    }
    // BIC: three extra parameters for the second component.
    if (fit.log_likelihood_trace.back() - single_ll <= 1.5 * std::log(n)) {
        return collapse();
    }
    if (fit.response.leak_weight > 0.5) {
        std::swap(fit.response.main, fit.response.leak);
        fit.response.leak_weight = 1 - fit.response.leak_weight;
    }
    return fit;
}

BimodalResponse fit_bimodal(std::span<const double> samples, const FitOptions &options) {
    return fit_bimodal_detailed(samples, options).response;
}

double eval_log_density(const BimodalResponse &resp, double x) {
    double main = resp.main.log_density(x);
    if (resp.leak_weight <= 0) {
        return main;
    }
    return detail::log_sum_exp(std::log1p(-resp.leak_weight) + main, std::log(resp.leak_weight) + resp.leak.log_density(x));
}

TiedFit fit_tied_pair(std::span<const double> ground, std::span<const double> excited, const FitOptions &options) {
    for (auto xs : {ground, excited}) {
        if (xs.size() < 100) {
            throw Error(ErrorCode::InsufficientSamples, "tied fit needs at least 100 samples per cloud");
        }
        for (double x : xs) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::InvalidArgument, "tied fit received a non-finite sample");
            }
        }
    }
    const double floor_g = 1e-6 * sample_moments(ground).std;
    const double floor_e = 1e-6 * sample_moments(excited).std;
    if (!(floor_g > 0) || !(floor_e > 0)) {
        throw Error(ErrorCode::FitDiverged, "a calibration cloud has zero spread");
    }
    const double std_floor = std::min(floor_g, floor_e);

    // comp[0] is the ground-like component, comp[1] the excited-like one.
    GaussianComponent comp[2] = {robust_summary(ground), robust_summary(excited)};
    double leak_g = 0.05;
    double leak_e = 0.05;
    const auto n_g = static_cast<double>(ground.size());
    const auto n_e = static_cast<double>(excited.size());
    const auto n = n_g + n_e;

    struct Acc {
        double w = 0, wx = 0, wxx = 0;
        void add(double r, double d) {
            w += r;
            wx += r * d;
            wxx += r * d * d;
        }
    };

    TiedFit fit;
    double prev_ll = detail::kNegInf;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const double m0 = comp[0].mean, m1 = comp[1].mean;
        const double inv0 = 1 / comp[0].std, inv1 = 1 / comp[1].std;
        const double ls0 = -std::log(comp[0].std), ls1 = -std::log(comp[1].std);
        Acc acc[2];
        double leak_mass_g = 0, leak_mass_e = 0;
        detail::CompensatedSum ll_sum;
        // Each cloud: `own` is the majority component, `other` the leak.
        auto pass = [&](std::span<const double> xs, int own, double leak, double &leak_mass) {
            const double l_own = std::log1p(-leak) + (own == 0 ? ls0 : ls1);
            const double l_other = detail::safe_log(leak) + (own == 0 ? ls1 : ls0);
            const double m_own = own == 0 ? m0 : m1, m_other = own == 0 ? m1 : m0;
            const double i_own = own == 0 ? inv0 : inv1, i_other = own == 0 ? inv1 : inv0;
            for (double x : xs) {
                double z_own = (x - m_own) * i_own;
                double z_other = (x - m_other) * i_other;
                double a = l_own - 0.5 * z_own * z_own;
                double b = l_other - 0.5 * z_other * z_other;
                double r_other;
                if (b == detail::kNegInf) {
                    r_other = 0;
                    ll_sum.add(a);
                } else {
                    double e = std::exp(-std::abs(a - b));
                    double r_big = 1 / (1 + e);
                    r_other = b > a ? r_big : 1 - r_big;
                    ll_sum.add(std::max(a, b) + std::log1p(e));
                }
                leak_mass += r_other;
                acc[own].add(1 - r_other, x - m_own);
                acc[1 - own].add(r_other, x - m_other);
            }
        };
        pass(ground, 0, leak_g, leak_mass_g);
        pass(excited, 1, leak_e, leak_mass_e);
        const double ll = ll_sum.value() - n * kHalfLogTwoPi;
        fit.log_likelihood_trace.push_back(ll);
        fit.iterations = iter + 1;
        fit.p_g = {comp[0], comp[1], leak_g};
        fit.p_e = {comp[1], comp[0], leak_e};
        if (iter > 0 && (ll - prev_ll) / n < options.tolerance) {
            fit.converged = true;
            break;
        }
        prev_ll = ll;

        const double centers[2] = {m0, m1};
        for (int k = 0; k < 2; ++k) {
            if (acc[k].w < 1e-9 * n) {
                throw Error(ErrorCode::FitDiverged, "a tied component lost all of its mass");
            }
            double shift = acc[k].wx / acc[k].w;
            comp[k].mean = centers[k] + shift;
            comp[k].std = std::max(std::sqrt(std::max(acc[k].wxx / acc[k].w - shift * shift, 0.0)), std_floor);
        }
        leak_g = leak_mass_g / n_g;
        leak_e = leak_mass_e / n_e;
    }
    if (comp[0].std <= std_floor || comp[1].std <= std_floor) {
        throw Error(ErrorCode::FitDiverged, "a mixture component collapsed onto a single point");
    }
    if (!(fit.p_g.leak_weight < 0.5) || !(fit.p_e.leak_weight < 0.5)) {
        throw Error(ErrorCode::FitDiverged, "tied fit put most of a cloud into its leak component");
    }
    return fit;
}

QubitResponseModel calibrate_qubit(const CalibrationDataset &dataset, const CalibrationOptions &options) {
    if (dataset.ground_shots.empty() || dataset.excited_shots.empty()) {
        throw Error(
            ErrorCode::InsufficientSamples,
            "qubit '" + dataset.qubit_id + "' is missing " +
                (dataset.ground_shots.empty() ? "ground" : "excited") + " calibration shots");
    }
    QubitResponseModel model;
    model.qubit_id = dataset.qubit_id;
    model.projection = fit_projection(dataset.ground_shots, dataset.excited_shots);
    std::vector<double> xg = project_all(model.projection, dataset.ground_shots);
    std::vector<double> xe = project_all(model.projection, dataset.excited_shots);

    if (options.leak_model == LeakModel::Tied) {
        TiedFit tied = fit_tied_pair(xg, xe, options.fit);
        model.p_g = tied.p_g;
        model.p_e = tied.p_e;
    } else {
        // Each state's leak starts on top of the other state's cloud.
        FitOptions g_opts = options.fit;
        g_opts.leak_hint = robust_summary(xe);
        FitOptions e_opts = options.fit;
        e_opts.leak_hint = robust_summary(xg);
        model.p_g = fit_bimodal(xg, g_opts);
        model.p_e = fit_bimodal(xe, e_opts);
    }

    if (model.p_g.main.mean >= model.p_e.main.mean) {
        model.projection.angle = wrap_angle(model.projection.angle + std::numbers::pi);
        model.projection.offset = -model.projection.offset;
        for (BimodalResponse *r : {&model.p_g, &model.p_e}) {
            r->main.mean = -r->main.mean;
            r->leak.mean = -r->leak.mean;
        }
    }
    if (!(model.p_g.main.mean < model.p_e.main.mean)) {
        throw Error(ErrorCode::DegenerateClouds, "qubit '" + dataset.qubit_id + "' has indistinguishable responses");
    }
    return model;
}

double overlap_integral(const QubitResponseModel &model) {
    double lo = std::min({model.p_g.main.mean, model.p_g.leak.mean, model.p_e.main.mean, model.p_e.leak.mean});
    double hi = std::max({model.p_g.main.mean, model.p_g.leak.mean, model.p_e.main.mean, model.p_e.leak.mean});
    double wide = std::max(model.p_g.max_std(), model.p_e.max_std());
    double narrow = std::min({model.p_g.main.std, model.p_g.leak.std, model.p_e.main.std, model.p_e.leak.std});
    lo -= 12 * wide;
    hi += 12 * wide;
    int intervals = static_cast<int>(std::clamp((hi - lo) / (narrow / 20), 2000.0, 400000.0));
    return detail::integrate_simpson(
        [&](double x) {
            return std::exp(std::min(eval_log_density(model.p_g, x), eval_log_density(model.p_e, x)));
        },
        lo,
        hi,
        intervals);
}

}  // namespace balero

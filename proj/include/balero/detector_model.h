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

#ifndef BALERO_DETECTOR_MODEL_H
#define BALERO_DETECTOR_MODEL_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace balero {

/// One raw readout record in the IQ plane.
struct IQShot {
    double i = 0;
    double q = 0;
};

/// Affine map from the IQ plane onto the discrimination axis:
/// x = cos(angle) * i + sin(angle) * q - offset.
struct ProjectionSpec {
    double angle = 0;
    double offset = 0;
};

struct GaussianComponent {
    double mean = 0;
    double std = 1;

    double log_density(double x) const;
};

/// Two-component Gaussian density modelling the detector response for one
/// prepared qubit state. `main` carries the bulk of the mass; `leak` captures
/// shots that end up near the other state's cloud (thermal population,
/// relaxation during readout).
struct BimodalResponse {
    GaussianComponent main;
    GaussianComponent leak;
    double leak_weight = 0;

    /// Largest component std; sets the natural integration scale.
    double max_std() const;
};

/// Calibrated detector response for one qubit: P_g, P_e and the IQ projection.
struct QubitResponseModel {
    BimodalResponse p_g;
    BimodalResponse p_e;
    ProjectionSpec projection;
    std::string qubit_id;
};

struct CalibrationDataset {
    std::vector<IQShot> ground_shots;
    std::vector<IQShot> excited_shots;
    std::string qubit_id;
};

/// Direction of the line joining the two cloud centroids, offset so that the
/// projected centroids sit symmetrically about zero.
ProjectionSpec fit_projection(std::span<const IQShot> ground_shots, std::span<const IQShot> excited_shots);

double project(const ProjectionSpec &spec, const IQShot &shot);
std::vector<double> project_all(const ProjectionSpec &spec, std::span<const IQShot> shots);

struct FitOptions {
    /// Starting point for the minority component. When unset the EM start is
    /// a k-means++ style two-center split of the samples.
    std::optional<GaussianComponent> leak_hint;
    uint64_t seed = 0x5eed;
    int max_iterations = 500;
    /// Stop once the log-likelihood gain per sample drops below this.
    double tolerance = 1e-10;
};

struct BimodalFit {
    BimodalResponse response;
    /// Total log-likelihood after each E-step, in iteration order.
    std::vector<double> log_likelihood_trace;
    int iterations = 0;
    bool converged = false;
    /// True when the two-component fit did not beat a single Gaussian under
    /// BIC and the result was collapsed to `leak_weight == 0`.
    bool collapsed_to_single = false;
};

/// Maximum-likelihood two-component Gaussian mixture via EM.
/// Requires at least 100 finite samples.
BimodalFit fit_bimodal_detailed(std::span<const double> samples, const FitOptions &options = {});
BimodalResponse fit_bimodal(std::span<const double> samples, const FitOptions &options = {});

/// log of the mixture density, via log-sum-exp. Finite for any finite x.
double eval_log_density(const BimodalResponse &resp, double x);

/// How the two per-state responses share parameters during calibration.
enum class LeakModel {
    /// P_g's leak is P_e's main component and vice versa; both clouds are
    /// fitted jointly (six parameters).
    Tied,
    /// Each cloud gets an independent two-component fit (ten parameters).
    Free,
};

struct CalibrationOptions {
    LeakModel leak_model = LeakModel::Tied;
    FitOptions fit;
};

struct TiedFit {
    BimodalResponse p_g;
    BimodalResponse p_e;
    /// Joint log-likelihood of both clouds after each E-step.
    std::vector<double> log_likelihood_trace;
    int iterations = 0;
    bool converged = false;
};

/// Joint EM over the ground and excited clouds with shared components.
TiedFit fit_tied_pair(std::span<const double> ground, std::span<const double> excited, const FitOptions &options = {});

/// Fits the projection, projects both clouds and fits the two responses.
/// The result is canonically oriented: p_g.main.mean < p_e.main.mean.
QubitResponseModel calibrate_qubit(const CalibrationDataset &dataset, const CalibrationOptions &options = {});

/// Integral of min(P_g, P_e) over the real line: the mass an ideal observer
/// cannot attribute to either state.
double overlap_integral(const QubitResponseModel &model);

}  // namespace balero

#endif

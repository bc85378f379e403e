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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "balero/baselines.h"
#include "balero/bayes_single.h"
#include "balero/benchmark.h"
#include "balero/cli.h"
#include "balero/detector_model.h"
#include "balero/error.h"
#include "balero/estimators.h"
#include "balero/metrics.h"
#include "balero/multiqubit.h"
#include "balero/simulator.h"

namespace py = pybind11;
using namespace balero;

namespace {

std::vector<IQShot> to_iq(const std::vector<std::pair<double, double>> &points) {
    std::vector<IQShot> out;
    out.reserve(points.size());
    for (const auto &[i, q] : points) {
        out.push_back({i, q});
    }
    return out;
}

LeakModel leak_model_from(const std::string &name) {
    if (name == "tied") {
        return LeakModel::Tied;
    }
    if (name == "free") {
        return LeakModel::Free;
    }
    throw Error(ErrorCode::InvalidArgument, "leak model must be 'tied' or 'free', got '" + name + "'");
}

py::dict population_dict(const PopulationEstimate &e) {
    py::dict d;
    d["populations"] = e.populations;
    d["std_devs"] = e.std_devs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian population estimation for noisy qubit readout";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "BaleroError", PyExc_ValueError)); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            py::object type = error_type.get_stored();
            py::object exc = type(e.what());
            exc.attr("code") = std::string(error_code_name(e.code()));
            py::set_error(type, exc);
        }
    });

    py::class_<GaussianComponent>(m, "GaussianComponent")
        .def(py::init<>())
        .def(py::init([](double mean, double std) { return GaussianComponent{mean, std}; }), py::arg("mean"), py::arg("std"))
        .def_readwrite("mean", &GaussianComponent::mean)
        .def_readwrite("std", &GaussianComponent::std)
        .def("__repr__", [](const GaussianComponent &g) {
            std::ostringstream ss;
            ss << "GaussianComponent(mean=" << g.mean << ", std=" << g.std << ")";
            return ss.str();
        });

    py::class_<BimodalResponse>(m, "BimodalResponse")
        .def(py::init<>())
        .def(
            py::init([](GaussianComponent main, GaussianComponent leak, double w) { return BimodalResponse{main, leak, w}; }),
            py::arg("main"),
            py::arg("leak"),
            py::arg("leak_weight"))
        .def_readwrite("main", &BimodalResponse::main)
        .def_readwrite("leak", &BimodalResponse::leak)
        .def_readwrite("leak_weight", &BimodalResponse::leak_weight)
        .def("log_density", [](const BimodalResponse &r, double x) { return eval_log_density(r, x); }, py::arg("x"));

    py::class_<ProjectionSpec>(m, "ProjectionSpec")
        .def(py::init<>())
        .def(py::init([](double angle, double offset) { return ProjectionSpec{angle, offset}; }), py::arg("angle"), py::arg("offset"))
        .def_readwrite("angle", &ProjectionSpec::angle)
        .def_readwrite("offset", &ProjectionSpec::offset)
        .def("project", [](const ProjectionSpec &p, double i, double q) { return project(p, IQShot{i, q}); }, py::arg("i"), py::arg("q"));

    py::class_<QubitResponseModel>(m, "QubitResponseModel")
        .def(py::init<>())
        .def_readwrite("p_g", &QubitResponseModel::p_g)
        .def_readwrite("p_e", &QubitResponseModel::p_e)
        .def_readwrite("projection", &QubitResponseModel::projection)
        .def_readwrite("qubit_id", &QubitResponseModel::qubit_id);

    py::class_<PosteriorGrid1D>(m, "PosteriorGrid1D")
        .def_readonly("n_points", &PosteriorGrid1D::n_points)
        .def_readonly("log_weights", &PosteriorGrid1D::log_weights)
        .def("trapezoid_mass", &PosteriorGrid1D::trapezoid_mass);

    m.def(
        "fit_bimodal",
        [](const std::vector<double> &samples, uint64_t seed) {
            FitOptions o;
            o.seed = seed;
            return fit_bimodal(samples, o);
        },
        py::arg("samples"),
        py::arg("seed") = FitOptions{}.seed);

    m.def(
        "calibrate_qubit",
        [](const std::vector<std::pair<double, double>> &ground,
           const std::vector<std::pair<double, double>> &excited,
           const std::string &qubit_id,
           const std::string &leak_model) {
            CalibrationOptions o;
            o.leak_model = leak_model_from(leak_model);
            return calibrate_qubit(CalibrationDataset{to_iq(ground), to_iq(excited), qubit_id}, o);
        },
        py::arg("ground"),
        py::arg("excited"),
        py::arg("qubit_id") = "",
        py::arg("leak_model") = "tied",
        "Fits a response model from (i, q) shots of the prepared ground and excited states.");

    m.def("overlap_integral", &overlap_integral, py::arg("model"));
    m.def("separatrix", [](const QubitResponseModel &model) { return fit_separatrix(model).threshold; }, py::arg("model"));
    m.def(
        "misassignment_rate",
        [](const QubitResponseModel &model) { return misassignment_rate(model, fit_separatrix(model)); },
        py::arg("model"));

    m.def("uniform_prior", &uniform_prior, py::arg("n_points") = kDefaultSingleGridPoints);
    m.def(
        "update_posterior",
        [](const PosteriorGrid1D &grid, const QubitResponseModel &model, const std::vector<double> &shots) {
            return update_posterior(grid, model, shots);
        },
        py::arg("grid"),
        py::arg("model"),
        py::arg("shots"));
    m.def(
        "posterior_estimate",
        [](const PosteriorGrid1D &grid) { return population_dict(estimate(grid)); },
        py::arg("grid"));

    m.def(
        "estimate_populations",
        [](const std::vector<QubitResponseModel> &models,
           const std::vector<std::vector<double>> &shots,
           const std::string &estimator,
           int grid_points,
           int pair_grid_points,
           int simplex_divisions,
           double epsilon,
           int max_sweeps) {
            InferenceOptions o{grid_points, pair_grid_points, simplex_divisions, epsilon, max_sweeps};
            o.validate();
            std::vector<Separatrix> seps = fit_separatrices(models);
            py::dict d;
            switch (parse_estimator(estimator)) {
                case Estimator::Balero: {
                    BaleroOutput b = run_balero(models, seps, shots, o);
                    d = population_dict(b.estimate);
                    d["path"] = std::string(inference_path_name(b.path));
                    if (b.pairwise) {
                        d["sweeps"] = b.pairwise->sweeps;
                        d["stop_reason"] = std::string(stop_reason_name(b.pairwise->stop_reason));
                    }
                    break;
                }
                case Estimator::Counts:
                    d["populations"] = run_counts(seps, shots);
                    break;
                case Estimator::Inversion: {
                    InversionResult inv = run_inversion(models, seps, shots);
                    d["populations"] = inv.quasi_populations;
                    d["condition_number"] = inv.condition_number;
                    break;
                }
            }
            return d;
        },
        py::arg("models"),
        py::arg("shots"),
        py::arg("estimator") = "balero",
        py::arg("grid_points") = kDefaultSingleGridPoints,
        py::arg("pair_grid_points") = kDefaultPairGridPoints,
        py::arg("simplex_divisions") = kDefaultSimplexDivisions,
        py::arg("epsilon") = 1e-4,
        py::arg("max_sweeps") = 50,
        "Population vector over 2^n basis states; shots[s][q] is the projected value of qubit q.");

    m.def("make_detector", &make_detector, py::arg("qubit_id"), py::arg("separation"), py::arg("std"),
          py::arg("ground_leak"), py::arg("excited_leak"), py::arg("projection") = ProjectionSpec{});
    m.def("quito_like_preset", &quito_like_preset);
    m.def("bitstring_preset", &bitstring_preset);
    m.def("ry_populations", [](double theta) { return ry_populations(theta).populations; }, py::arg("theta"));
    m.def("bell_populations", [] { return bell_populations().populations; });
    m.def("bitstring_populations", [](const std::string &bits) { return bitstring_populations(bits).populations; }, py::arg("bits"));
    m.def(
        "sample_shots",
        [](const std::vector<double> &populations, const std::vector<QubitResponseModel> &models, size_t n_shots, uint64_t seed) {
            TrueState state{populations};
            validate(state);
            return sample_shots(state, models, n_shots, seed).x;
        },
        py::arg("populations"),
        py::arg("models"),
        py::arg("n_shots"),
        py::arg("seed"));

    m.def(
        "total_population_error",
        [](const std::vector<double> &exact, const std::vector<double> &estimated) {
            return total_population_error(exact, estimated);
        },
        py::arg("exact"),
        py::arg("estimated"));
    m.def(
        "avg_ground_population_error",
        [](const std::vector<double> &theta, const std::vector<double> &estimates) {
            return avg_ground_population_error(theta, estimates);
        },
        py::arg("theta_grid"),
        py::arg("estimates"));
    m.def("readout_error", &readout_error, py::arg("ground_estimate"), py::arg("excited_estimate"));

    m.def("scenario_names", &scenario_names);
    m.def(
        "run_benchmark",
        [](const std::string &scenario,
           const std::vector<int64_t> &n_shots,
           int n_seeds,
           uint64_t seed,
           int64_t calibration_shots,
           int theta_points,
           const std::string &bitstring,
           std::optional<double> depolarizing,
           const std::string &estimator) {
            BenchmarkConfig c;
            c.scenario = scenario;
            c.n_shots = n_shots;
            c.n_seeds = n_seeds;
            c.seed = seed;
            c.calibration_shots = calibration_shots;
            c.theta_points = theta_points;
            c.bitstring = bitstring;
            c.depolarizing = depolarizing;
            c.estimators = parse_estimator_list(estimator);
            c.validate();
            BenchmarkResult r;
            {
                py::gil_scoped_release release;
                r = run_benchmark(c);
            }
            py::list metrics;
            for (const MetricReport &mr : r.metrics) {
                py::dict row;
                row["metric"] = mr.name;
                row["estimator"] = mr.estimator;
                row["n_shots"] = mr.n_shots;
                row["seed"] = mr.seed;
                row["value"] = mr.value;
                metrics.append(row);
            }
            py::dict facts;
            for (const auto &[k, v] : r.facts) {
                facts[py::str(k)] = v;
            }
            py::dict out;
            out["metrics"] = metrics;
            out["facts"] = facts;
            out["max_sweeps_hits"] = r.max_sweeps_hits;
            return out;
        },
        py::arg("scenario"),
        py::arg("n_shots") = BenchmarkConfig{}.n_shots,
        py::arg("n_seeds") = BenchmarkConfig{}.n_seeds,
        py::arg("seed") = BenchmarkConfig{}.seed,
        py::arg("calibration_shots") = BenchmarkConfig{}.calibration_shots,
        py::arg("theta_points") = BenchmarkConfig{}.theta_points,
        py::arg("bitstring") = BenchmarkConfig{}.bitstring,
        py::arg("depolarizing") = std::nullopt,
        py::arg("estimator") = "all");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::vector<const char *> argv = {"balero"};
            for (const auto &a : args) {
                argv.push_back(a.c_str());
            }
            std::ostringstream out, err;
            int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"),
        "Runs the command-line interface in-process; returns (exit_code, stdout, stderr).");
}

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

#include "balero/cli.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "balero/benchmark.h"
#include "balero/error.h"
#include "balero/estimators.h"
#include "balero/io.h"

namespace balero {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Settings {
    std::string calibration;
    std::string shots;
    std::string estimator = "all";
    std::string scenario;
    std::string out = ".";
    std::string leak_model = "tied";
    InferenceOptions inference;
    uint64_t seed = 1;
    std::vector<int64_t> n_shots = {100, 1000, 10000};
    int n_seeds = 20;
    int theta_points = 41;
    std::string bitstring = "0110";
    std::optional<double> depolarizing;
    int64_t calibration_shots = 100000;
    std::string preset = "quito";
    std::string state = "0";
    int64_t sim_shots = 10000;
};

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

std::ofstream open_output(const fs::path &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
    return f;
}

fs::path prepare_out_dir(const Settings &s) {
    fs::path dir(s.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

void write_json(const fs::path &path, const json &doc) {
    std::ofstream f = open_output(path);
    f << doc.dump(2) << "\n";
}

json inference_json(const InferenceOptions &o) {
    return {
        {"grid_points", o.grid_points},
        {"pair_grid_points", o.pair_grid_points},
        {"simplex_divisions", o.simplex_divisions},
        {"epsilon", o.epsilon},
        {"max_sweeps", o.max_sweeps}};
}

LeakModel parse_leak_model(const std::string &name) {
    if (name == "tied") {
        return LeakModel::Tied;
    }
    if (name == "free") {
        return LeakModel::Free;
    }
    throw Error(ErrorCode::InvalidArgument, "leak model must be 'tied' or 'free', got '" + name + "'");
}

void require_path(const std::string &path, const char *flag) {
    if (path.empty()) {
        throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
    }
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(const Settings &s, std::ostream &out) {
    require_path(s.shots, "--shots");
    LeakModel leak = parse_leak_model(s.leak_model);
    json config = {{"command", "calibrate"}, {"shots", s.shots}, {"leak_model", s.leak_model}, {"seed", s.seed}};
    const std::string hash = config_hash(config);

    auto datasets = group_calibration(read_shot_csv(s.shots));
    CalibrationOptions opts;
    opts.leak_model = leak;
    opts.fit.seed = s.seed;
    const std::string stamp = utc_timestamp();

    CalibrationStore store;
    for (const auto &[id, data] : datasets) {
        QubitResponseModel model;
        try {
            model = calibrate_qubit(data, opts);
        } catch (const Error &e) {
            throw Error(e.code(), "qubit '" + id + "': " + e.message());
        }
        CalibrationMeta meta;
        meta.n_shots = static_cast<int64_t>(data.ground_shots.size() + data.excited_shots.size());
        meta.timestamp = stamp;
        meta.config_hash = hash;

        Separatrix sep = fit_separatrix(model);
        out << id << ": angle " << format_double(model.projection.angle) << ", offset " << format_double(model.projection.offset)
            << "\n";
        for (const auto &[label, r] : {std::pair{"P_g", &model.p_g}, std::pair{"P_e", &model.p_e}}) {
            out << "  " << label << ": main N(" << r->main.mean << ", " << r->main.std << "), leak N(" << r->leak.mean << ", "
                << r->leak.std << ") weight " << r->leak_weight << "\n";
        }
        out << "  overlap " << overlap_integral(model) << ", separatrix " << sep.threshold << ", misassignment "
            << misassignment_rate(model, sep) << "\n";
        store[id] = CalibrationEntry{model, meta};
    }
    fs::path path = prepare_out_dir(s) / "calibration.json";
    write_calibration(path, store);
    out << "wrote " << path.string() << " (" << store.size() << " qubits, config " << hash << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate

json population_json(const std::vector<double> &pop, const std::vector<double> *std_devs, int n_q) {
    json doc = json::object();
    for (size_t k = 0; k < pop.size(); ++k) {
        json entry = {{"population", pop[k]}};
        if (std_devs != nullptr) {
            entry["std_dev"] = (*std_devs)[k];
        }
        doc[to_bitstring(BasisIndex{static_cast<uint32_t>(k)}, n_q)] = entry;
    }
    return doc;
}

void print_populations(std::ostream &out, std::string_view label, const std::vector<double> &pop, int n_q) {
    out << label << ":";
    for (size_t k = 0; k < pop.size(); ++k) {
        out << " " << to_bitstring(BasisIndex{static_cast<uint32_t>(k)}, n_q) << "=" << pop[k];
    }
    out << "\n";
}

int cmd_estimate(const Settings &s, std::ostream &out) {
    require_path(s.calibration, "--calibration");
    require_path(s.shots, "--shots");
    std::vector<Estimator> estimators = parse_estimator_list(s.estimator);
    s.inference.validate();
    json config = {
        {"command", "estimate"},
        {"calibration", s.calibration},
        {"shots", s.shots},
        {"estimator", s.estimator},
        {"inference", inference_json(s.inference)}};
    const std::string hash = config_hash(config);

    CalibrationStore store = read_calibration(s.calibration);
    ShotRecords records = group_shots(read_shot_csv(s.shots), &store);
    if (records.shots.empty()) {
        throw Error(ErrorCode::EmptyCounts, "shot file contains no shots");
    }
    std::vector<QubitResponseModel> models;
    for (const auto &id : records.qubit_ids) {
        models.push_back(store.at(id).model);
    }
    const int n_q = static_cast<int>(models.size());
    std::vector<Separatrix> seps = fit_separatrices(models);
    const fs::path dir = prepare_out_dir(s);

    json results = json::object();
    int exit_code = kExitOk;
    out << records.shots.size() << " shots on " << n_q << " qubit(s)\n";
    for (Estimator e : estimators) {
        json r;
        if (e == Estimator::Balero) {
            BaleroOutput b = run_balero(models, seps, records.shots, s.inference);
            r["path"] = inference_path_name(b.path);
            r["populations"] = population_json(b.estimate.populations, &b.estimate.std_devs, n_q);
            if (b.pairwise) {
                r["convergence"] = {
                    {"sweeps", b.pairwise->sweeps},
                    {"stop_reason", stop_reason_name(b.pairwise->stop_reason)},
                    {"epsilon", b.pairwise->state.epsilon},
                    {"max_sweeps", b.pairwise->state.max_sweeps},
                    {"last_change", b.pairwise->last_change}};
                out << "pairwise: " << b.pairwise->sweeps << " sweep(s), " << stop_reason_name(b.pairwise->stop_reason) << "\n";
                if (b.pairwise->stop_reason == StopReason::MaxSweeps) {
                    exit_code = kExitNoConvergence;
                }
            }
            if (b.posterior) {
                std::ofstream f = open_output(dir / "posterior.csv");
                f << "# config_hash=" << hash << "\n";
                write_posterior_csv(f, *b.posterior);
            }
            print_populations(out, "balero", b.estimate.populations, n_q);
        } else if (e == Estimator::Counts) {
            Counts counts = assign_counts(seps, records.shots);
            std::vector<double> frac = count_fractions(counts, n_q);
            std::vector<double> err(frac.size());
            for (size_t k = 0; k < frac.size(); ++k) {
                err[k] = std::sqrt(frac[k] * (1 - frac[k]) / static_cast<double>(records.shots.size()));
            }
            r["counts"] = counts_to_json(counts);
            r["populations"] = population_json(frac, &err, n_q);
            print_populations(out, "counts", frac, n_q);
        } else {
            InversionResult inv = run_inversion(models, seps, records.shots);
            r["populations"] = population_json(inv.quasi_populations, nullptr, n_q);
            r["condition_number"] = inv.condition_number;
            print_populations(out, "inversion", inv.quasi_populations, n_q);
        }
        results[std::string(estimator_name(e))] = r;
    }

    json doc = {
        {"config_hash", hash},
        {"config", config},
        {"qubits", records.qubit_ids},
        {"n_shots", records.shots.size()},
        {"results", results}};
    write_json(dir / "results.json", doc);
    out << "wrote " << (dir / "results.json").string() << "\n";
    return exit_code;
}

// ---------------------------------------------------------------------------
// benchmark

BenchmarkConfig benchmark_config(const Settings &s) {
    BenchmarkConfig c;
    c.scenario = s.scenario;
    c.n_shots = s.n_shots;
    c.n_seeds = s.n_seeds;
    c.seed = s.seed;
    c.inference = s.inference;
    c.theta_points = s.theta_points;
    c.bitstring = s.bitstring;
    c.depolarizing = s.depolarizing;
    c.calibration_shots = s.calibration_shots;
    c.estimators = parse_estimator_list(s.estimator);
    return c;
}

json benchmark_json(const BenchmarkConfig &c, const std::string &estimator) {
    return {
        {"command", "benchmark"},
        {"scenario", c.scenario},
        {"n_shots", c.n_shots},
        {"n_seeds", c.n_seeds},
        {"seed", c.seed},
        {"inference", inference_json(c.inference)},
        {"theta_points", c.theta_points},
        {"bitstring", c.bitstring},
        {"depolarizing", c.depolarizing ? json(*c.depolarizing) : json(nullptr)},
        {"calibration_shots", c.calibration_shots},
        {"estimator", estimator}};
}

int cmd_benchmark(const Settings &s, std::ostream &out) {
    if (s.scenario.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--scenario is required");
    }
    BenchmarkConfig c = benchmark_config(s);
    c.validate();
    json config = benchmark_json(c, s.estimator);
    const std::string hash = config_hash(config);
    const std::string comment = "config_hash=" + hash + " scenario=" + c.scenario;

    BenchmarkResult result = run_benchmark(c);
    const fs::path dir = prepare_out_dir(s);
    {
        std::ofstream f = open_output(dir / "metrics.csv");
        write_metrics_csv(f, result.metrics, comment);
    }
    for (const PlotTable &plot : result.plots) {
        std::ofstream f = open_output(dir / (plot.name + ".csv"));
        f << "# " << comment << "\n";
        for (size_t k = 0; k < plot.columns.size(); ++k) {
            f << (k ? "," : "") << plot.columns[k];
        }
        f << "\n";
        for (const auto &row : plot.rows) {
            for (size_t k = 0; k < row.size(); ++k) {
                f << (k ? "," : "") << format_double(row[k]);
            }
            f << "\n";
        }
    }

    // Mean over seeds per (metric, estimator, n_shots), in first-seen order.
    std::vector<std::tuple<std::string, std::string, int64_t>> keys;
    std::map<std::tuple<std::string, std::string, int64_t>, std::pair<double, int>> sums;
    for (const MetricReport &m : result.metrics) {
        auto key = std::make_tuple(m.name, m.estimator, m.n_shots);
        auto [it, fresh] = sums.try_emplace(key, 0.0, 0);
        if (fresh) {
            keys.push_back(key);
        }
        it->second.first += m.value;
        it->second.second += 1;
    }
    json summary = json::array();
    for (const auto &key : keys) {
        const auto &[name, est, n] = key;
        double mean = sums[key].first / sums[key].second;
        summary.push_back({{"metric", name}, {"estimator", est}, {"n_shots", n}, {"mean", mean}, {"seeds", sums[key].second}});
        out << std::left << std::setw(28) << name << std::setw(11) << est << std::setw(8) << n << mean << "\n";
    }
    json facts = json::object();
    for (const auto &[k, v] : result.facts) {
        facts[k] = v;
        out << k << " = " << v << "\n";
    }
    write_json(
        dir / "benchmark.json",
        {{"config_hash", hash},
         {"config", config},
         {"facts", facts},
         {"summary", summary},
         {"max_sweeps_hits", result.max_sweeps_hits}});
    out << "wrote " << (dir / "metrics.csv").string() << " and " << result.plots.size() << " plot table(s)\n";
    return result.max_sweeps_hits > 0 ? kExitNoConvergence : kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

TrueState parse_state(const std::string &spec) {
    if (spec == "bell") {
        return bell_populations();
    }
    if (spec.starts_with("ry:")) {
        std::string angle = spec.substr(3);
        size_t used = 0;
        double theta = 0;
        try {
            theta = std::stod(angle, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != angle.size()) {
            throw Error(ErrorCode::InvalidArgument, "cannot parse rotation angle in '" + spec + "'");
        }
        return ry_populations(theta);
    }
    return bitstring_populations(spec);
}

std::vector<QubitResponseModel> parse_preset(const std::string &name) {
    if (name == "quito") {
        return quito_like_preset();
    }
    if (name == "bitstring") {
        return bitstring_preset();
    }
    throw Error(ErrorCode::InvalidArgument, "preset must be 'quito' or 'bitstring', got '" + name + "'");
}

int cmd_simulate(const Settings &s, std::ostream &out) {
    if (s.sim_shots < 1) {
        throw Error(ErrorCode::InvalidArgument, "--n-shots must be positive");
    }
    if (s.calibration_shots < 0) {
        throw Error(ErrorCode::InvalidArgument, "--calibration-shots must be non-negative");
    }
    TrueState state = parse_state(s.state);
    if (s.depolarizing) {
        state = apply_depolarizing(state, NoiseConfig{*s.depolarizing, s.seed});
    }
    std::vector<QubitResponseModel> preset = parse_preset(s.preset);
    const int n_q = state.n_qubits();
    if (static_cast<size_t>(n_q) > preset.size()) {
        throw Error(
            ErrorCode::DimensionMismatch,
            "state needs " + std::to_string(n_q) + " qubits but preset '" + s.preset + "' has " + std::to_string(preset.size()));
    }
    std::vector<QubitResponseModel> models(preset.begin(), preset.begin() + n_q);
    json config = {
        {"command", "simulate"},
        {"preset", s.preset},
        {"state", s.state},
        {"depolarizing", s.depolarizing ? json(*s.depolarizing) : json(nullptr)},
        {"n_shots", s.sim_shots},
        {"calibration_shots", s.calibration_shots},
        {"seed", s.seed}};
    const std::string hash = config_hash(config);
    const std::string comment = "config_hash=" + hash;
    const fs::path dir = prepare_out_dir(s);

    SampleOptions lift;
    lift.lift_to_iq = true;
    ShotBatch batch = sample_shots(state, models, static_cast<size_t>(s.sim_shots), derive_seed(s.seed, 0), lift);
    ShotFile shots;
    shots.mode = ShotMode::Raw;
    for (size_t k = 0; k < batch.iq.size(); ++k) {
        for (int q = 0; q < n_q; ++q) {
            ShotRow row;
            row.shot_index = static_cast<int64_t>(k);
            row.qubit_id = models[static_cast<size_t>(q)].qubit_id;
            row.iq = batch.iq[k][static_cast<size_t>(q)];
            shots.rows.push_back(row);
        }
    }
    {
        std::ofstream f = open_output(dir / "shots.csv");
        write_shot_csv(f, shots, comment);
    }

    if (s.calibration_shots > 0) {
        ShotFile cal;
        cal.mode = ShotMode::Raw;
        cal.has_prepared = true;
        for (int q = 0; q < n_q; ++q) {
            const QubitResponseModel &m = models[static_cast<size_t>(q)];
            CalibrationDataset data =
                sample_calibration(m, static_cast<size_t>(s.calibration_shots), derive_seed(s.seed, 1000 + static_cast<uint64_t>(q)));
            int64_t index = 0;
            for (int prepared : {0, 1}) {
                for (const IQShot &iq : prepared == 0 ? data.ground_shots : data.excited_shots) {
                    ShotRow row;
                    row.shot_index = index++;
                    row.qubit_id = m.qubit_id;
                    row.prepared = prepared;
                    row.iq = iq;
                    cal.rows.push_back(row);
                }
            }
        }
        std::ofstream f = open_output(dir / "calibration_shots.csv");
        write_shot_csv(f, cal, comment);
    }

    CalibrationStore generating;
    for (const QubitResponseModel &m : models) {
        CalibrationMeta meta;
        meta.config_hash = hash;
        generating[m.qubit_id] = CalibrationEntry{m, meta};
    }
    json qubits = json::array();
    for (const QubitResponseModel &m : models) {
        qubits.push_back(m.qubit_id);
    }
    write_json(
        dir / "truth.json",
        {{"config_hash", hash},
         {"config", config},
         {"qubits", qubits},
         {"populations", population_json(state.populations, nullptr, n_q)},
         {"models", calibration_to_json(generating)}});
    out << "wrote " << s.sim_shots << " shots on " << n_q << " qubit(s) to " << dir.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_inference_options(CLI::App *cmd, Settings &s) {
    cmd->add_option("--grid-points", s.inference.grid_points, "Single-qubit posterior grid resolution")->capture_default_str();
    cmd->add_option("--pair-grid-points", s.inference.pair_grid_points, "Pairwise posterior grid resolution")
        ->capture_default_str();
    cmd->add_option("--simplex-divisions", s.inference.simplex_divisions, "Lattice divisions for the exact 2-qubit posterior")
        ->capture_default_str();
    cmd->add_option("--epsilon", s.inference.epsilon, "Pairwise convergence threshold")->capture_default_str();
    cmd->add_option("--max-sweeps", s.inference.max_sweeps, "Pairwise sweep budget")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    Settings s;
    CLI::App app{"Bayesian population estimation for noisy qubit readout", "balero"};
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.require_subcommand(1);

    CLI::App *calibrate = app.add_subcommand("calibrate", "Fit detector response models from calibration shots");
    calibrate->add_option("--shots", s.shots, "Calibration CSV: shot_index,qubit_id,prepared,i,q");
    calibrate->add_option("--out", s.out, "Output directory")->capture_default_str();
    calibrate->add_option("--seed", s.seed, "Seed for the free-leak initializer")->capture_default_str();
    calibrate->add_option("--leak-model", s.leak_model, "tied or free")->capture_default_str();

    CLI::App *estimate_cmd = app.add_subcommand("estimate", "Estimate populations from measured shots");
    estimate_cmd->add_option("--calibration", s.calibration, "Calibration JSON");
    estimate_cmd->add_option("--shots", s.shots, "Shot CSV (raw i,q or projected x)");
    estimate_cmd->add_option("--estimator", s.estimator, "balero, counts, inversion or all")->capture_default_str();
    estimate_cmd->add_option("--out", s.out, "Output directory")->capture_default_str();
    add_inference_options(estimate_cmd, s);

    CLI::App *benchmark = app.add_subcommand("benchmark", "Run a synthetic benchmark scenario");
    benchmark->add_option("--scenario", s.scenario, "readout-fidelity, ry-sweep, bell, bitstring-prep or bv-output");
    benchmark->add_option("--n-shots", s.n_shots, "Comma-separated shot counts")->delimiter(',')->capture_default_str();
    benchmark->add_option("--n-seeds", s.n_seeds, "Seeds per shot count")->capture_default_str();
    benchmark->add_option("--seed", s.seed, "Base seed")->capture_default_str();
    benchmark->add_option("--estimator", s.estimator, "balero, counts, inversion or all")->capture_default_str();
    benchmark->add_option("--theta-points", s.theta_points, "ry-sweep angles")->capture_default_str();
    benchmark->add_option("--bitstring", s.bitstring, "Target of bitstring-prep and bv-output")->capture_default_str();
    benchmark->add_option("--depolarizing", s.depolarizing, "bv-output depolarizing strength (solved when omitted)");
    benchmark->add_option("--calibration-shots", s.calibration_shots, "Calibration shots per state; 0 uses the true models")
        ->capture_default_str();
    benchmark->add_option("--out", s.out, "Output directory")->capture_default_str();
    add_inference_options(benchmark, s);

    CLI::App *simulate = app.add_subcommand("simulate", "Write synthetic calibration and measurement shots");
    simulate->add_option("--preset", s.preset, "quito or bitstring")->capture_default_str();
    simulate->add_option("--state", s.state, "Bitstring, 'bell' or 'ry:THETA'")->capture_default_str();
    simulate->add_option("--depolarizing", s.depolarizing, "Depolarizing strength applied to the state");
    simulate->add_option("--n-shots", s.sim_shots, "Measurement shots")->capture_default_str();
    simulate->add_option("--calibration-shots", s.calibration_shots, "Calibration shots per prepared state")
        ->capture_default_str();
    simulate->add_option("--seed", s.seed, "Seed")->capture_default_str();
    simulate->add_option("--out", s.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (calibrate->parsed()) {
            return cmd_calibrate(s, out);
        }
        if (estimate_cmd->parsed()) {
            return cmd_estimate(s, out);
        }
        if (benchmark->parsed()) {
            return cmd_benchmark(s, out);
        }
        return cmd_simulate(s, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? kExitNumericalError : kExitInputError;
    } catch (const nlohmann::json::exception &e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace balero

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

#ifndef BALERO_IO_H
#define BALERO_IO_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "balero/baselines.h"
#include "balero/bayes_single.h"
#include "balero/detector_model.h"
#include "balero/metrics.h"
#include "json.hpp"

namespace balero {

constexpr int kCalibrationSchemaVersion = 1;

struct CalibrationMeta {
    int64_t n_shots = 0;
    std::string timestamp;
    int schema_version = kCalibrationSchemaVersion;
    std::string config_hash;
};

struct CalibrationEntry {
    QubitResponseModel model;
    CalibrationMeta meta;
};

/// qubit_id -> calibrated response.
using CalibrationStore = std::map<std::string, CalibrationEntry>;

nlohmann::json calibration_to_json(const CalibrationStore &store);
CalibrationStore calibration_from_json(const nlohmann::json &doc);
void write_calibration(const std::filesystem::path &path, const CalibrationStore &store);
CalibrationStore read_calibration(const std::filesystem::path &path);

/// Shot CSV: one row per qubit per shot. Raw mode carries `i, q`, projected
/// mode carries `x`. Calibration files add a `prepared` column (0 or 1).
/// Lines starting with '#' are comments.
enum class ShotMode { Raw, Projected };

struct ShotRow {
    int64_t shot_index = 0;
    std::string qubit_id;
    std::optional<int> prepared;
    IQShot iq;
    double x = 0;
    /// 1-based line in the source file.
    int64_t line = 0;
};

struct ShotFile {
    ShotMode mode = ShotMode::Projected;
    bool has_prepared = false;
    std::vector<ShotRow> rows;
};

ShotFile parse_shot_csv(std::istream &in);
ShotFile read_shot_csv(const std::filesystem::path &path);
void write_shot_csv(std::ostream &out, const ShotFile &file, const std::string &comment = "");

/// Shots grouped by shot_index. Qubits are ordered by first appearance, which
/// also fixes the bitstring order (first qubit = most significant bit).
struct ShotRecords {
    std::vector<std::string> qubit_ids;
    std::vector<ShotVector> shots;
};

/// Raw rows are projected with the matching calibration entry; projected rows
/// are used as-is. Throws QubitMismatch when a qubit has no calibration.
ShotRecords group_shots(const ShotFile &file, const CalibrationStore *calibration);

/// Splits a calibration CSV (raw mode with `prepared`) into per-qubit datasets.
std::map<std::string, CalibrationDataset> group_calibration(const ShotFile &file);

void write_posterior_csv(std::ostream &out, const PosteriorGrid1D &grid);
nlohmann::json counts_to_json(const Counts &counts);
void write_metrics_csv(std::ostream &out, const std::vector<MetricReport> &rows, const std::string &comment = "");

/// FNV-1a 64-bit hash of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json &config);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace balero

#endif

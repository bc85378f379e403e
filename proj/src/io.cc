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

#include "balero/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "balero/error.h"

namespace balero {

namespace {

using nlohmann::json;

json component_json(const GaussianComponent &c) {
    return json{{"mean", c.mean}, {"std", c.std}};
}

json response_json(const BimodalResponse &r) {
    return json{{"main", component_json(r.main)}, {"leak", component_json(r.leak)}, {"leak_weight", r.leak_weight}};
}

double require_number(const json &node, const char *key, const std::string &where) {
    if (!node.is_object() || !node.contains(key) || !node.at(key).is_number()) {
        throw Error(ErrorCode::ParseError, where + ": missing numeric field '" + key + "'");
    }
    return node.at(key).get<double>();
}

const json &require_object(const json &node, const char *key, const std::string &where) {
    if (!node.is_object() || !node.contains(key) || !node.at(key).is_object()) {
        throw Error(ErrorCode::ParseError, where + ": missing object '" + key + "'");
    }
    return node.at(key);
}

GaussianComponent component_from(const json &node, const std::string &where) {
    GaussianComponent c{require_number(node, "mean", where), require_number(node, "std", where)};
    if (!(c.std > 0) || !std::isfinite(c.mean)) {
        throw Error(ErrorCode::ParseError, where + ": component std must be positive and mean finite");
    }
    return c;
}

BimodalResponse response_from(const json &node, const std::string &where) {
    BimodalResponse r;
    r.main = component_from(require_object(node, "main", where), where + ".main");
    r.leak = component_from(require_object(node, "leak", where), where + ".leak");
    r.leak_weight = require_number(node, "leak_weight", where);
    if (!(r.leak_weight >= 0 && r.leak_weight < 1)) {
        throw Error(ErrorCode::ParseError, where + ": leak_weight must lie in [0, 1)");
    }
    return r;
}

std::string trim(std::string_view s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string line_prefix(int64_t line) {
    return "line " + std::to_string(line);
}

double parse_double(const std::string &cell, int64_t line, const char *column) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, line_prefix(line) + ": column '" + column + "' is not a finite number: '" + cell + "'");
    }
    return v;
}

int64_t parse_int(const std::string &cell, int64_t line, const char *column) {
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::ParseError, line_prefix(line) + ": column '" + column + "' is not an integer: '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

json calibration_to_json(const CalibrationStore &store) {
    json doc = json::object();
    for (const auto &[id, entry] : store) {
        const auto &m = entry.model;
        doc[id] = json{
            {"projection", {{"angle", m.projection.angle}, {"offset", m.projection.offset}}},
            {"p_g", response_json(m.p_g)},
            {"p_e", response_json(m.p_e)},
            {"meta",
             {{"n_shots", entry.meta.n_shots},
              {"timestamp", entry.meta.timestamp},
              {"schema_version", entry.meta.schema_version},
              {"config_hash", entry.meta.config_hash}}},
        };
    }
    return doc;
}

CalibrationStore calibration_from_json(const json &doc) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::ParseError, "calibration document must be a JSON object keyed by qubit id");
    }
    CalibrationStore store;
    for (const auto &[id, node] : doc.items()) {
        const std::string where = "calibration['" + id + "']";
        CalibrationEntry entry;
        entry.model.qubit_id = id;
        const json &proj = require_object(node, "projection", where);
        entry.model.projection.angle = require_number(proj, "angle", where + ".projection");
        entry.model.projection.offset = require_number(proj, "offset", where + ".projection");
        entry.model.p_g = response_from(require_object(node, "p_g", where), where + ".p_g");
        entry.model.p_e = response_from(require_object(node, "p_e", where), where + ".p_e");
        const json &meta = require_object(node, "meta", where);
        entry.meta.schema_version = static_cast<int>(require_number(meta, "schema_version", where + ".meta"));
        if (entry.meta.schema_version != kCalibrationSchemaVersion) {
            throw Error(
                ErrorCode::ParseError,
                where + ": unsupported schema_version " + std::to_string(entry.meta.schema_version));
        }
        entry.meta.n_shots = static_cast<int64_t>(require_number(meta, "n_shots", where + ".meta"));
        if (meta.contains("timestamp") && meta.at("timestamp").is_string()) {
            entry.meta.timestamp = meta.at("timestamp").get<std::string>();
        }
        if (meta.contains("config_hash") && meta.at("config_hash").is_string()) {
            entry.meta.config_hash = meta.at("config_hash").get<std::string>();
        }
        store.emplace(id, std::move(entry));
    }
    return store;
}

void write_calibration(const std::filesystem::path &path, const CalibrationStore &store) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << calibration_to_json(store).dump(2) << "\n";
}

CalibrationStore read_calibration(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return calibration_from_json(doc);
}

ShotFile parse_shot_csv(std::istream &in) {
    ShotFile file;
    std::string line;
    int64_t line_no = 0;
    std::map<std::string, size_t> col;
    bool have_header = false;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        std::vector<std::string> cells = split_csv(t);
        if (!have_header) {
            for (size_t c = 0; c < cells.size(); ++c) {
                col[cells[c]] = c;
            }
            for (const char *required : {"shot_index", "qubit_id"}) {
                if (!col.contains(required)) {
                    throw Error(ErrorCode::ParseError, line_prefix(line_no) + ": header lacks column '" + required + "'");
                }
            }
            if (col.contains("i") && col.contains("q")) {
                file.mode = ShotMode::Raw;
            } else if (col.contains("x")) {
                file.mode = ShotMode::Projected;
            } else {
                throw Error(ErrorCode::ParseError, line_prefix(line_no) + ": header needs either 'i, q' or 'x' columns");
            }
            file.has_prepared = col.contains("prepared");
            width = cells.size();
            have_header = true;
            continue;
        }
        if (cells.size() != width) {
            throw Error(
                ErrorCode::ParseError,
                line_prefix(line_no) + ": expected " + std::to_string(width) + " columns, got " + std::to_string(cells.size()));
        }
        ShotRow row;
        row.line = line_no;
        row.shot_index = parse_int(cells[col["shot_index"]], line_no, "shot_index");
        row.qubit_id = cells[col["qubit_id"]];
        if (row.qubit_id.empty()) {
            throw Error(ErrorCode::ParseError, line_prefix(line_no) + ": empty qubit_id");
        }
        if (file.has_prepared) {
            int64_t p = parse_int(cells[col["prepared"]], line_no, "prepared");
            if (p != 0 && p != 1) {
                throw Error(ErrorCode::ParseError, line_prefix(line_no) + ": 'prepared' must be 0 or 1");
            }
            row.prepared = static_cast<int>(p);
        }
        if (file.mode == ShotMode::Raw) {
            row.iq.i = parse_double(cells[col["i"]], line_no, "i");
            row.iq.q = parse_double(cells[col["q"]], line_no, "q");
        } else {
            row.x = parse_double(cells[col["x"]], line_no, "x");
        }
        file.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw Error(ErrorCode::ParseError, "shot file has no header row");
    }
    return file;
}

ShotFile read_shot_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    }
    try {
        return parse_shot_csv(in);
    } catch (const Error &e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_shot_csv(std::ostream &out, const ShotFile &file, const std::string &comment) {
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    out << "shot_index,qubit_id";
    if (file.has_prepared) {
        out << ",prepared";
    }
    out << (file.mode == ShotMode::Raw ? ",i,q\n" : ",x\n");
    for (const auto &row : file.rows) {
        out << row.shot_index << "," << row.qubit_id;
        if (file.has_prepared) {
            out << "," << row.prepared.value_or(0);
        }
        if (file.mode == ShotMode::Raw) {
            out << "," << format_double(row.iq.i) << "," << format_double(row.iq.q) << "\n";
        } else {
            out << "," << format_double(row.x) << "\n";
        }
    }
}

ShotRecords group_shots(const ShotFile &file, const CalibrationStore *calibration) {
    ShotRecords records;
    std::map<std::string, size_t> qubit_pos;
    for (const auto &row : file.rows) {
        if (!qubit_pos.contains(row.qubit_id)) {
            qubit_pos[row.qubit_id] = records.qubit_ids.size();
            records.qubit_ids.push_back(row.qubit_id);
        }
    }
    if (calibration != nullptr) {
        for (const auto &id : records.qubit_ids) {
            if (!calibration->contains(id)) {
                throw Error(ErrorCode::QubitMismatch, "shots reference qubit '" + id + "' which has no calibration entry");
            }
        }
    } else if (file.mode == ShotMode::Raw) {
        throw Error(ErrorCode::InvalidArgument, "raw IQ shots need a calibration to be projected");
    }

    const size_t n_q = records.qubit_ids.size();
    std::map<int64_t, size_t> shot_pos;
    std::vector<std::vector<bool>> seen;
    std::vector<int64_t> first_line;
    for (const auto &row : file.rows) {
        auto [it, inserted] = shot_pos.try_emplace(row.shot_index, records.shots.size());
        if (inserted) {
            records.shots.emplace_back(n_q, 0.0);
            seen.emplace_back(n_q, false);
            first_line.push_back(row.line);
        }
        size_t q = qubit_pos[row.qubit_id];
        if (seen[it->second][q]) {
            throw Error(
                ErrorCode::ParseError,
                line_prefix(row.line) + ": duplicate row for shot " + std::to_string(row.shot_index) + ", qubit '" +
                    row.qubit_id + "'");
        }
        seen[it->second][q] = true;
        double x = row.x;
        if (file.mode == ShotMode::Raw) {
            x = project(calibration->at(row.qubit_id).model.projection, row.iq);
        }
        records.shots[it->second][q] = x;
    }
    for (size_t s = 0; s < seen.size(); ++s) {
        for (size_t q = 0; q < n_q; ++q) {
            if (!seen[s][q]) {
                throw Error(
                    ErrorCode::ParseError,
                    line_prefix(first_line[s]) + ": shot is missing qubit '" + records.qubit_ids[q] + "'");
            }
        }
    }
    return records;
}

std::map<std::string, CalibrationDataset> group_calibration(const ShotFile &file) {
    if (file.mode != ShotMode::Raw || !file.has_prepared) {
        throw Error(ErrorCode::ParseError, "calibration CSV needs columns shot_index, qubit_id, prepared, i, q");
    }
    std::map<std::string, CalibrationDataset> out;
    for (const auto &row : file.rows) {
        CalibrationDataset &d = out[row.qubit_id];
        d.qubit_id = row.qubit_id;
        (*row.prepared == 0 ? d.ground_shots : d.excited_shots).push_back(row.iq);
    }
    for (const auto &[id, d] : out) {
        if (d.ground_shots.empty() || d.excited_shots.empty()) {
            throw Error(
                ErrorCode::InsufficientSamples,
                "qubit '" + id + "' has no " + (d.ground_shots.empty() ? "prepared-ground" : "prepared-excited") +
                    " calibration block");
        }
    }
    return out;
}

void write_posterior_csv(std::ostream &out, const PosteriorGrid1D &grid) {
    out << "rho_g,density\n";
    for (int k = 0; k < grid.n_points; ++k) {
        out << format_double(grid.rho_at(k)) << "," << format_double(std::exp(grid.log_weights[static_cast<size_t>(k)]))
            << "\n";
    }
}

json counts_to_json(const Counts &counts) {
    json doc = json::object();
    for (const auto &[bits, c] : counts) {
        doc[bits] = c;
    }
    return doc;
}

void write_metrics_csv(std::ostream &out, const std::vector<MetricReport> &rows, const std::string &comment) {
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    out << "metric,estimator,n_shots,seed,value\n";
    for (const auto &r : rows) {
        out << r.name << "," << r.estimator << "," << r.n_shots << "," << r.seed << "," << format_double(r.value) << "\n";
    }
}

std::string config_hash(const json &config) {
    std::string text = config.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace balero

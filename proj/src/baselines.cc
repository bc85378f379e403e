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

#include "balero/baselines.h"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "balero/error.h"
#include "numeric.h"

namespace balero {

namespace {

double upper_tail(const BimodalResponse &r, double t) {
    double tail = (1 - r.leak_weight) * detail::normal_upper_tail(t, r.main.mean, r.main.std);
    if (r.leak_weight > 0) {
        tail += r.leak_weight * detail::normal_upper_tail(t, r.leak.mean, r.leak.std);
    }
    return tail;
}

Eigen::MatrixXd to_eigen(const ConfusionMatrix &c) {
    const auto d = static_cast<Eigen::Index>(c.dim());
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            m(a, b) = c.at(static_cast<size_t>(a), static_cast<size_t>(b));
        }
    }
    return m;
}

}  // namespace

Separatrix fit_separatrix(const QubitResponseModel &model) {
    double lo = model.p_g.main.mean;
    double hi = model.p_e.main.mean;
    auto gap = [&](double x) {
        return eval_log_density(model.p_g, x) - eval_log_density(model.p_e, x);
    };
    if (!(lo < hi) || !(gap(lo) > 0) || !(gap(hi) < 0)) {
        throw Error(ErrorCode::NoCrossing, "P_g and P_e do not cross between the main means of qubit '" + model.qubit_id + "'");
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (gap(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Separatrix{0.5 * (lo + hi), true};
}

Counts assign_counts(std::span<const Separatrix> separatrices, std::span<const ShotVector> shots) {
    Counts counts;
    const size_t n_q = separatrices.size();
    std::string bits(n_q, '0');
    for (const auto &shot : shots) {
        if (shot.size() != n_q) {
            throw Error(ErrorCode::DimensionMismatch, "shot width does not match the number of separatrices");
        }
        for (size_t q = 0; q < n_q; ++q) {
            bits[q] = separatrices[q].assign(shot[q]) ? '1' : '0';
        }
        ++counts[bits];
    }
    return counts;
}

std::vector<uint64_t> counts_to_vector(const Counts &counts, int n_qubits) {
    std::vector<uint64_t> out(size_t{1} << n_qubits, 0);
    for (const auto &[bits, c] : counts) {
        if (static_cast<int>(bits.size()) != n_qubits) {
            throw Error(ErrorCode::DimensionMismatch, "bitstring '" + bits + "' has the wrong width");
        }
        out[from_bitstring(bits).value] += c;
    }
    return out;
}

uint64_t total_counts(const Counts &counts) {
    uint64_t total = 0;
    for (const auto &entry : counts) {
        total += entry.second;
    }
    return total;
}

std::vector<double> count_fractions(const Counts &counts, int n_qubits) {
    std::vector<uint64_t> dense = counts_to_vector(counts, n_qubits);
    uint64_t total = total_counts(counts);
    if (total == 0) {
        throw Error(ErrorCode::EmptyCounts, "no shots were counted");
    }
    std::vector<double> out(dense.size());
    for (size_t k = 0; k < dense.size(); ++k) {
        out[k] = static_cast<double>(dense[k]) / static_cast<double>(total);
    }
    return out;
}

double misassignment_rate(const QubitResponseModel &model, const Separatrix &sep) {
    ConfusionMatrix c = single_qubit_confusion(model, sep);
    return 0.5 * (c.at(1, 0) + c.at(0, 1));
}

ConfusionMatrix single_qubit_confusion(const QubitResponseModel &model, const Separatrix &sep) {
    double g_above = upper_tail(model.p_g, sep.threshold);
    double e_above = upper_tail(model.p_e, sep.threshold);
    double g_as_one = sep.ground_below ? g_above : 1 - g_above;
    double e_as_one = sep.ground_below ? e_above : 1 - e_above;
    return ConfusionMatrix{1, {1 - g_as_one, 1 - e_as_one, g_as_one, e_as_one}};
}

ConfusionMatrix kron(const ConfusionMatrix &a, const ConfusionMatrix &b) {
    ConfusionMatrix out;
    out.n_qubits = a.n_qubits + b.n_qubits;
    const size_t da = a.dim();
    const size_t db = b.dim();
    const size_t d = out.dim();
    out.entries.assign(d * d, 0.0);
    for (size_t r1 = 0; r1 < da; ++r1) {
        for (size_t c1 = 0; c1 < da; ++c1) {
            for (size_t r2 = 0; r2 < db; ++r2) {
                for (size_t c2 = 0; c2 < db; ++c2) {
                    out.entries[(r1 * db + r2) * d + (c1 * db + c2)] = a.at(r1, c1) * b.at(r2, c2);
                }
            }
        }
    }
    return out;
}

ConfusionMatrix build_confusion(std::span<const QubitResponseModel> models, std::span<const Separatrix> separatrices) {
    if (models.empty() || models.size() != separatrices.size()) {
        throw Error(ErrorCode::DimensionMismatch, "need one separatrix per response model");
    }
    ConfusionMatrix out = single_qubit_confusion(models[0], separatrices[0]);
    for (size_t q = 1; q < models.size(); ++q) {
        out = kron(out, single_qubit_confusion(models[q], separatrices[q]));
    }
    return out;
}

std::vector<double> apply_confusion(const ConfusionMatrix &confusion, std::span<const double> populations) {
    const size_t d = confusion.dim();
    if (populations.size() != d) {
        throw Error(ErrorCode::DimensionMismatch, "population vector does not match the confusion matrix");
    }
    std::vector<double> out(d, 0.0);
    for (size_t a = 0; a < d; ++a) {
        for (size_t b = 0; b < d; ++b) {
            out[a] += confusion.at(a, b) * populations[b];
        }
    }
    return out;
}

InversionResult invert_confusion(std::span<const double> fractions, const ConfusionMatrix &confusion) {
    const size_t d = confusion.dim();
    if (fractions.size() != d || confusion.entries.size() != d * d) {
        throw Error(ErrorCode::DimensionMismatch, "count vector does not match the confusion matrix");
    }
    Eigen::MatrixXd m = to_eigen(confusion);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto &sv = svd.singularValues();
    double smallest = sv(sv.size() - 1);
    InversionResult result;
    result.condition_number = smallest > 0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    if (!(result.condition_number < 1e12)) {
        std::stringstream ss;
        ss << "confusion matrix is singular (condition number " << result.condition_number << ")";
        throw Error(ErrorCode::SingularMatrix, ss.str());
    }
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(fractions.data(), static_cast<Eigen::Index>(d));
    Eigen::VectorXd x = m.fullPivLu().solve(rhs);
    result.quasi_populations.assign(x.data(), x.data() + x.size());
    return result;
}

InversionResult invert_confusion(const Counts &counts, const ConfusionMatrix &confusion) {
    return invert_confusion(count_fractions(counts, confusion.n_qubits), confusion);
}

}  // namespace balero

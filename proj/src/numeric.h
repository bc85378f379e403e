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

// Internal numeric helpers shared by the inference modules.

#ifndef BALERO_SRC_NUMERIC_H
#define BALERO_SRC_NUMERIC_H

#include <cmath>
#include <limits>
#include <numbers>

namespace balero::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) {
        return b;
    }
    if (b == kNegInf) {
        return a;
    }
    double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double safe_log(double v) {
    return v > 0 ? std::log(v) : kNegInf;
}

/// Accumulates a sum of logs by multiplying terms in linear space and taking
/// one log per run of terms. Terms below `kTiny` go straight through
/// `log_term`, so the running product never leaves the normal range.
class LogProductAccumulator {
   public:
    static constexpr double kTiny = 1e-100;
    static constexpr double kFlush = 1e-150;

    void add_linear(double t) {
        product_ *= t;
        if (product_ < kFlush) {
            flush();
        }
    }

    void add_log(double log_t) {
        sum_ += log_t;
    }

    double total() const {
        return sum_ + std::log(product_);
    }

   private:
    void flush() {
        sum_ += std::log(product_);
        product_ = 1;
    }

    double sum_ = 0;
    double product_ = 1;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
   public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const {
        return sum_ + comp_;
    }

   private:
    double sum_ = 0;
    double comp_ = 0;
};

/// P(X > x) for X ~ N(mean, std).
inline double normal_upper_tail(double x, double mean, double std) {
    return 0.5 * std::erfc((x - mean) / (std * std::numbers::sqrt2));
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
template <typename F>
double integrate_simpson(F &&f, double lo, double hi, int intervals) {
    if (intervals % 2 != 0) {
        ++intervals;
    }
    double h = (hi - lo) / intervals;
    double acc = f(lo) + f(hi);
    for (int k = 1; k < intervals; ++k) {
        acc += f(lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace balero::detail

#endif

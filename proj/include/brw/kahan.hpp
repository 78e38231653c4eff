// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace brw {

/*!
  Compensated (Kahan-Babuska / Neumaier) accumulator.

  Exponential sums over a generation span many orders of magnitude; the
  compensation term keeps exact-identity checks meaningful at 1e-12.
*/
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace brw

#pragma once

#include <cmath>

namespace lumen {

/// Neumaier compensated summation. Reductions over images use this in a fixed
/// row-major order, so results do not depend on the thread count.
class Accumulator {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace lumen

#pragma once

#include <cmath>

namespace kfree {

// Neumaier's variant of Kahan summation: the running compensation also
// captures the low part when an addend exceeds the running sum.
template <typename Value>
struct KahanAccumulator {
  Value sum = Value{0};
  Value compensation = Value{0};

  void operator+=(Value value) {
    const Value t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  void operator+=(const KahanAccumulator& other) {
    *this += other.sum;
    *this += other.compensation;
  }

  Value value() const { return sum + compensation; }
  explicit operator Value() const { return value(); }
};

}  // namespace kfree

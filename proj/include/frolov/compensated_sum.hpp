#pragma once

#include <cmath>
#include <span>

namespace frolov {

// Kahan-Babuska (Neumaier) accumulator. The running error term is folded in
// only when the value is read, so the result depends on insertion order but
// on nothing else.
class CompensatedSum {
  public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double compensated_total(std::span<const double> values) noexcept {
    CompensatedSum acc;
    for (double x : values) acc.add(x);
    return acc.value();
}

}  // namespace frolov

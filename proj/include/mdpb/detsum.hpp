#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mdpb {

// Neumaier variant of compensated summation.
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
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// =====================================================================
// Deterministic parallel loops
// =====================================================================
//
// Work is split into fixed-size blocks.  Each block is processed start to
// finish by exactly one thread and partial results are combined in block
// order, so the outcome is bit-identical for any thread count.

// body(i) must only write to slots owned by index i.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& body);

// Sum of dim-dimensional terms over i in [0,n).  term(i, out) writes the
// i-th term into out (size dim).  result receives the compensated total.
void accumulate_terms(std::int64_t n, int dim, int threads,
                      const std::function<void(std::int64_t, std::span<double>)>& term,
                      std::span<double> result);

struct MeanStdErr {
  double mean = 0.0;
  double std_err = 0.0;
};

// Sample mean and standard error (ddof 1); n == 1 reports std_err 0.
MeanStdErr mean_and_std_err(std::span<const double> values);

}  // namespace mdpb

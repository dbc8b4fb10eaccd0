#pragma once

#include <cmath>
#include <vector>

namespace pcm {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// two-pass arithmetic mean and sample (n-1) standard deviation, accumulated
// in input order; sd = 0 for a single value; caller guarantees nonempty
inline MeanSd mean_sample_sd(const std::vector<double>& values) {
  MeanSd out;
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  out.mean = m;
  if (values.size() == 1) return out;
  double acc = 0.0;
  for (double v : values) {
    double d = v - m;
    acc += d * d;
  }
  out.sd = std::sqrt(acc / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace pcm

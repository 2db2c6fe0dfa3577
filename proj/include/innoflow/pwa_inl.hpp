#pragma once

#include <cmath>

#include "innoflow/error.hpp"

namespace innoflow::pwa {

template <class Curve>
double fit_scale(const CcdfSeries& series, const Curve& shape, double w_min) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const CcdfPoint& p : series) {
    if (p.value < w_min) continue;
    const double s = shape(p.value);
    if (!(s > 0.0)) continue;
    sum += std::log(p.prob) - std::log(s);
    ++count;
  }
  if (count == 0) throw NumericError("scale fit: no CCDF points at or above the cutoff");
  return std::exp(sum / static_cast<double>(count));
}

}  // namespace innoflow::pwa

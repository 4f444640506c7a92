#ifndef NETSPECTRO_DETAIL_STATS_HPP
#define NETSPECTRO_DETAIL_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace netspectro::detail {

// Median of a scratch buffer (contents are reordered). Even sizes average
// the two central order statistics.
inline double median_inplace(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lo);
  }
  return m;
}

inline double median(std::vector<double> v) { return median_inplace(v); }

// Raw median absolute deviation (no consistency factor).
inline double mad(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = median(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::fabs(x - m));
  return median_inplace(dev);
}

}  // namespace netspectro::detail

#endif

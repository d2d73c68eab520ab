#include "npmix/estimators/estimators.hpp"

#include <algorithm>

namespace npmix {

std::vector<double> monotone_projection(std::span<const double> values) {
  // pool adjacent violators with unit weights
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : values) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t c = count.back() + count[count.size() - 2];
      const double merged = (level.back() * count.back() + level[level.size() - 2] * count[count.size() - 2]) / c;
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = c;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t b = 0; b < level.size(); ++b)
    for (std::size_t i = 0; i < count[b]; ++i) out.push_back(std::clamp(level[b], 0.0, 1.0));
  return out;
}

}  // namespace npmix

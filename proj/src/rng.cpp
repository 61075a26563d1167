#include "etdlab/rng.hpp"

#include <algorithm>

namespace etdlab {

std::size_t Rng::below(std::size_t n) {
  // 53-bit uniform scaled down; bias is below 2^-53 * n, far under any
  // sampling size used here.
  const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

}  // namespace etdlab

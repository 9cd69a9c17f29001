#include "byzsim/numerics.hpp"

namespace byzsim {

double squared_distance_mean(const std::vector<Vector>& vs) {
  const auto m = static_cast<Index>(vs.size());
  if (m < 2) throw std::invalid_argument("squared_distance_mean: needs at least 2 vectors");
  NeumaierSum acc;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t l = i + 1; l < vs.size(); ++l) {
      acc.add(2.0 * (vs[i] - vs[l]).squaredNorm());  // both ordered pairs (i,l), (l,i)
    }
  }
  return acc.value() / (static_cast<double>(m) * static_cast<double>(m - 1));
}

void ensure_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw std::domain_error(what + ": non-finite entries");
}

}  // namespace byzsim

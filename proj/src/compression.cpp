#include "byzsim/compression.hpp"

#include <cmath>
#include <stdexcept>

namespace byzsim {

void CompressorSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("CompressorSpec: dimension must be positive");
  if (kind == CompressorKind::RandK && (k < 1 || k > dimension))
    throw std::invalid_argument("CompressorSpec: RandK requires 1 <= k <= d");
}

Vector compress(const CompressorSpec& spec, const Vector& x, RngStream& rng) {
  spec.validate();
  if (x.size() != spec.dimension)
    throw std::invalid_argument("compress: dimension mismatch");
  switch (spec.kind) {
    case CompressorKind::Identity:
      return x;
    case CompressorKind::RandK: {
      const auto kept = rng.sample_without_replacement(spec.dimension, spec.k);
      Vector out = Vector::Zero(spec.dimension);
      const double scale = static_cast<double>(spec.dimension) / static_cast<double>(spec.k);
      for (const Index i : kept) out[i] = scale * x[i];
      return out;
    }
    case CompressorKind::L2Quantization: {
      const double norm = x.norm();
      Vector out = Vector::Zero(spec.dimension);
      if (norm == 0.0) return out;
      for (Index i = 0; i < spec.dimension; ++i) {
        const double p = std::abs(x[i]) / norm;
        if (rng.uniform() < p) out[i] = x[i] > 0.0 ? norm : -norm;
      }
      return out;
    }
  }
  throw std::logic_error("compress: unreachable");
}

double omega(const CompressorSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CompressorKind::Identity:
      return 0.0;
    case CompressorKind::RandK:
      return static_cast<double>(spec.dimension) / static_cast<double>(spec.k) - 1.0;
    case CompressorKind::L2Quantization:
      return std::sqrt(static_cast<double>(spec.dimension)) - 1.0;
  }
  throw std::logic_error("omega: unreachable");
}

double dq_bound(const CompressorSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CompressorKind::Identity:
      return 1.0;
    case CompressorKind::RandK:
      return static_cast<double>(spec.dimension) / static_cast<double>(spec.k);
    case CompressorKind::L2Quantization:
      return std::sqrt(static_cast<double>(spec.dimension));
  }
  throw std::logic_error("dq_bound: unreachable");
}

double expected_density(const CompressorSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CompressorKind::Identity:
      return static_cast<double>(spec.dimension);
    case CompressorKind::RandK:
      return static_cast<double>(spec.k);
    case CompressorKind::L2Quantization:
      return std::sqrt(static_cast<double>(spec.dimension));
  }
  throw std::logic_error("expected_density: unreachable");
}

}  // namespace byzsim

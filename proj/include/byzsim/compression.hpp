#pragma once

#include "byzsim/rng.hpp"
#include "byzsim/types.hpp"

namespace byzsim {

enum class CompressorKind { Identity, RandK, L2Quantization };

struct CompressorSpec {
  CompressorKind kind = CompressorKind::Identity;
  Index dimension = 0;
  Index k = 0;  // RandK only

  static CompressorSpec identity(Index d) { return {CompressorKind::Identity, d, 0}; }
  static CompressorSpec rand_k(Index d, Index k) { return {CompressorKind::RandK, d, k}; }
  static CompressorSpec l2_quantization(Index d) { return {CompressorKind::L2Quantization, d, 0}; }

  void validate() const;
};

/// Applies the unbiased compressor. RandK keeps K coordinates chosen uniformly
/// without replacement and rescales them by d/K; the 1-level l2 quantizer emits
/// ||x|| sign(x_i) with probability |x_i|/||x|| per coordinate, independently.
Vector compress(const CompressorSpec& spec, const Vector& x, RngStream& rng);

/// Variance factor: E||Q(x) - x||^2 <= omega ||x||^2.
double omega(const CompressorSpec& spec);

/// Deterministic norm inflation: ||Q(x)|| <= dq_bound ||x|| on every draw.
double dq_bound(const CompressorSpec& spec);

/// Expected output density sup_x E||Q(x)||_0.
double expected_density(const CompressorSpec& spec);

}  // namespace byzsim

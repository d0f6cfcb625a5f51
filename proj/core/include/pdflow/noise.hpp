#pragma once

#include <cstdint>
#include <optional>

#include "pdflow/common.hpp"

namespace pdflow {

enum class NoiseTarget { cost_linear };

/// White Gaussian source with standard deviation `sigma`, passed through a
/// first-order high-pass s / (s + cutoff) and added to the linear cost term.
struct NoiseModel {
  double sigma = 0.0;
  double cutoff = 10.0;
  std::uint64_t seed = 0;
  NoiseTarget target = NoiseTarget::cost_linear;
};

void validate(const NoiseModel& model);

/// SplitMix64 stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// Deterministic per-step perturbation generator. One instance belongs to one
/// integration run; two generators built from the same model produce
/// bit-identical streams.
class NoiseGenerator {
 public:
  NoiseGenerator(const NoiseModel& model, Index dim);

  /// Next perturbation for a step of length h. The high-pass filter is the
  /// bilinear discretization at that step.
  Vec next(double h);

 private:
  double next_gaussian();

  NoiseModel model_;
  SplitMix64 stream_;
  std::optional<double> spare_;
  Vec previous_input_;
  Vec previous_output_;
};

}  // namespace pdflow

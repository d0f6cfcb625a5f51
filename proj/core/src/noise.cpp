#include "pdflow/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pdflow {

void validate(const NoiseModel& model) {
  if (!(model.sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (!(model.cutoff > 0.0)) throw std::invalid_argument("noise cutoff must be > 0");
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseGenerator::NoiseGenerator(const NoiseModel& model, Index dim)
    : model_(model),
      stream_(model.seed),
      previous_input_(Vec::Zero(dim)),
      previous_output_(Vec::Zero(dim)) {
  validate(model_);
}

double NoiseGenerator::next_gaussian() {
  if (spare_) {
    const double value = *spare_;
    spare_.reset();
    return value;
  }
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((stream_.next() >> 11) + 1) * scale;
  const double u2 = static_cast<double>(stream_.next() >> 11) * scale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Vec NoiseGenerator::next(double h) {
  const Index dim = previous_input_.size();
  if (model_.sigma == 0.0) return Vec::Zero(dim);

  // s / (s + wc) with s = K (1 - z^-1) / (1 + z^-1), K = 2 / h.
  const double K = 2.0 / h;
  const double wc = model_.cutoff;
  Vec output(dim);
  for (Index i = 0; i < dim; ++i) {
    const double input = model_.sigma * next_gaussian();
    output[i] = ((K - wc) * previous_output_[i] + K * (input - previous_input_[i])) / (K + wc);
    previous_input_[i] = input;
  }
  previous_output_ = output;
  return output;
}

}  // namespace pdflow

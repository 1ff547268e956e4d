#include <analoglab/precision.hpp>

#include <cmath>

namespace analoglab::precision {

Cvq::Cvq(double bound, double resolution, std::string label)
    : bound_(bound), resolution_(resolution), label_(std::move(label)) {
  if (!std::isfinite(bound_) || !std::isfinite(resolution_) || !(resolution_ > 0.0) ||
      !(bound_ >= resolution_))
    throw Error("CVQ needs bound >= resolution > 0 (got bound " + std::to_string(bound_) +
                ", resolution " + std::to_string(resolution_) + ")");
}

Cvq Cvq::rescaled(double factor) const {
  if (!(factor > 0.0)) throw Error("rescale factor must be positive");
  return Cvq(bound_ * factor, resolution_ * factor, label_);
}

PrecisionRatio precision_ratio(const Cvq& q) { return {q.bound() / q.resolution()}; }

Reading quantize(const Cvq& q, double v) {
  const double eps = q.resolution();
  const double max_steps = std::floor(q.bound() / eps);
  if (std::fabs(v) > q.bound()) return {std::copysign(max_steps * eps, v), true};
  // nearbyint honours the default round-to-nearest-even mode.
  const double steps = std::nearbyint(v / eps);
  if (std::fabs(steps) > max_steps) return {std::copysign(max_steps * eps, v), true};
  return {steps * eps, false};
}

Cvq amplify(const Cvq& q, double gain) {
  if (!(gain >= 1.0) || !std::isfinite(gain)) throw Error("amplifier gain must be >= 1");
  return Cvq(q.bound() * gain, q.resolution(), q.label());
}

bool detects(const Cvq& q, double gain, double height, double threshold_factor) {
  const auto amplified = amplify(q, gain);
  const double signal = gain * height;
  return quantize(amplified, signal).value > threshold_factor * signal;
}

double min_detection_gain(const Cvq& q, double height, double threshold_factor, int max_octaves) {
  double gain = 1.0;
  for (int k = 0; k <= max_octaves; ++k, gain *= 2.0)
    if (detects(q, gain, height, threshold_factor)) return gain;
  return 0.0;
}

}  // namespace analoglab::precision

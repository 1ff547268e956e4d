#pragma once

// Continuously variable quantities: a magnitude bound x, a resolution eps,
// and the unit-free precision ratio x / eps.

#include <analoglab/common.hpp>

#include <string>

namespace analoglab::precision {

/// A bounded, quantized physical quantity. Both bound and resolution are in
/// the same (arbitrary) unit.
class Cvq {
 public:
  /// Throws Error unless bound >= resolution > 0 and both are finite.
  Cvq(double bound, double resolution, std::string label = {});

  double bound() const { return bound_; }
  double resolution() const { return resolution_; }
  const std::string& label() const { return label_; }

  /// Same quantity expressed in a unit `factor` times smaller.
  Cvq rescaled(double factor) const;

 private:
  double bound_;
  double resolution_;
  std::string label_;
};

struct PrecisionRatio {
  double value;
};

struct Reading {
  double value = 0.0;
  bool clipped = false;
};

PrecisionRatio precision_ratio(const Cvq& q);

/// Rounds to the nearest multiple of the resolution (ties to the even
/// multiple). Readings never exceed the largest multiple of the resolution
/// that fits inside the bound; inputs whose nearest multiple lies beyond it
/// saturate there and are flagged as clipped.
Reading quantize(const Cvq& q, double true_value);

/// Amplifier in front of the quantity: the representable range grows by
/// `gain` while the resolution is unchanged. Requires gain >= 1.
Cvq amplify(const Cvq& q, double gain);

/// True when a signal of the given height survives quantization after the
/// amplifier: the reading of gain * height exceeds threshold_factor times
/// gain * height.
bool detects(const Cvq& q, double gain, double height, double threshold_factor = 0.5);

/// Smallest power-of-two gain (>= 1, at most 2^max_octaves) at which
/// `detects` holds; 0 when none within the range.
double min_detection_gain(const Cvq& q, double height, double threshold_factor = 0.5,
                          int max_octaves = 200);

}  // namespace analoglab::precision

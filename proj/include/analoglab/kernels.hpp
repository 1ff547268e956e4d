#pragma once

// Data-parallel hot loops, each with a serial reference. Serial and parallel
// variants return bitwise-identical results: work is cut into fixed chunks
// whose partial results are combined in chunk order, independent of the
// thread count.

#include <analoglab/blip.hpp>
#include <analoglab/common.hpp>
#include <analoglab/precision.hpp>
#include <analoglab/richardson.hpp>

#include <functional>
#include <span>
#include <vector>

namespace analoglab::kernels {

inline constexpr Natural kChunk = 4096;

/// sum_{i < count} f(start + i * step), summed sequentially inside chunks of
/// kChunk samples and then across chunks in order.
double sample_sum_serial(const std::function<double(double)>& f, double start, double step,
                         Natural count);
double sample_sum_parallel(const std::function<double(double)>& f, double start, double step,
                           Natural count);

/// One differentiator run: observe at 2^-j with a clock of the given bound
/// and resolution; the resolution is also the finite-difference step.
struct DifferentiatorCell {
  Natural j = 0;
  double time_resolution = 1.0;
  double time_bound = 1.0;
};

std::vector<blip::DifferentiatorReading> differentiator_sweep_serial(
    const blip::SignalF& signal, const precision::Cvq& amplitude,
    std::span<const DifferentiatorCell> cells, double tol = 1e-13);
std::vector<blip::DifferentiatorReading> differentiator_sweep_parallel(
    const blip::SignalF& signal, const precision::Cvq& amplitude,
    std::span<const DifferentiatorCell> cells, double tol = 1e-13);

/// Exhaustive scan of F(j, x) over x in {0, step, ..., G}^k.
struct FGridScan {
  Natural points = 0;
  double min_F = 0.0;
  /// F < 0 anywhere.
  Natural negative = 0;
  /// F <= 1 but the verifier is nonzero at the rounded squares.
  Natural low_without_witness = 0;
  /// Points with F <= 1.
  Natural low = 0;
};

FGridScan f_grid_scan_serial(const richardson::FDevice& dev, Natural j, double step, double G);
FGridScan f_grid_scan_parallel(const richardson::FDevice& dev, Natural j, double step, double G);

}  // namespace analoglab::kernels

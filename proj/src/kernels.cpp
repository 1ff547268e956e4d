#include <analoglab/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace analoglab::kernels {

namespace {

enum class LoopSchedule { Static, Dynamic };

double chunk_sum(const std::function<double(double)>& f, double start, double step, Natural lo,
                 Natural hi) {
  double s = 0.0;
  for (Natural i = lo; i < hi; ++i) s += f(start + static_cast<double>(i) * step);
  return s;
}

Natural chunk_count(Natural count) { return (count + kChunk - 1) / kChunk; }

// Runs body(i) for i < n across threads. Exceptions cannot cross the
// parallel region; the first one is rethrown after the loop.
template <class Body>
void parallel_for(Natural n, LoopSchedule kind, Body&& body) {
  std::exception_ptr error;
  const auto count = static_cast<long long>(n);
  auto guarded = [&](long long i) {
    try {
      body(static_cast<Natural>(i));
    } catch (...) {
#pragma omp critical(analoglab_kernel_error)
      if (!error) error = std::current_exception();
    }
  };
  if (kind == LoopSchedule::Dynamic) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) guarded(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) guarded(i);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

double sample_sum_serial(const std::function<double(double)>& f, double start, double step,
                         Natural count) {
  double total = 0.0;
  for (Natural c = 0; c < chunk_count(count); ++c)
    total += chunk_sum(f, start, step, c * kChunk, std::min(count, (c + 1) * kChunk));
  return total;
}

double sample_sum_parallel(const std::function<double(double)>& f, double start, double step,
                           Natural count) {
  const Natural chunks = chunk_count(count);
  if (chunks <= 1) return sample_sum_serial(f, start, step, count);
  std::vector<double> partial(chunks);
  parallel_for(chunks, LoopSchedule::Static, [&](Natural c) {
    partial[c] = chunk_sum(f, start, step, c * kChunk, std::min(count, (c + 1) * kChunk));
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// ---------------------------------------------------------------------------

namespace {

blip::DifferentiatorReading run_cell(const blip::SignalF& signal, const precision::Cvq& amplitude,
                                     const DifferentiatorCell& cell, double tol) {
  const blip::DifferentiatorSim sim{precision::Cvq(cell.time_bound, cell.time_resolution, "time"), amplitude,
                                    cell.time_resolution};
  return blip::run_differentiator(sim, signal, cell.j, tol);
}

}  // namespace

std::vector<blip::DifferentiatorReading> differentiator_sweep_serial(
    const blip::SignalF& signal, const precision::Cvq& amplitude,
    std::span<const DifferentiatorCell> cells, double tol) {
  std::vector<blip::DifferentiatorReading> out;
  out.reserve(cells.size());
  for (const auto& cell : cells) out.push_back(run_cell(signal, amplitude, cell, tol));
  return out;
}

std::vector<blip::DifferentiatorReading> differentiator_sweep_parallel(
    const blip::SignalF& signal, const precision::Cvq& amplitude,
    std::span<const DifferentiatorCell> cells, double tol) {
  std::vector<blip::DifferentiatorReading> out(cells.size());
  parallel_for(cells.size(), LoopSchedule::Dynamic,
               [&](Natural i) { out[i] = run_cell(signal, amplitude, cells[i], tol); });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Grid {
  std::size_t k;
  Natural per_axis;
  Natural total;
  double step;
};

Grid make_grid(const richardson::FDevice& dev, double step, double G) {
  if (!(step > 0.0) || !(G >= 0.0)) throw Error("F grid needs step > 0 and G >= 0");
  Grid g{dev.k(), static_cast<Natural>(std::floor(G / step + 1e-9)) + 1, 1, step};
  for (std::size_t i = 0; i < g.k; ++i) g.total *= g.per_axis;
  return g;
}

FGridScan scan_range(const richardson::FDevice& dev, Natural j, const Grid& g, Natural lo,
                     Natural hi) {
  FGridScan s;
  s.min_F = std::numeric_limits<double>::infinity();
  std::vector<double> x(g.k);
  std::vector<Natural> m(g.k);
  for (Natural idx = lo; idx < hi; ++idx) {
    Natural rest = idx;
    for (std::size_t i = 0; i < g.k; ++i) {
      x[i] = static_cast<double>(rest % g.per_axis) * g.step;
      rest /= g.per_axis;
    }
    const double F = dev.F(j, x);
    ++s.points;
    s.min_F = std::min(s.min_F, F);
    if (F < 0.0) ++s.negative;
    if (F <= 1.0) {
      ++s.low;
      for (std::size_t i = 0; i < g.k; ++i) m[i] = richardson::nearest_natural(x[i] * x[i]);
      if (dev.verifier().verify(j, m) != 0) ++s.low_without_witness;
    }
  }
  return s;
}

void merge(FGridScan& into, const FGridScan& part) {
  into.points += part.points;
  into.min_F = std::min(into.min_F, part.min_F);
  into.negative += part.negative;
  into.low_without_witness += part.low_without_witness;
  into.low += part.low;
}

FGridScan empty_scan() {
  FGridScan s;
  s.min_F = std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace

FGridScan f_grid_scan_serial(const richardson::FDevice& dev, Natural j, double step, double G) {
  const Grid g = make_grid(dev, step, G);
  FGridScan out = empty_scan();
  for (Natural c = 0; c < chunk_count(g.total); ++c)
    merge(out, scan_range(dev, j, g, c * kChunk, std::min(g.total, (c + 1) * kChunk)));
  return out;
}

FGridScan f_grid_scan_parallel(const richardson::FDevice& dev, Natural j, double step, double G) {
  const Grid g = make_grid(dev, step, G);
  const Natural chunks = chunk_count(g.total);
  std::vector<FGridScan> partial(chunks);
  parallel_for(chunks, LoopSchedule::Static, [&](Natural c) {
    partial[c] = scan_range(dev, j, g, c * kChunk, std::min(g.total, (c + 1) * kChunk));
  });
  FGridScan out = empty_scan();
  for (const auto& p : partial) merge(out, p);
  return out;
}

}  // namespace analoglab::kernels

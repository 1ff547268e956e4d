#include <analoglab/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace analoglab::spectra {

const char* to_string(Mode m) { return m == Mode::T ? "T" : "S"; }
const char* to_string(FeatureKind k) { return k == FeatureKind::Band ? "band" : "line"; }

double lambda_T(Natural j) { return 5.0 - 4.0 * std::ldexp(1.0, -static_cast<int>(j)); }

OperatorApprox build_T(const resets::WaitingTimeTable& table, Natural J, Natural rows,
                       Natural band_points) {
  if (band_points < 2) throw Error("band discretization needs at least 2 points");
  OperatorApprox op;
  op.rows_used = std::min(rows, table.searched());
  for (Natural j = 0; j < J; ++j) {
    const double centre = lambda_T(j);
    const auto nu = table.nu(j);
    if (!nu || *nu >= rows) {
      op.eigenvalues.push_back(centre);
      continue;
    }
    const double half = std::ldexp(1.0, -static_cast<int>(*nu));
    const double lo = centre - half;
    const double step = 2.0 * half / static_cast<double>(band_points - 1);
    for (Natural i = 0; i < band_points; ++i)
      op.eigenvalues.push_back(i + 1 == band_points ? centre + half
                                                    : lo + step * static_cast<double>(i));
  }
  return op;
}

OperatorApprox build_S(const resets::WaitingTimeTable& table, Natural N) {
  if (N > table.searched())
    throw Error("S truncation " + std::to_string(N) + " exceeds the " +
                std::to_string(table.searched()) + " materialized indices");
  OperatorApprox op;
  op.rows_used = N;
  for (Natural n = 0; n < N; ++n)
    if (const auto& a = table.prefix()[n]) op.eigenvalues.push_back(std::ldexp(1.0, -static_cast<int>(*a)));
  return op;
}

SpectrumReading measure(const OperatorApprox& op, double resolution) {
  if (!(resolution > 0.0)) throw Error("spectral resolution must be positive");
  SpectrumReading r;
  r.resolution = resolution;
  auto values = op.eigenvalues;
  std::sort(values.begin(), values.end());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t k = i;
    while (k + 1 < values.size() && values[k + 1] - values[k] < resolution) ++k;
    SpectralFeature f;
    f.lo = values[i];
    f.hi = values[k];
    f.kind = f.hi - f.lo >= 2.0 * resolution ? FeatureKind::Band : FeatureKind::Line;
    r.features.push_back(f);
    i = k + 1;
  }
  return r;
}

Answer classify_membership(const SpectrumReading& reading, Natural j, Mode mode) {
  if (mode == Mode::S) {
    const double target = std::ldexp(1.0, -static_cast<int>(j));
    for (const auto& f : reading.features)
      if (f.kind == FeatureKind::Line && std::fabs(f.center() - target) <= reading.resolution)
        return Answer::Yes;
    return Answer::No;
  }
  const double centre = lambda_T(j);
  const double window = std::ldexp(1.0, -static_cast<int>(j + 1));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& f : reading.features) {
    if (f.hi < centre - window || f.lo > centre + window) continue;
    lo = std::min(lo, f.lo);
    hi = std::max(hi, f.hi);
  }
  if (!(hi >= lo)) return Answer::No;
  return hi - lo >= 2.0 * reading.resolution ? Answer::Yes : Answer::No;
}

double s_mode_resolution(Natural J) { return std::ldexp(1.0, -static_cast<int>(J + 1)); }

Natural rows_needed(const resets::WaitingTimeTable& table, const resets::Schedule* ground_truth,
                    Natural J, Mode mode, double resolution, Natural band_points) {
  if (!ground_truth)
    throw RequiresSyntheticGroundTruth("rows_needed compares against a synthetic schedule");
  if (J == 0) return 0;
  if (mode == Mode::T && !(resolution > 0.0))
    throw Error("T-mode rows_needed needs a positive resolution");
  const double eps = mode == Mode::S ? s_mode_resolution(J) : resolution;
  for (Natural N = 0; N <= table.searched(); ++N) {
    const auto op = mode == Mode::S ? build_S(table, N) : build_T(table, J, N, band_points);
    const auto reading = measure(op, eps);
    bool all_correct = true;
    for (Natural j = 0; j < J && all_correct; ++j) {
      const bool member = ground_truth->nu_of(j).has_value();
      all_correct = (classify_membership(reading, j, mode) == Answer::Yes) == member;
    }
    if (all_correct) return N;
  }
  throw Error("no truncation depth up to " + std::to_string(table.searched()) +
              " classifies every j < " + std::to_string(J) + " correctly");
}

}  // namespace analoglab::spectra

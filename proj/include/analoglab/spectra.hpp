#pragma once

// Spectral encodings of A, with operators modelled by their eigenvalue lists.
//
//   T: a line at lambda_j = 5 - 4 * 2^-j when j is not (yet) enumerated, a
//      band of width 2 * 2^-nu(j) around lambda_j when it is.
//   S: eigenvalues 2^-a(n).
//
// Truncating the enumeration after N indices plays the role of knowing the
// first N rows of the representing matrix.

#include <analoglab/common.hpp>
#include <analoglab/resets.hpp>

#include <optional>
#include <vector>

namespace analoglab::spectra {

enum class FeatureKind { Line, Band };

struct SpectralFeature {
  FeatureKind kind = FeatureKind::Line;
  double lo = 0.0;
  double hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct OperatorApprox {
  std::vector<double> eigenvalues;
  /// Enumeration indices consulted to build the model.
  Natural rows_used = 0;
};

struct SpectrumReading {
  double resolution = 0.0;
  std::vector<SpectralFeature> features;
};

enum class Mode { T, S };

const char* to_string(Mode m);
const char* to_string(FeatureKind k);

double lambda_T(Natural j);

/// T restricted to j < J, built from the first `rows` enumeration indices.
/// Bands are discretized as `band_points` (>= 2) equally spaced eigenvalues.
OperatorApprox build_T(const resets::WaitingTimeTable& table, Natural J, Natural rows,
                       Natural band_points = 8);

/// S from the first N enumeration indices (silent steps skipped).
OperatorApprox build_S(const resets::WaitingTimeTable& table, Natural N);

/// Sorts the eigenvalues and merges neighbours closer than the resolution.
/// A cluster is reported as a Band when its extent is at least twice the
/// resolution, otherwise as a Line.
SpectrumReading measure(const OperatorApprox& op, double resolution);

/// T: YES iff the features meeting the window of half-width 2^-(j+1) around
/// lambda_j together span at least twice the resolution.
/// S: YES iff a Line lies within the resolution of 2^-j.
Answer classify_membership(const SpectrumReading& reading, Natural j, Mode mode);

/// Resolution used when classifying j < J in S-mode: 2^-(J+1).
double s_mode_resolution(Natural J);

/// Smallest truncation depth N such that the truncated operator classifies
/// every j < J correctly against the synthetic schedule. T-mode measures at
/// `resolution`; S-mode at s_mode_resolution(J). Throws
/// RequiresSyntheticGroundTruth for machine-mode enumerators, and Error when
/// no N up to the table size works.
Natural rows_needed(const resets::WaitingTimeTable& table, const resets::Schedule* ground_truth,
                    Natural J, Mode mode = Mode::S, double resolution = 0.0,
                    Natural band_points = 8);

}  // namespace analoglab::spectra

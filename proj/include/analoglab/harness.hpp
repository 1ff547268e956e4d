#pragma once

// Experiment registry, configuration, deterministic execution and reports.
//
// Every run produces one CSV (a row per cell) and one JSON summary. Both are
// pure functions of the configuration; wall time is reported on the console
// only, so reruns are byte-identical.

#include <analoglab/common.hpp>
#include <analoglab/resets.hpp>

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace analoglab::harness {

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};
class IoFailure : public Error {
 public:
  using Error::Error;
};
class UnknownExperiment : public Error {
 public:
  using Error::Error;
};
class IncompleteSweep : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSchemaVersion = 1;

struct CvqPair {
  double bound = 1.0;
  double resolution = 1.0;
  friend bool operator==(const CvqPair&, const CvqPair&) = default;
};

struct ExperimentConfig {
  std::string experiment;
  /// "synthetic" (schedule below) or "machine" (dovetailed machine family).
  std::string source = "synthetic";
  std::vector<resets::ScheduleEntry> schedule;
  Natural J = 8;
  /// Enumeration indices materialized.
  Natural budget = 64;
  Natural seed = 1;
  /// Precision sweep. The JSON form also accepts
  /// {"bound": b, "octaves": [lo, hi]} for resolutions b * 2^-p, p = lo..hi.
  std::vector<CvqPair> sweep;
  CvqPair amplitude{1.0, 1e-12};
  /// Experiment-specific knobs, echoed verbatim.
  nlohmann::json params = nlohmann::json::object();
  /// Where run() writes its files; empty means "do not write".
  std::string output_dir;

  /// Throws ConfigInvalid.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws ConfigInvalid.
  void validate() const;

  resets::Schedule make_schedule() const;
};

/// Throws IoFailure when unreadable, ConfigInvalid when malformed.
ExperimentConfig load_config(const std::string& path);

struct ExperimentInfo {
  std::string name;
  std::string description;
};

/// Stable order.
std::vector<ExperimentInfo> list_experiments();

/// Desk-scale defaults for a registered experiment. Throws UnknownExperiment.
ExperimentConfig default_config(const std::string& experiment);

/// A cell of a precision sweep, reduced to what the claim check needs.
struct ClaimCell {
  Natural j = 0;
  bool in_A = false;
  std::optional<Natural> nu;
  /// Sweep coordinate, increasing with precision (PR, 1/eps, or rows).
  double axis = 0.0;
  bool correct = false;
};

enum class ClaimAxis { None, Log2, Linear };

struct RunReport {
  ExperimentConfig config;
  std::string csv;
  nlohmann::json summary;
  std::vector<ClaimCell> claim_cells;
  ClaimAxis claim_axis = ClaimAxis::None;
  /// Not persisted.
  double wall_time_seconds = 0.0;

  /// The JSON document written next to the CSV.
  std::string summary_text() const;
};

/// Executes the experiment and, when config.output_dir is set, writes
/// <dir>/<experiment>.csv and <dir>/<experiment>.json. Throws
/// ConfigInvalid, UnknownExperiment or IoFailure.
RunReport run(const ExperimentConfig& config);

/// Writes the two report files. Throws IoFailure.
void write_report(const RunReport& report, const std::string& output_dir);

struct JVerdict {
  Natural j = 0;
  bool in_A = false;
  std::optional<Natural> nu;
  /// Least tested axis value from which every tested cell is correct;
  /// nullopt when the highest tested cell is wrong.
  std::optional<double> threshold;
  /// Some tested cell below the threshold is wrong.
  bool flips = false;
  bool correct_everywhere = false;
  /// log2(threshold) on log axes, threshold itself on linear axes.
  std::optional<double> threshold_coordinate;
  /// Where the construction puts the threshold (nu + j, nu or nu + 1).
  std::optional<double> predicted;
  bool within_window = false;
};

struct ClaimVerdict {
  std::vector<JVerdict> rows;
  double window = 0.0;
  /// Every member flips inside the window and every non-member is correct at
  /// every tested precision.
  bool holds = false;
};

/// Throws IncompleteSweep when the report has no sweep or the cells do not
/// form a full grid.
ClaimVerdict verify_claim(const RunReport& report);
nlohmann::json to_json(const ClaimVerdict& verdict);

/// The command-line front end. Returns the process exit code: 0 success,
/// 2 config error, 3 I/O error, 4 unknown experiment.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace analoglab::harness

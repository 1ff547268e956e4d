#pragma once

// Growth on binary trees: nodes are strings over {0, 1} (0 = left, 1 = right)
// and membership is a decidable, downward-closed predicate.
//
// The trial-and-error explorer walks u_0 = (), u_1, ... by
//   * descending left while the current node has a child, and
//   * on a terminal node v0 or v01...1, moving to v1,
// and converges pointwise to the leftmost infinite path without any
// computable bound on when each prefix settles.

#include <analoglab/common.hpp>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace analoglab::growth {

class NoPathWithinBudget : public Error {
 public:
  using Error::Error;
};

class GrowthTree {
 public:
  using Predicate = std::function<bool(std::string_view)>;

  /// The predicate must accept the empty string and be downward closed;
  /// the root is checked here, closure is the caller's contract (see
  /// is_downward_closed).
  GrowthTree(std::string name, Predicate membership);

  static GrowthTree full();
  /// Tree made of the given nodes. Throws Error unless the set is downward
  /// closed and contains the root.
  static GrowthTree finite(std::string name, std::vector<std::string> nodes);

  const std::string& name() const { return name_; }
  bool contains(std::string_view u) const;
  /// Has a child in the tree (decided with two membership calls).
  bool has_child(std::string_view u) const;

 private:
  std::string name_;
  Predicate membership_;
};

/// Hand-built trees:
///   full        every string
///   left-pruned strings starting with 0 have length <= 3
///   no-11       no two consecutive 1s
///   comb        the path 1^omega with a spur 1^i 0^m (m <= i + 1) at each i
///   thue-morse  the Thue-Morse sequence with a spur of 0s of length <= i + 2
///               leaving it at each position i
///   finite      {(), 0, 1, 01}, no infinite path
std::vector<std::string> sample_tree_names();
/// Throws Error for an unknown name.
GrowthTree sample_tree(std::string_view name);

/// Exhaustive check of downward closure over all strings up to max_len.
bool is_downward_closed(const GrowthTree& tree, std::size_t max_len);

/// One explorer move; nullopt when u is terminal and all 1s (ExhaustedRight).
/// When u has only a right child the move lands there directly, and a
/// backtrack target outside the tree is backtracked from again, so every
/// returned node is in the tree. Throws NotInTree.
std::optional<std::string> trial_step(const GrowthTree& tree, std::string_view u);

enum class TraceStatus { Running, ExhaustedRight };

struct PathTrace {
  std::vector<std::string> steps;
  /// Cumulative number of backtracking moves up to and including each step.
  std::vector<Natural> backtracks;
  TraceStatus status = TraceStatus::Running;

  std::size_t max_length() const;
};

/// Iterates trial_step from the root until `max_steps` nodes are recorded or
/// the explorer exhausts the right edge.
PathTrace run_trial(const GrowthTree& tree, Natural max_steps);

/// Lexicographically least length-J prefix of a node at depth depth_budget
/// (depth-first, left first). nullopt when the tree dies out before the
/// budget.
std::optional<std::string> leftmost_path_oracle(const GrowthTree& tree, Natural J,
                                                Natural depth_budget);

/// Least n with trace.steps[n] == prefix.
std::optional<Natural> n_of_J(const PathTrace& trace, std::string_view prefix);

/// True when u lies strictly to the right of the path: at their first
/// difference u has 1 and the path 0.
bool right_of(std::string_view u, std::string_view path);

struct PotentialSize {
  Natural value = 0;
  /// The search frontier reached depth_budget; the true size may be infinite.
  bool at_least = false;
};

/// Longest extension of v up to depth_budget. Throws NotInTree.
PotentialSize potential_size(const GrowthTree& tree, std::string_view v, Natural depth_budget);

enum class Fertility { Fertile, Sterile, Unknown };

struct FertilityVerdict {
  Fertility verdict = Fertility::Unknown;
  /// Fertile: probe depth reached. Sterile: longest extension. Unknown: the
  /// node-visit budget that ran out.
  Natural value = 0;
};

/// Budget-relative fertility: Fertile when an extension probe_depth below v
/// exists, Sterile when exhaustive search shows none, Unknown when more than
/// visit_budget nodes would have to be visited.
FertilityVerdict fertility(const GrowthTree& tree, std::string_view v, Natural probe_depth,
                           Natural visit_budget);

struct AgreementThreshold {
  Natural k = 0;
  /// Some node off the path reaches depth_budget, so no finite k is visible.
  bool capped = false;
};

/// Least k such that every node longer than k agrees with the leftmost path
/// on its first J symbols (checked up to depth_budget). Throws
/// NoPathWithinBudget.
AgreementThreshold agreement_threshold(const GrowthTree& tree, Natural J, Natural depth_budget);

// ---------------------------------------------------------------------------

/// Position `position` of every path is forced to `bit` once the dovetailer
/// has seen the deciding halt, at stage `discovered_at`.
struct SeparationConstraint {
  Natural position = 0;
  bool bit = false;
  Natural discovered_at = 0;
};

struct KleeneTree {
  GrowthTree tree;
  std::vector<SeparationConstraint> constraints;
};

/// Separating tree for the pair (programs that halt with r1 = 0, programs
/// that halt with r1 != 0) of the enumerated machine family run on their own
/// index. A node u is in the tree iff u[e] == bit for every constraint with
/// e < |u| and discovered_at <= |u|. Only programs e < budget halting within
/// budget steps are considered.
KleeneTree kleene_tree(Natural budget);

}  // namespace analoglab::growth

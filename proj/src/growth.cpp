#include <analoglab/growth.hpp>

#include <analoglab/resets.hpp>

#include <algorithm>
#include <set>

namespace analoglab::growth {

GrowthTree::GrowthTree(std::string name, Predicate membership)
    : name_(std::move(name)), membership_(std::move(membership)) {
  if (!membership_ || !membership_(std::string_view{}))
    throw Error("growth tree '" + name_ + "' does not contain the root");
}

GrowthTree GrowthTree::full() {
  return GrowthTree("full", [](std::string_view) { return true; });
}

GrowthTree GrowthTree::finite(std::string name, std::vector<std::string> nodes) {
  std::set<std::string, std::less<>> set(nodes.begin(), nodes.end());
  set.insert(std::string{});
  for (const auto& u : set) {
    if (u.find_first_not_of("01") != std::string::npos)
      throw Error("node '" + u + "' is not a binary string");
    if (!u.empty() && !set.count(u.substr(0, u.size() - 1)))
      throw Error("node set is not downward closed at '" + u + "'");
  }
  return GrowthTree(std::move(name), [set = std::move(set)](std::string_view u) {
    return set.find(u) != set.end();
  });
}

bool GrowthTree::contains(std::string_view u) const { return membership_(u); }

bool GrowthTree::has_child(std::string_view u) const {
  std::string w(u);
  w.push_back('0');
  if (membership_(w)) return true;
  w.back() = '1';
  return membership_(w);
}

std::vector<std::string> sample_tree_names() {
  return {"full", "left-pruned", "no-11", "comb", "thue-morse", "finite"};
}

namespace {

// Path p with off-path spurs: after the first disagreement at position i the
// node may only continue with 0s, up to length limit(i).
template <class PathBit, class Limit>
bool spur_member(std::string_view u, PathBit path_bit, Limit limit) {
  std::size_t i = 0;
  while (i < u.size() && u[i] == path_bit(i)) ++i;
  if (i == u.size()) return true;
  for (std::size_t t = i + 1; t < u.size(); ++t)
    if (u[t] != '0') return false;
  return u.size() <= limit(i);
}

char thue_morse_bit(std::size_t i) { return (__builtin_popcountll(i) & 1) ? '1' : '0'; }

}  // namespace

GrowthTree sample_tree(std::string_view name) {
  if (name == "full") return GrowthTree::full();
  if (name == "left-pruned")
    return GrowthTree("left-pruned",
                      [](std::string_view u) { return u.empty() || u[0] == '1' || u.size() <= 3; });
  if (name == "no-11")
    return GrowthTree("no-11",
                      [](std::string_view u) { return u.find("11") == std::string_view::npos; });
  if (name == "comb")
    return GrowthTree("comb", [](std::string_view u) {
      return spur_member(u, [](std::size_t) { return '1'; },
                         [](std::size_t i) { return 2 * i + 1; });
    });
  if (name == "thue-morse")
    return GrowthTree("thue-morse", [](std::string_view u) {
      return spur_member(u, thue_morse_bit, [](std::size_t i) { return 2 * i + 3; });
    });
  if (name == "finite") return GrowthTree::finite("finite", {"0", "1", "01"});
  throw Error("unknown sample tree '" + std::string(name) + "'");
}

bool is_downward_closed(const GrowthTree& tree, std::size_t max_len) {
  if (!tree.contains("")) return false;
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (Natural bits = 0; bits < (Natural{1} << len); ++bits) {
      std::string u(len, '0');
      for (std::size_t i = 0; i < len; ++i)
        if (bits >> (len - 1 - i) & 1) u[i] = '1';
      if (tree.contains(u) && !tree.contains(std::string_view(u).substr(0, len - 1))) return false;
    }
  }
  return true;
}

namespace {

// Strip the trailing run of 1s and turn the last 0 into a 1. nullopt for an
// all-1s string.
std::optional<std::string> backtrack(std::string w) {
  while (!w.empty() && w.back() == '1') w.pop_back();
  if (w.empty()) return std::nullopt;
  w.back() = '1';
  return w;
}

std::optional<std::string> trial_step_counted(const GrowthTree& tree, std::string_view u,
                                              bool& backtracked) {
  backtracked = false;
  std::string w(u);
  w.push_back('0');
  if (tree.contains(w)) return w;
  w.back() = '1';
  if (tree.contains(w)) return w;
  backtracked = true;
  auto next = backtrack(std::string(u));
  while (next && !tree.contains(*next)) next = backtrack(std::move(*next));
  return next;
}

}  // namespace

std::optional<std::string> trial_step(const GrowthTree& tree, std::string_view u) {
  if (!tree.contains(u)) throw NotInTree("'" + std::string(u) + "' is not a node of " + tree.name());
  bool backtracked = false;
  return trial_step_counted(tree, u, backtracked);
}

std::size_t PathTrace::max_length() const {
  std::size_t m = 0;
  for (const auto& s : steps) m = std::max(m, s.size());
  return m;
}

PathTrace run_trial(const GrowthTree& tree, Natural max_steps) {
  PathTrace trace;
  if (max_steps == 0) return trace;
  std::string u;
  Natural backtracks = 0;
  trace.steps.push_back(u);
  trace.backtracks.push_back(0);
  while (trace.steps.size() < max_steps) {
    bool backtracked = false;
    auto next = trial_step_counted(tree, u, backtracked);
    if (!next) {
      trace.status = TraceStatus::ExhaustedRight;
      break;
    }
    if (backtracked) ++backtracks;
    u = std::move(*next);
    trace.steps.push_back(u);
    trace.backtracks.push_back(backtracks);
  }
  return trace;
}

namespace {

bool dfs_leftmost(const GrowthTree& tree, std::string& u, Natural depth_budget) {
  if (u.size() >= depth_budget) return true;
  for (char b : {'0', '1'}) {
    u.push_back(b);
    if (tree.contains(u) && dfs_leftmost(tree, u, depth_budget)) return true;
    u.pop_back();
  }
  return false;
}

Natural dfs_deepest(const GrowthTree& tree, std::string& u, Natural depth_budget) {
  if (u.size() >= depth_budget) return u.size();
  Natural best = u.size();
  for (char b : {'0', '1'}) {
    u.push_back(b);
    if (tree.contains(u)) best = std::max(best, dfs_deepest(tree, u, depth_budget));
    u.pop_back();
    if (best >= depth_budget) break;
  }
  return best;
}

}  // namespace

std::optional<std::string> leftmost_path_oracle(const GrowthTree& tree, Natural J,
                                                Natural depth_budget) {
  if (depth_budget < J) throw Error("depth budget must be at least J");
  std::string u;
  if (!dfs_leftmost(tree, u, depth_budget)) return std::nullopt;
  return u.substr(0, J);
}

std::optional<Natural> n_of_J(const PathTrace& trace, std::string_view prefix) {
  for (std::size_t n = 0; n < trace.steps.size(); ++n)
    if (trace.steps[n] == prefix) return n;
  return std::nullopt;
}

bool right_of(std::string_view u, std::string_view path) {
  const auto len = std::min(u.size(), path.size());
  for (std::size_t i = 0; i < len; ++i)
    if (u[i] != path[i]) return u[i] == '1';
  return false;
}

PotentialSize potential_size(const GrowthTree& tree, std::string_view v, Natural depth_budget) {
  if (!tree.contains(v)) throw NotInTree("'" + std::string(v) + "' is not a node of " + tree.name());
  std::string u(v);
  const Natural deepest = dfs_deepest(tree, u, depth_budget);
  return {deepest, deepest >= depth_budget};
}

FertilityVerdict fertility(const GrowthTree& tree, std::string_view v, Natural probe_depth,
                           Natural visit_budget) {
  if (!tree.contains(v)) throw NotInTree("'" + std::string(v) + "' is not a node of " + tree.name());
  const Natural target = v.size() + probe_depth;
  Natural visited = 0;
  Natural deepest = v.size();
  bool out_of_budget = false;
  std::function<bool(std::string&)> dfs = [&](std::string& u) -> bool {
    if (++visited > visit_budget) {
      out_of_budget = true;
      return false;
    }
    deepest = std::max<Natural>(deepest, u.size());
    if (u.size() >= target) return true;
    for (char b : {'0', '1'}) {
      u.push_back(b);
      const bool hit = tree.contains(u) && dfs(u);
      u.pop_back();
      if (hit) return true;
      if (out_of_budget) return false;
    }
    return false;
  };
  std::string u(v);
  if (dfs(u)) return {Fertility::Fertile, probe_depth};
  if (out_of_budget) return {Fertility::Unknown, visit_budget};
  return {Fertility::Sterile, deepest};
}

AgreementThreshold agreement_threshold(const GrowthTree& tree, Natural J, Natural depth_budget) {
  const auto path = leftmost_path_oracle(tree, J, depth_budget);
  if (!path)
    throw NoPathWithinBudget("no path of depth " + std::to_string(depth_budget) + " in " +
                             tree.name());
  AgreementThreshold out;
  for (Natural i = 0; i < J; ++i) {
    std::string off = path->substr(0, i);
    off.push_back((*path)[i] == '0' ? '1' : '0');
    if (!tree.contains(off)) continue;
    const auto size = potential_size(tree, off, depth_budget);
    if (size.at_least) return {depth_budget, true};
    out.k = std::max(out.k, size.value);
  }
  return out;
}

// ---------------------------------------------------------------------------

KleeneTree kleene_tree(Natural budget) {
  if (budget == 0) throw Error("Kleene tree budget must be at least 1");
  std::vector<SeparationConstraint> constraints;
  for (Natural e = 0; e < budget; ++e) {
    const auto prog = resets::MachineFamily::decode(e);
    const auto st = prog.run(resets::initial_input(resets::InputCoding::SelfIndex, e), budget);
    if (!st.halted) continue;
    const Natural stage = std::max(e, st.steps);
    if (stage > budget) continue;
    constraints.push_back({e, st.registers[1] == 0, stage});
  }
  auto membership = [constraints](std::string_view u) {
    for (const auto& c : constraints)
      if (c.position < u.size() && c.discovered_at <= u.size() && (u[c.position] == '1') != c.bit)
        return false;
    return true;
  };
  return {GrowthTree("kleene-" + std::to_string(budget), std::move(membership)),
          std::move(constraints)};
}

}  // namespace analoglab::growth

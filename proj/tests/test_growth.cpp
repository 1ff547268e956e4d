#include <analoglab/growth.hpp>

#include "doctest.h"
#include "machine_oracle.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <set>

using namespace analoglab;
using namespace analoglab::growth;

namespace {

std::vector<std::string> all_strings(std::size_t max_len) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].size() < max_len)
      for (char b : {'0', '1'}) out.push_back(out[i] + b);
  return out;
}

// The explorer rules applied literally:
//   (ii)  u has a child: go to u0, or to u1 when that is the only child;
//   (iii) u terminal of the form v0 or v01...1: go to v1, and repeat the
//         rule while v1 is not a node; all-1s terminal u has no successor.
std::optional<std::string> reference_step(const GrowthTree& t, const std::string& u) {
  if (t.contains(u + "0")) return u + "0";
  if (t.contains(u + "1")) return u + "1";
  static const std::regex form("^([01]*)01*$");
  std::string w = u;
  for (;;) {
    std::smatch m;
    if (!std::regex_match(w, m, form)) return std::nullopt;
    w = m[1].str() + "1";
    if (t.contains(w)) return w;
  }
}

GrowthTree random_finite_tree(std::mt19937_64& rng, std::size_t max_len, double p) {
  std::vector<std::string> nodes{""};
  std::bernoulli_distribution keep(p);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].size() < max_len)
      for (char b : {'0', '1'})
        if (keep(rng)) nodes.push_back(nodes[i] + b);
  return GrowthTree::finite("random", nodes);
}

// Direct recomputation of the separation constraints with the independent
// interpreter.
struct Constraint {
  std::size_t position;
  char bit;
  std::size_t discovered_at;
};

std::vector<Constraint> replay_constraints(Natural budget) {
  std::vector<Constraint> out;
  for (Natural e = 0; e < budget; ++e) {
    Natural r1 = 0;
    const long long h = oracle::oracle_halting_time(e, e, budget, &r1);
    if (h < 0) continue;
    const auto stage = std::max<Natural>(e, static_cast<Natural>(h));
    if (stage <= budget) out.push_back({e, r1 == 0 ? '1' : '0', stage});
  }
  return out;
}

bool replay_contains(const std::vector<Constraint>& cs, const std::string& u) {
  for (std::size_t n = 0; n <= u.size(); ++n)
    for (const auto& c : cs)
      if (c.discovered_at <= n && c.position < n && u[c.position] != c.bit) return false;
  return true;
}

// Leftmost string of length D in the tree, by exhaustive enumeration.
std::optional<std::string> brute_leftmost(const GrowthTree& t, std::size_t D) {
  std::optional<std::string> best;
  for (const auto& u : all_strings(D))
    if (u.size() == D && t.contains(u) && (!best || u < *best)) best = u;
  return best;
}

const std::vector<std::string> kInfiniteTrees = {"full", "left-pruned", "no-11", "comb",
                                                 "thue-morse"};

}  // namespace

TEST_CASE("sample trees are downward closed and contain the root") {
  for (const auto& name : sample_tree_names()) {
    const auto t = sample_tree(name);
    CHECK(t.contains(""));
    CHECK(is_downward_closed(t, 12));
  }
  CHECK(is_downward_closed(kleene_tree(64).tree, 12));
  CHECK_THROWS_AS(sample_tree("oak"), Error);
  CHECK_THROWS_AS(GrowthTree::finite("bad", {"01"}), Error);
  CHECK_THROWS_AS(GrowthTree::finite("bad", {"2"}), Error);
  CHECK_THROWS_AS(GrowthTree("empty", [](std::string_view) { return false; }), Error);
  const GrowthTree not_closed("gap", [](std::string_view u) { return u.size() != 1; });
  CHECK_FALSE(is_downward_closed(not_closed, 3));
}

TEST_CASE("trial_step: worked examples") {
  CHECK(trial_step(GrowthTree::full(), "01") == std::optional<std::string>("010"));
  const auto small = GrowthTree::finite("t", {"0", "01", "011", "0110", "0111"});
  CHECK(trial_step(small, "0110") == std::optional<std::string>("0111"));
  const auto with_1 = GrowthTree::finite("t", {"0", "01", "011", "0111", "1"});
  CHECK(trial_step(with_1, "0111") == std::optional<std::string>("1"));
  CHECK_FALSE(trial_step(with_1, "1").has_value());
  CHECK_THROWS_AS(trial_step(with_1, "00"), NotInTree);
}

TEST_CASE("trial_step agrees with the literal rules on every node up to length 10") {
  std::vector<GrowthTree> trees;
  for (const auto& name : sample_tree_names()) trees.push_back(sample_tree(name));
  trees.push_back(kleene_tree(64).tree);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) trees.push_back(random_finite_tree(rng, 10, 0.7));
  const auto strings = all_strings(10);
  for (const auto& t : trees) {
    for (const auto& u : strings) {
      if (!t.contains(u)) {
        CHECK_THROWS_AS(trial_step(t, u), NotInTree);
        continue;
      }
      const auto got = trial_step(t, u);
      const auto want = reference_step(t, u);
      CHECK_MESSAGE(got == want, t.name() << " at '" << u << "'");
      if (got) CHECK(t.contains(*got));
      if (t.has_child(u)) {
        REQUIRE(got.has_value());
        CHECK(got->substr(0, u.size()) == u);
        CHECK(got->size() == u.size() + 1);
      } else if (got) {
        // The successor ends in 1 and lies strictly to the right of u.
        CHECK(got->back() == '1');
        CHECK(right_of(*got, u));
      } else {
        // Every right turn off u is missing from the tree.
        for (std::size_t i = 0; i < u.size(); ++i)
          if (u[i] == '0') CHECK_FALSE(t.contains(u.substr(0, i) + "1"));
      }
    }
  }
}

TEST_CASE("run_trial: worked traces") {
  const auto full = run_trial(GrowthTree::full(), 4);
  CHECK(full.steps == std::vector<std::string>{"", "0", "00", "000"});
  CHECK(full.status == TraceStatus::Running);
  CHECK(full.backtracks == std::vector<Natural>{0, 0, 0, 0});

  const GrowthTree zero_dead("zero-dead", [](std::string_view u) { return u.size() <= 1 || u[0] == '1'; });
  const auto z = run_trial(zero_dead, 4);
  CHECK(z.steps == std::vector<std::string>{"", "0", "1", "10"});
  CHECK(z.backtracks.back() == 1);

  const auto fin = run_trial(sample_tree("finite"), 100);
  CHECK(fin.steps == std::vector<std::string>{"", "0", "01", "1"});
  CHECK(fin.status == TraceStatus::ExhaustedRight);
  CHECK(run_trial(GrowthTree::full(), 0).steps.empty());

  const auto lp = run_trial(sample_tree("left-pruned"), 20);
  CHECK(n_of_J(lp, "10") == Natural{9});
  CHECK_FALSE(n_of_J(lp, "1000000000000").has_value());
}

TEST_CASE("run_trial: replay is deterministic and consecutive steps follow the rules") {
  for (const auto& name : sample_tree_names()) {
    const auto t = sample_tree(name);
    const auto a = run_trial(t, 500);
    const auto b = run_trial(t, 500);
    CHECK(a.steps == b.steps);
    CHECK(a.backtracks == b.backtracks);
    for (std::size_t n = 0; n + 1 < a.steps.size(); ++n) {
      CHECK(t.contains(a.steps[n]));
      CHECK(reference_step(t, a.steps[n]) == std::optional<std::string>(a.steps[n + 1]));
    }
  }
}

TEST_CASE("leftmost path oracle") {
  CHECK(leftmost_path_oracle(GrowthTree::full(), 3, 10) == std::optional<std::string>("000"));
  CHECK(leftmost_path_oracle(sample_tree("left-pruned"), 2, 10) == std::optional<std::string>("10"));
  CHECK(leftmost_path_oracle(sample_tree("comb"), 5, 20) == std::optional<std::string>("11111"));
  CHECK(leftmost_path_oracle(sample_tree("no-11"), 4, 20) == std::optional<std::string>("0000"));
  CHECK(leftmost_path_oracle(sample_tree("thue-morse"), 8, 30) ==
        std::optional<std::string>("01101001"));
  CHECK_FALSE(leftmost_path_oracle(sample_tree("finite"), 1, 5).has_value());
  CHECK_THROWS_AS(leftmost_path_oracle(GrowthTree::full(), 5, 4), Error);
  for (const auto& name : sample_tree_names()) {
    const auto t = sample_tree(name);
    for (std::size_t D = 1; D <= 12; ++D) {
      const auto want = brute_leftmost(t, D);
      const auto got = leftmost_path_oracle(t, D, D);
      CHECK(got == want);
    }
  }
}

TEST_CASE("explorer never goes right of the leftmost path and converges for J <= 12") {
  std::vector<GrowthTree> trees;
  for (const auto& name : kInfiniteTrees) trees.push_back(sample_tree(name));
  trees.push_back(kleene_tree(64).tree);
  for (const auto& t : trees) {
    const auto trace = run_trial(t, 3000);
    CHECK(trace.status == TraceStatus::Running);
    const Natural L = trace.max_length();
    const auto lambda = leftmost_path_oracle(t, L, 2 * L + 8);
    REQUIRE(lambda.has_value());
    for (const auto& u : trace.steps) CHECK_MESSAGE(!right_of(u, *lambda), t.name() << " '" << u << "'");
    for (Natural J = 0; J <= 12; ++J) {
      const auto n = n_of_J(trace, lambda->substr(0, J));
      CHECK_MESSAGE(n.has_value(), t.name() << " J=" << J);
      // Once reached, the prefix is never abandoned.
      if (n)
        for (std::size_t m = *n; m < trace.steps.size(); ++m)
          CHECK(trace.steps[m].substr(0, J) == lambda->substr(0, J));
    }
  }
}

TEST_CASE("Kleene tree matches a replay of the halting log") {
  for (Natural budget : {Natural{8}, Natural{24}, Natural{64}, Natural{120}}) {
    const auto k = kleene_tree(budget);
    const auto cs = replay_constraints(budget);
    REQUIRE(k.constraints.size() == cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      CHECK(k.constraints[i].position == cs[i].position);
      CHECK((k.constraints[i].bit ? '1' : '0') == cs[i].bit);
      CHECK(k.constraints[i].discovered_at == cs[i].discovered_at);
    }
    for (const auto& u : all_strings(11)) CHECK(k.tree.contains(u) == replay_contains(cs, u));
    // A constraint discovered at s rules out every longer node with the
    // wrong bit at its position.
    for (const auto& c : cs) {
      std::string u(std::max(c.position + 1, c.discovered_at) + 1, '0');
      u[c.position] = c.bit == '1' ? '0' : '1';
      CHECK_FALSE(k.tree.contains(u));
    }
  }
  CHECK_THROWS_AS(kleene_tree(0), Error);
  CHECK(kleene_tree(1).tree.contains(""));
}

TEST_CASE("Kleene tree is infinite at desk scale") {
  const auto trace = run_trial(kleene_tree(64).tree, 10000);
  CHECK(trace.steps.size() == 10000);
  CHECK(trace.status == TraceStatus::Running);
}

TEST_CASE("potential size against exhaustive enumeration") {
  std::mt19937_64 rng(22);
  std::vector<GrowthTree> trees;
  for (const auto& name : sample_tree_names()) trees.push_back(sample_tree(name));
  for (int i = 0; i < 10; ++i) trees.push_back(random_finite_tree(rng, 9, 0.65));
  const Natural D = 10;
  const auto strings = all_strings(D);
  for (const auto& t : trees) {
    for (const auto& v : strings) {
      if (v.size() > 6 || !t.contains(v)) continue;
      Natural deepest = 0;
      for (const auto& u : strings)
        if (u.compare(0, v.size(), v) == 0 && u.size() >= v.size() && t.contains(u))
          deepest = std::max<Natural>(deepest, u.size());
      const auto got = potential_size(t, v, D);
      CHECK(got.value == deepest);
      CHECK(got.at_least == (deepest >= D));
      if (!t.has_child(v)) CHECK(got.value == v.size());
    }
  }
  CHECK(potential_size(GrowthTree::full(), "0101", 12).at_least);
  CHECK_THROWS_AS(potential_size(sample_tree("finite"), "11", 5), NotInTree);
}

TEST_CASE("fertility verdicts") {
  const auto full = GrowthTree::full();
  const auto f = fertility(full, "01", 10, 1000);
  CHECK(f.verdict == Fertility::Fertile);
  CHECK(f.value == 10);
  const auto fin = sample_tree("finite");
  const auto s = fertility(fin, "0", 5, 1000);
  CHECK(s.verdict == Fertility::Sterile);
  CHECK(s.value == 2);
  const auto lp = sample_tree("left-pruned");
  CHECK(fertility(lp, "0", 5, 1000).verdict == Fertility::Sterile);
  CHECK(fertility(lp, "0", 5, 1000).value == 3);
  CHECK(fertility(lp, "1", 20, 1000).verdict == Fertility::Fertile);
  // A sterile subtree too large to clear within the visit budget.
  const GrowthTree bushy("bushy", [](std::string_view u) { return u.empty() || u[0] == '1' || u.size() <= 12; });
  const auto unknown = fertility(bushy, "0", 20, 100);
  CHECK(unknown.verdict == Fertility::Unknown);
  CHECK(unknown.value == 100);
  CHECK_THROWS_AS(fertility(fin, "00", 3, 10), NotInTree);
}

TEST_CASE("agreement threshold against exhaustive enumeration, monotone in J") {
  const Natural D = 14;
  const auto strings = all_strings(D);
  CHECK(agreement_threshold(GrowthTree::full(), 1, 20).capped);
  CHECK(agreement_threshold(sample_tree("left-pruned"), 1, 20).k == 3);
  CHECK_FALSE(agreement_threshold(sample_tree("left-pruned"), 1, 20).capped);
  CHECK_THROWS_AS(agreement_threshold(sample_tree("finite"), 1, 5), NoPathWithinBudget);
  for (const auto& name : kInfiniteTrees) {
    const auto t = sample_tree(name);
    const auto lambda = brute_leftmost(t, D);
    REQUIRE(lambda.has_value());
    Natural prev = 0;
    bool prev_capped = false;
    for (Natural J = 0; J <= 5; ++J) {
      Natural k = 0;
      bool capped = false;
      for (const auto& u : strings) {
        const auto n = std::min<std::size_t>(J, u.size());
        if (!t.contains(u) || u.compare(0, n, *lambda, 0, n) == 0) continue;
        k = std::max<Natural>(k, u.size());
        capped |= u.size() >= D;
      }
      const auto got = agreement_threshold(t, J, D);
      CHECK_MESSAGE(got.capped == capped, name << " J=" << J);
      if (!capped) CHECK_MESSAGE(got.k == k, name << " J=" << J);
      if (capped) CHECK(got.k == D);
      CHECK(got.k >= prev);
      CHECK((!prev_capped || got.capped));
      prev = got.k;
      prev_capped = got.capped;
    }
  }
}

TEST_CASE("right_of") {
  CHECK(right_of("1", "01"));
  CHECK_FALSE(right_of("00", "01"));
  CHECK_FALSE(right_of("01", "01"));
  CHECK_FALSE(right_of("0", "01"));
  CHECK_FALSE(right_of("011", "01"));
}

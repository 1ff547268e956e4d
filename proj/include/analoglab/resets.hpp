#pragma once

// The recursively enumerable set A, its repetition-free enumeration a(n),
// the waiting time nu(j), the bound beta(J), and Diophantine-style verifiers.
//
// Two sources of A are supported:
//   * a synthetic schedule of (j, nu(j)) pairs, so experiments can dial in
//     arbitrary waiting times;
//   * dovetailed runs of a family of 2-register Minsky machines.
//
// No operation here ever claims j is outside A. Searches are budgeted and
// report "not found within budget" instead.

#include <analoglab/common.hpp>

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace analoglab::resets {

// ---------------------------------------------------------------------------
// Register machines
// ---------------------------------------------------------------------------

enum class Opcode { Inc, DecOrJump, Halt };

/// One instruction. `target` is only meaningful for DecOrJump and may equal
/// the program length, which is the explicit end label.
struct Instruction {
  Opcode op = Opcode::Halt;
  unsigned reg = 0;
  std::size_t target = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct MachineState {
  std::size_t pc = 0;
  std::vector<Natural> registers;
  Natural steps = 0;
  bool halted = false;
};

/// A Minsky-style counter machine.
///
///   INC r       r += 1, continue
///   DJZ r L     if r > 0 then r -= 1 and continue, else jump to L
///   HALT        stop
///
/// Every executed instruction (HALT included) is one step. Running off the
/// end of the program, or jumping to the end label, halts without an extra
/// step.
class RegisterMachine {
 public:
  RegisterMachine(std::vector<Instruction> program, unsigned register_count = 2);

  /// Parses the line-based assembly format. One instruction per line;
  /// `name:` defines a label (alone or in front of an instruction); DJZ
  /// targets are label names, instruction indices, or `END`; `#` and `;`
  /// start comments. Mnemonics are case-insensitive.
  static RegisterMachine parse(std::string_view assembly, unsigned register_count = 2);

  const std::vector<Instruction>& program() const { return program_; }
  unsigned register_count() const { return register_count_; }
  std::size_t end_label() const { return program_.size(); }

  MachineState initial_state(std::span<const Natural> input) const;

  /// Executes one instruction. No-op when already halted.
  void step(MachineState& state) const;

  /// Runs from `input` for at most `max_steps` steps.
  MachineState run(std::span<const Natural> input, Natural max_steps) const;

  std::string to_assembly() const;

  friend bool operator==(const RegisterMachine&, const RegisterMachine&) = default;

 private:
  std::vector<Instruction> program_;
  unsigned register_count_;
};

/// How a program index is turned into the initial register contents.
enum class InputCoding {
  Zero,       // all registers 0
  SelfIndex,  // register 0 holds the program's own index
};

/// An indexed family of 2-register programs.
///
/// The enumerated family lists every program of length 1, then every program
/// of length 2, and so on. For length L the instruction alphabet has
/// 3 + 2(L+1) codes: 0 = HALT, 1 = INC r0, 2 = INC r1, and 3 + 2t + r =
/// DJZ r t for t in [0, L] (t = L is the end label). Instruction i of a
/// program is the i-th least significant digit of its offset within the
/// length-L block.
class MachineFamily {
 public:
  static MachineFamily enumerated();
  static MachineFamily listed(std::vector<RegisterMachine> programs);

  /// Program with index e; nullopt past the end of a listed family.
  std::optional<RegisterMachine> program(Natural e) const;

  /// Direct decoding used by the enumerated family.
  static RegisterMachine decode(Natural e);

  bool is_listed() const { return listed_.has_value(); }
  std::size_t listed_size() const { return listed_ ? listed_->size() : 0; }

 private:
  std::optional<std::vector<RegisterMachine>> listed_;
};

std::vector<Natural> initial_input(InputCoding coding, Natural program_index);

// ---------------------------------------------------------------------------
// Schedules and enumerators
// ---------------------------------------------------------------------------

struct ScheduleEntry {
  Natural j = 0;
  Natural nu = 0;
  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// A scripted enumeration: a(nu) = j for every entry. Indices not covered by
/// an entry are silent steps (nothing is emitted there).
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<ScheduleEntry> entries);

  /// Lines of `j nu` in decimal; `#` starts a comment.
  static Schedule parse(std::string_view text);
  static Schedule load(const std::string& path);

  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  /// Number of scripted indices, max nu + 1 (0 when empty).
  Natural length() const { return length_; }
  std::optional<Natural> nu_of(Natural j) const;
  std::optional<Natural> at(Natural n) const;

  std::string to_text() const;

 private:
  std::vector<ScheduleEntry> entries_;
  std::map<Natural, Natural> by_j_;
  std::map<Natural, Natural> by_nu_;
  Natural length_ = 0;
};

/// Repetition-free enumeration of A.
///
/// In synthetic mode enumerate(n) echoes the schedule and returns nullopt on
/// silent steps. In machine mode the dovetailer runs stage s = 0, 1, ...:
/// programs 0..s each get s steps; halts not seen before are emitted in
/// program-index order. Machine mode never produces silent steps.
///
/// The emitted-value cache makes enumerate() non-const; an instance must not
/// be driven from two threads at once.
class Enumerator {
 public:
  static Enumerator synthetic(Schedule schedule);
  static Enumerator dovetailed(MachineFamily family, InputCoding coding,
                               Natural max_stage = 1'000'000);

  std::optional<Natural> enumerate(Natural n);

  bool is_synthetic() const { return schedule_.has_value(); }
  const Schedule* schedule() const { return schedule_ ? &*schedule_ : nullptr; }

  /// Per-emission (program index, stage) log in machine mode.
  struct Emission {
    Natural program = 0;
    Natural stage = 0;
    Natural halting_steps = 0;
  };
  const std::vector<Emission>& emissions() const { return emissions_; }

 private:
  Enumerator() = default;
  void advance_stage();

  std::optional<Schedule> schedule_;

  std::optional<MachineFamily> family_;
  InputCoding coding_ = InputCoding::Zero;
  Natural max_stage_ = 0;
  Natural next_stage_ = 0;
  std::vector<MachineState> states_;
  std::vector<bool> present_;
  std::vector<Emission> emissions_;
};

/// Materialized prefix a(0..budget-1) with nu and beta lookups. Immutable
/// once built, so safe to share across threads.
class WaitingTimeTable {
 public:
  WaitingTimeTable(Enumerator& enumerator, Natural budget);

  Natural budget() const { return budget_; }
  /// Number of indices actually materialized (smaller than the budget when a
  /// synthetic schedule runs out).
  Natural searched() const { return static_cast<Natural>(prefix_.size()); }
  const std::vector<std::optional<Natural>>& prefix() const { return prefix_; }

  /// Found(n) or nullopt for ExhaustedAtBudget.
  std::optional<Natural> nu(Natural j) const;
  bool found(Natural j) const { return nu(j).has_value(); }
  Natural beta(Natural J) const;

 private:
  Natural budget_;
  std::vector<std::optional<Natural>> prefix_;
  std::map<Natural, Natural> nu_of_;
};

// ---------------------------------------------------------------------------
// Diophantine-style verifiers
// ---------------------------------------------------------------------------

/// Stand-in for the polynomial P_A(j, m_1..m_k): total, zero exactly at
/// membership witnesses. Counts evaluations so callers can check that the
/// verifier is consulted.
class DiophantineVerifier {
 public:
  explicit DiophantineVerifier(std::size_t arity);
  virtual ~DiophantineVerifier() = default;

  std::size_t arity() const { return arity_; }

  /// Throws ArityMismatch when witness.size() != arity().
  Natural verify(Natural j, std::span<const Natural> witness) const;

  Natural calls() const { return calls_.load(std::memory_order_relaxed); }

 protected:
  virtual Natural evaluate(Natural j, std::span<const Natural> witness) const = 0;

 private:
  std::size_t arity_;
  mutable std::atomic<Natural> calls_{0};
};

/// verify(j, m) = 0 iff m equals the scripted witness for j, otherwise
/// 1 + sum |m_i - w_i|; for j without a witness it is 1 + sum m_i. Changing
/// one coordinate of a zero by one therefore always gives a nonzero value.
class SyntheticVerifier final : public DiophantineVerifier {
 public:
  SyntheticVerifier(std::size_t arity, std::map<Natural, std::vector<Natural>> witnesses);

  /// Witness for j is (nu(j), 0, ..., 0): coordinate 1 codes the length of the
  /// enumeration trace that produced j.
  static std::shared_ptr<SyntheticVerifier> from_schedule(const Schedule& schedule,
                                                          std::size_t arity);

  const std::map<Natural, std::vector<Natural>>& witnesses() const { return witnesses_; }

 protected:
  Natural evaluate(Natural j, std::span<const Natural> witness) const override;

 private:
  std::map<Natural, std::vector<Natural>> witnesses_;
};

/// Verifier over the machine family: verify(j, m) = 0 iff program j halts in
/// exactly m_1 steps and every other coordinate is 0.
class MachineVerifier final : public DiophantineVerifier {
 public:
  MachineVerifier(std::size_t arity, MachineFamily family, InputCoding coding);

 protected:
  Natural evaluate(Natural j, std::span<const Natural> witness) const override;

 private:
  MachineFamily family_;
  InputCoding coding_;
};

/// Least n <= budget such that verify(j, m) = 0 for some m with every
/// component < n; nullopt when no such n exists within the budget.
std::optional<Natural> nu_dio(const DiophantineVerifier& verifier, Natural j, Natural budget);

}  // namespace analoglab::resets

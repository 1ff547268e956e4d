#include <analoglab/resets.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace analoglab::resets {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  const auto pos = line.find_first_of("#;");
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::optional<Natural> parse_natural(std::string_view s) {
  Natural v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

// ---------------------------------------------------------------------------

RegisterMachine::RegisterMachine(std::vector<Instruction> program, unsigned register_count)
    : program_(std::move(program)), register_count_(register_count) {
  if (register_count_ == 0) throw Error("register machine needs at least one register");
  for (std::size_t i = 0; i < program_.size(); ++i) {
    const auto& ins = program_[i];
    if (ins.op != Opcode::Halt && ins.reg >= register_count_)
      throw Error("instruction " + std::to_string(i) + " uses register " +
                  std::to_string(ins.reg) + " >= register count");
    if (ins.op == Opcode::DecOrJump && ins.target > program_.size())
      throw Error("instruction " + std::to_string(i) + " jumps past the end label");
  }
}

RegisterMachine RegisterMachine::parse(std::string_view assembly, unsigned register_count) {
  struct Pending {
    Opcode op;
    unsigned reg;
    std::string target;
    std::size_t line;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t> labels;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= assembly.size()) {
    auto end = assembly.find('\n', start);
    if (end == std::string_view::npos) end = assembly.size();
    auto line = trim(strip_comment(assembly.substr(start, end - start)));
    ++line_no;
    start = end + 1;

    while (!line.empty()) {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) break;
      const auto name = trim(line.substr(0, colon));
      if (!is_identifier(name))
        throw ParseError("line " + std::to_string(line_no) + ": bad label '" + std::string(name) + "'");
      const auto key = upper(std::string(name));
      if (key == "END")
        throw ParseError("line " + std::to_string(line_no) + ": END is reserved");
      if (!labels.emplace(key, pending.size()).second)
        throw ParseError("line " + std::to_string(line_no) + ": duplicate label " + std::string(name));
      line = trim(line.substr(colon + 1));
    }
    if (line.empty()) continue;

    const auto words = split_words(line);
    const auto mnemonic = upper(words[0]);
    auto reg_of = [&](const std::string& w) -> unsigned {
      std::string_view v = w;
      if (!v.empty() && (v[0] == 'r' || v[0] == 'R')) v.remove_prefix(1);
      const auto r = parse_natural(v);
      if (!r) throw ParseError("line " + std::to_string(line_no) + ": bad register '" + w + "'");
      return static_cast<unsigned>(*r);
    };
    if (mnemonic == "HALT" && words.size() == 1) {
      pending.push_back({Opcode::Halt, 0, {}, line_no});
    } else if (mnemonic == "INC" && words.size() == 2) {
      pending.push_back({Opcode::Inc, reg_of(words[1]), {}, line_no});
    } else if (mnemonic == "DJZ" && words.size() == 3) {
      pending.push_back({Opcode::DecOrJump, reg_of(words[1]), words[2], line_no});
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(line) + "'");
    }
  }

  std::vector<Instruction> program;
  program.reserve(pending.size());
  for (const auto& p : pending) {
    Instruction ins{p.op, p.reg, 0};
    if (p.op == Opcode::DecOrJump) {
      const auto key = upper(p.target);
      if (key == "END") {
        ins.target = pending.size();
      } else if (auto it = labels.find(key); it != labels.end()) {
        ins.target = it->second;
      } else if (auto n = parse_natural(p.target)) {
        ins.target = static_cast<std::size_t>(*n);
      } else {
        throw ParseError("line " + std::to_string(p.line) + ": unknown label " + p.target);
      }
    }
    program.push_back(ins);
  }
  try {
    return RegisterMachine(std::move(program), register_count);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

MachineState RegisterMachine::initial_state(std::span<const Natural> input) const {
  MachineState s;
  s.registers.assign(register_count_, 0);
  for (std::size_t i = 0; i < input.size() && i < register_count_; ++i) s.registers[i] = input[i];
  s.halted = program_.empty();
  return s;
}

void RegisterMachine::step(MachineState& s) const {
  if (s.halted) return;
  const auto& ins = program_[s.pc];
  ++s.steps;
  switch (ins.op) {
    case Opcode::Halt:
      s.halted = true;
      return;
    case Opcode::Inc:
      ++s.registers[ins.reg];
      ++s.pc;
      break;
    case Opcode::DecOrJump:
      if (s.registers[ins.reg] > 0) {
        --s.registers[ins.reg];
        ++s.pc;
      } else {
        s.pc = ins.target;
      }
      break;
  }
  if (s.pc >= program_.size()) s.halted = true;
}

MachineState RegisterMachine::run(std::span<const Natural> input, Natural max_steps) const {
  auto s = initial_state(input);
  while (!s.halted && s.steps < max_steps) step(s);
  return s;
}

std::string RegisterMachine::to_assembly() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < program_.size(); ++i) {
    const auto& ins = program_[i];
    out << "L" << i << ": ";
    switch (ins.op) {
      case Opcode::Halt: out << "HALT"; break;
      case Opcode::Inc: out << "INC r" << ins.reg; break;
      case Opcode::DecOrJump:
        out << "DJZ r" << ins.reg << ' ';
        if (ins.target == program_.size()) out << "END";
        else out << 'L' << ins.target;
        break;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

MachineFamily MachineFamily::enumerated() { return MachineFamily{}; }

MachineFamily MachineFamily::listed(std::vector<RegisterMachine> programs) {
  MachineFamily f;
  f.listed_ = std::move(programs);
  return f;
}

std::optional<RegisterMachine> MachineFamily::program(Natural e) const {
  if (listed_) {
    if (e >= listed_->size()) return std::nullopt;
    return (*listed_)[e];
  }
  return decode(e);
}

RegisterMachine MachineFamily::decode(Natural e) {
  Natural length = 1;
  Natural offset = e;
  for (;;) {
    const Natural alphabet = 3 + 2 * (length + 1);
    Natural block = 1;
    bool overflow = false;
    for (Natural i = 0; i < length; ++i) {
      if (block > offset / alphabet + 1) {
        overflow = true;
        break;
      }
      block *= alphabet;
    }
    if (overflow || offset < block) break;
    offset -= block;
    ++length;
  }
  const Natural alphabet = 3 + 2 * (length + 1);
  std::vector<Instruction> program;
  program.reserve(length);
  for (Natural i = 0; i < length; ++i) {
    const Natural code = offset % alphabet;
    offset /= alphabet;
    if (code == 0) program.push_back({Opcode::Halt, 0, 0});
    else if (code == 1) program.push_back({Opcode::Inc, 0, 0});
    else if (code == 2) program.push_back({Opcode::Inc, 1, 0});
    else {
      const Natural d = code - 3;
      program.push_back({Opcode::DecOrJump, static_cast<unsigned>(d % 2),
                         static_cast<std::size_t>(d / 2)});
    }
  }
  return RegisterMachine(std::move(program), 2);
}

std::vector<Natural> initial_input(InputCoding coding, Natural program_index) {
  if (coding == InputCoding::SelfIndex) return {program_index, 0};
  return {0, 0};
}

// ---------------------------------------------------------------------------

Schedule::Schedule(std::vector<ScheduleEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!by_j_.emplace(e.j, e.nu).second)
      throw Error("schedule lists j = " + std::to_string(e.j) + " twice");
    if (!by_nu_.emplace(e.nu, e.j).second)
      throw Error("schedule uses nu = " + std::to_string(e.nu) + " twice");
    length_ = std::max(length_, e.nu + 1);
  }
}

Schedule Schedule::parse(std::string_view text) {
  std::vector<ScheduleEntry> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
    const auto words = split_words(line);
    if (words.empty()) continue;
    if (words.size() != 2)
      throw ParseError("schedule line " + std::to_string(line_no) + ": expected `j nu`");
    const auto j = parse_natural(words[0]);
    const auto nu = parse_natural(words[1]);
    if (!j || !nu)
      throw ParseError("schedule line " + std::to_string(line_no) + ": not a decimal natural");
    entries.push_back({*j, *nu});
  }
  try {
    return Schedule(std::move(entries));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

Schedule Schedule::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schedule file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<Natural> Schedule::nu_of(Natural j) const {
  auto it = by_j_.find(j);
  if (it == by_j_.end()) return std::nullopt;
  return it->second;
}

std::optional<Natural> Schedule::at(Natural n) const {
  auto it = by_nu_.find(n);
  if (it == by_nu_.end()) return std::nullopt;
  return it->second;
}

std::string Schedule::to_text() const {
  std::ostringstream out;
  out << "# j nu(j)\n";
  for (const auto& e : entries_) out << e.j << ' ' << e.nu << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

Enumerator Enumerator::synthetic(Schedule schedule) {
  Enumerator e;
  e.schedule_ = std::move(schedule);
  return e;
}

Enumerator Enumerator::dovetailed(MachineFamily family, InputCoding coding, Natural max_stage) {
  Enumerator e;
  e.family_ = std::move(family);
  e.coding_ = coding;
  e.max_stage_ = max_stage;
  return e;
}

void Enumerator::advance_stage() {
  const Natural s = next_stage_++;
  // Program s joins at stage s.
  if (auto prog = family_->program(s)) {
    states_.push_back(prog->initial_state(initial_input(coding_, s)));
    present_.push_back(true);
  } else {
    states_.push_back(MachineState{});
    present_.push_back(false);
  }
  for (Natural e = 0; e <= s; ++e) {
    if (!present_[e]) continue;
    auto& st = states_[e];
    if (st.halted) continue;
    const auto prog = family_->program(e);
    while (!st.halted && st.steps < s) prog->step(st);
    if (st.halted && st.steps <= s) {
      emissions_.push_back({e, s, st.steps});
      present_[e] = false;
    }
  }
}

std::optional<Natural> Enumerator::enumerate(Natural n) {
  if (schedule_) {
    if (n >= schedule_->length())
      throw ScheduleExhausted("schedule has " + std::to_string(schedule_->length()) +
                              " indices; asked for a(" + std::to_string(n) + ")");
    return schedule_->at(n);
  }
  while (emissions_.size() <= n) {
    if (next_stage_ > max_stage_)
      throw ScheduleExhausted("dovetailer passed its stage limit " + std::to_string(max_stage_) +
                              " before a(" + std::to_string(n) + ")");
    advance_stage();
  }
  return emissions_[n].program;
}

// ---------------------------------------------------------------------------

WaitingTimeTable::WaitingTimeTable(Enumerator& enumerator, Natural budget) : budget_(budget) {
  for (Natural n = 0; n < budget; ++n) {
    std::optional<Natural> a;
    try {
      a = enumerator.enumerate(n);
    } catch (const ScheduleExhausted&) {
      break;
    }
    prefix_.push_back(a);
    if (a) nu_of_.emplace(*a, n);
  }
}

std::optional<Natural> WaitingTimeTable::nu(Natural j) const {
  auto it = nu_of_.find(j);
  if (it == nu_of_.end()) return std::nullopt;
  return it->second;
}

Natural WaitingTimeTable::beta(Natural J) const {
  Natural best = 0;
  for (auto it = nu_of_.begin(); it != nu_of_.end() && it->first < J; ++it)
    best = std::max(best, it->second);
  return best;
}

// ---------------------------------------------------------------------------

DiophantineVerifier::DiophantineVerifier(std::size_t arity) : arity_(arity) {
  if (arity_ == 0) throw Error("verifier arity must be at least 1");
}

Natural DiophantineVerifier::verify(Natural j, std::span<const Natural> witness) const {
  if (witness.size() != arity_)
    throw ArityMismatch("verifier expects " + std::to_string(arity_) + " witness components, got " +
                        std::to_string(witness.size()));
  calls_.fetch_add(1, std::memory_order_relaxed);
  return evaluate(j, witness);
}

SyntheticVerifier::SyntheticVerifier(std::size_t arity,
                                     std::map<Natural, std::vector<Natural>> witnesses)
    : DiophantineVerifier(arity), witnesses_(std::move(witnesses)) {
  for (const auto& [j, w] : witnesses_)
    if (w.size() != arity)
      throw ArityMismatch("witness for j = " + std::to_string(j) + " has wrong arity");
}

std::shared_ptr<SyntheticVerifier> SyntheticVerifier::from_schedule(const Schedule& schedule,
                                                                    std::size_t arity) {
  std::map<Natural, std::vector<Natural>> witnesses;
  for (const auto& e : schedule.entries()) {
    std::vector<Natural> w(arity, 0);
    w[0] = e.nu;
    witnesses.emplace(e.j, std::move(w));
  }
  return std::make_shared<SyntheticVerifier>(arity, std::move(witnesses));
}

Natural SyntheticVerifier::evaluate(Natural j, std::span<const Natural> m) const {
  auto it = witnesses_.find(j);
  Natural dist = 0;
  if (it == witnesses_.end()) {
    for (auto v : m) dist += v;
    return 1 + dist;
  }
  const auto& w = it->second;
  for (std::size_t i = 0; i < m.size(); ++i) dist += m[i] > w[i] ? m[i] - w[i] : w[i] - m[i];
  return dist == 0 ? 0 : 1 + dist;
}

MachineVerifier::MachineVerifier(std::size_t arity, MachineFamily family, InputCoding coding)
    : DiophantineVerifier(arity), family_(std::move(family)), coding_(coding) {}

Natural MachineVerifier::evaluate(Natural j, std::span<const Natural> m) const {
  Natural rest = 0;
  for (std::size_t i = 1; i < m.size(); ++i) rest += m[i];
  const auto prog = family_.program(j);
  if (!prog) return 1 + m[0] + rest;
  const auto st = prog->run(initial_input(coding_, j), m[0]);
  if (!st.halted) return 1 + rest;
  const Natural off = m[0] - st.steps;
  return off + rest == 0 ? 0 : 1 + off + rest;
}

std::optional<Natural> nu_dio(const DiophantineVerifier& verifier, Natural j, Natural budget) {
  const std::size_t k = verifier.arity();
  std::vector<Natural> m(k, 0);
  for (Natural n = 1; n <= budget; ++n) {
    // Shell of the cube [0, n)^k: points whose largest component is n - 1.
    std::fill(m.begin(), m.end(), 0);
    for (;;) {
      if (*std::max_element(m.begin(), m.end()) == n - 1 && verifier.verify(j, m) == 0) return n;
      std::size_t i = 0;
      while (i < k && ++m[i] == n) m[i++] = 0;
      if (i == k) break;
    }
  }
  return std::nullopt;
}

}  // namespace analoglab::resets

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core program model: finite-domain shared variables, per-process control
// automata with read/write/skip/fence instructions, and a reachability or
// safety objective over local states.

namespace tsogame {

using Val = uint8_t;      // index into Program::domain
using VarId = uint8_t;    // index into Program::vars
using StateId = uint16_t; // index into Process::states
using Pid = uint8_t;      // index into Program::procs

enum class Op : uint8_t { Read, Write, Skip, Fence };

struct Instruction {
    Op op = Op::Skip;
    VarId var = 0; // meaningful for Read/Write only
    Val val = 0;   // meaningful for Read/Write only

    static Instruction read(VarId x, Val d) { return {Op::Read, x, d}; }
    static Instruction write(VarId x, Val d) { return {Op::Write, x, d}; }
    static Instruction skip() { return {Op::Skip, 0, 0}; }
    static Instruction fence() { return {Op::Fence, 0, 0}; }

    bool uses_var() const { return op == Op::Read || op == Op::Write; }
    friend auto operator<=>(const Instruction&, const Instruction&) = default;
};

struct Transition {
    StateId from = 0;
    Instruction instr;
    StateId to = 0;
    friend auto operator<=>(const Transition&, const Transition&) = default;
};

struct Process {
    std::string id;
    std::vector<std::string> states;
    StateId initial = 0;
    std::vector<Transition> transitions; // kept in declaration order

    std::optional<StateId> state_index(const std::string& name) const {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return static_cast<StateId>(i);
        return std::nullopt;
    }
    friend bool operator==(const Process&, const Process&) = default;
};

struct Variable {
    std::string name;
    Val init = 0;
    friend bool operator==(const Variable&, const Variable&) = default;
};

enum class ObjectiveKind : uint8_t { Reachability, Safety };
enum class Fairness : uint8_t { None, Update, Process };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::Reachability;
    std::vector<std::pair<Pid, StateId>> targets; // target (reach) or bad (safety) local states
    Fairness fairness = Fairness::None;
    friend bool operator==(const Objective&, const Objective&) = default;
};

struct Program {
    std::vector<std::string> domain; // distinct value symbols
    std::vector<Variable> vars;
    std::vector<Process> procs;
    Objective objective;

    std::optional<Val> value_index(const std::string& v) const {
        for (size_t i = 0; i < domain.size(); ++i)
            if (domain[i] == v) return static_cast<Val>(i);
        return std::nullopt;
    }
    std::optional<VarId> var_index(const std::string& name) const {
        for (size_t i = 0; i < vars.size(); ++i)
            if (vars[i].name == name) return static_cast<VarId>(i);
        return std::nullopt;
    }
    std::optional<Pid> proc_index(const std::string& id) const {
        for (size_t i = 0; i < procs.size(); ++i)
            if (procs[i].id == id) return static_cast<Pid>(i);
        return std::nullopt;
    }
    bool is_target_state(Pid p, StateId s) const {
        for (auto& [tp, ts] : objective.targets)
            if (tp == p && ts == s) return true;
        return false;
    }
    friend bool operator==(const Program&, const Program&) = default;
};

inline std::string instr_to_string(const Program& p, const Instruction& in) {
    switch (in.op) {
    case Op::Read: return "read " + p.vars[in.var].name + " " + p.domain[in.val];
    case Op::Write: return "write " + p.vars[in.var].name + " " + p.domain[in.val];
    case Op::Skip: return "skip";
    case Op::Fence: return "fence";
    }
    return "?";
}

/// Outgoing (instruction, successor state) pairs of a local state.
inline std::vector<std::pair<Instruction, StateId>>
instruction_successors(const Process& proc, StateId state) {
    if (state >= proc.states.size())
        throw std::invalid_argument("instruction_successors: unknown state index " +
                                    std::to_string(state) + " in process " + proc.id);
    std::vector<std::pair<Instruction, StateId>> out;
    for (auto& t : proc.transitions)
        if (t.from == state) out.emplace_back(t.instr, t.to);
    return out;
}

struct Diagnostic {
    enum class Level : uint8_t { Error, Warning };
    Level level = Level::Error;
    std::string message;
};

// A reachability target must not be able to deadlock. Syntactic check: a state
// passes if it has an outgoing Skip or Write (always enabled), or if for some
// variable its outgoing reads cover the whole domain (then one read is always
// enabled, whatever value is readable). Anything else admits a configuration
// with no enabled instruction for this process: give each read variable a
// newest buffered message holding an uncovered value; the non-empty buffer
// also disables fences.
inline bool target_cannot_deadlock(const Program& p, const Process& proc, StateId state) {
    std::vector<std::vector<bool>> covered(p.vars.size(),
                                           std::vector<bool>(p.domain.size(), false));
    for (auto& t : proc.transitions) {
        if (t.from != state) continue;
        if (t.instr.op == Op::Skip || t.instr.op == Op::Write) return true;
        if (t.instr.op == Op::Read) covered[t.instr.var][t.instr.val] = true;
    }
    for (auto& per_var : covered) {
        bool all = !per_var.empty();
        for (bool c : per_var) all = all && c;
        if (all) return true;
    }
    return false;
}

/// Structural and semantic diagnostics; empty result means the program is well formed.
inline std::vector<Diagnostic> validate_program(const Program& p) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string m) { out.push_back({Diagnostic::Level::Error, std::move(m)}); };
    auto warning = [&](std::string m) { out.push_back({Diagnostic::Level::Warning, std::move(m)}); };

    if (p.domain.empty()) error("empty data domain");
    for (size_t i = 0; i < p.domain.size(); ++i)
        for (size_t j = i + 1; j < p.domain.size(); ++j)
            if (p.domain[i] == p.domain[j]) error("duplicate domain value " + p.domain[i]);
    if (p.vars.empty()) error("no variables declared");
    for (size_t i = 0; i < p.vars.size(); ++i) {
        if (p.vars[i].init >= p.domain.size())
            error("initial value of " + p.vars[i].name + " outside domain");
        for (size_t j = i + 1; j < p.vars.size(); ++j)
            if (p.vars[i].name == p.vars[j].name) error("duplicate variable " + p.vars[i].name);
    }
    if (p.procs.empty()) error("no processes declared");
    for (size_t i = 0; i < p.procs.size(); ++i)
        for (size_t j = i + 1; j < p.procs.size(); ++j)
            if (p.procs[i].id == p.procs[j].id) error("duplicate process id " + p.procs[i].id);
    for (auto& proc : p.procs) {
        if (proc.states.empty()) {
            error("process " + proc.id + " has no states");
            continue;
        }
        for (size_t i = 0; i < proc.states.size(); ++i)
            for (size_t j = i + 1; j < proc.states.size(); ++j)
                if (proc.states[i] == proc.states[j])
                    error("duplicate state " + proc.states[i] + " in process " + proc.id);
        if (proc.initial >= proc.states.size())
            error("initial state of process " + proc.id + " out of range");
        for (auto& t : proc.transitions) {
            if (t.from >= proc.states.size() || t.to >= proc.states.size())
                error("transition with unknown state in process " + proc.id);
            if (t.instr.uses_var()) {
                if (t.instr.var >= p.vars.size())
                    error("transition with unknown variable in process " + proc.id);
                if (t.instr.val >= p.domain.size())
                    error("transition with unknown value in process " + proc.id);
            }
        }
    }
    if (p.objective.targets.empty()) error("objective has no target states");
    for (auto& [pid, s] : p.objective.targets) {
        if (pid >= p.procs.size()) {
            error("objective references unknown process");
            continue;
        }
        if (s >= p.procs[pid].states.size()) {
            error("objective references unknown state in process " + p.procs[pid].id);
            continue;
        }
        if (p.objective.kind == ObjectiveKind::Reachability &&
            !target_cannot_deadlock(p, p.procs[pid], s))
            warning("target may deadlock: " + p.procs[pid].id + "." + p.procs[pid].states[s]);
    }
    if (p.objective.fairness == Fairness::Update &&
        p.objective.kind != ObjectiveKind::Reachability)
        error("update fairness requires a reachability objective");
    if (p.objective.fairness == Fairness::Process && p.objective.kind != ObjectiveKind::Safety)
        error("process fairness requires a safety objective");
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (auto& d : ds)
        if (d.level == Diagnostic::Level::Error) return true;
    return false;
}

/// Renders a program in the input language; parse(print(p)) reproduces p.
inline std::string print_program(const Program& p) {
    std::string s = "domain";
    for (auto& v : p.domain) s += " " + v;
    s += " ;\n";
    for (auto& v : p.vars) s += "var " + v.name + " = " + p.domain[v.init] + " ;\n";
    for (auto& proc : p.procs) {
        s += "process " + proc.id + " {\n";
        s += "  init " + proc.states[proc.initial] + " ;\n";
        for (auto& t : proc.transitions)
            s += "  " + proc.states[t.from] + " -> " + proc.states[t.to] + " : " +
                 instr_to_string(p, t.instr) + " ;\n";
        s += "}\n";
    }
    s += p.objective.kind == ObjectiveKind::Reachability ? "reach" : "avoid";
    for (auto& [pid, st] : p.objective.targets)
        s += " " + p.procs[pid].id + "." + p.procs[pid].states[st];
    s += " ;\n";
    switch (p.objective.fairness) {
    case Fairness::None: s += "fairness none ;\n"; break;
    case Fairness::Update: s += "fairness update ;\n"; break;
    case Fairness::Process: s += "fairness process ;\n"; break;
    }
    return s;
}

/// The one-process program P^i: same domain, variables and objective kind,
/// targets restricted to process i's local states.
inline Program restrict_program(const Program& p, Pid pid) {
    if (pid >= p.procs.size()) throw std::invalid_argument("restrict_program: no such process");
    Program q;
    q.domain = p.domain;
    q.vars = p.vars;
    q.procs = {p.procs[pid]};
    q.objective.kind = p.objective.kind;
    q.objective.fairness = p.objective.fairness;
    for (auto& [tp, ts] : p.objective.targets)
        if (tp == pid) q.objective.targets.emplace_back(Pid{0}, ts);
    return q;
}

} // namespace tsogame

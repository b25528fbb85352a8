#pragma once

#include <set>

#include "tsogame/arena.hpp"

// Load-buffer semantics: the dual of store buffering. A write lands in memory
// immediately and leaves an own-message behind; the environment speculatively
// appends future read values (propagate) and drops stale ones from the head
// (delete). A read is justified either by the newest own-message on its
// variable or, lacking one, by the message at the head of the buffer. Memory
// never changes on environment moves, which keeps the game finite once
// propagation is capped.

namespace tsogame {

struct LbMessage {
    VarId var = 0;
    Val val = 0;
    bool own = false; // left behind by this process's own write
    auto operator<=>(const LbMessage&) const = default;
};

using LbBuffer = std::vector<LbMessage>; // index 0 = head = oldest

struct LbConfig {
    std::vector<StateId> states;
    std::vector<LbBuffer> buffers;
    std::vector<Val> memory;
    auto operator<=>(const LbConfig&) const = default;
};

inline LbConfig initial_lb_config(const Program& p) {
    LbConfig c;
    for (auto& proc : p.procs) c.states.push_back(proc.initial);
    c.buffers.resize(p.procs.size());
    for (auto& v : p.vars) c.memory.push_back(v.init);
    return c;
}

/// The value a read of x would observe, if any: the newest own-message on x
/// wins; without one the head of the buffer must itself be an x-message.
inline std::optional<Val> lb_read_value(const LbConfig& c, Pid pid, VarId x) {
    const LbBuffer& buf = c.buffers[pid];
    for (auto it = buf.rbegin(); it != buf.rend(); ++it)
        if (it->own && it->var == x) return it->val;
    if (!buf.empty() && !buf.front().own && buf.front().var == x) return buf.front().val;
    return std::nullopt;
}

inline bool lb_instruction_enabled(const LbConfig& c, Pid pid, const Instruction& in) {
    switch (in.op) {
    case Op::Read: return lb_read_value(c, pid, in.var) == in.val;
    case Op::Write:
    case Op::Skip: return true;
    case Op::Fence: return c.buffers[pid].empty();
    }
    return false;
}

inline std::vector<Transition> lb_enabled_transitions(const Program& p, const LbConfig& c, Pid pid) {
    std::vector<Transition> out;
    for (auto& t : p.procs[pid].transitions)
        if (t.from == c.states[pid] && lb_instruction_enabled(c, pid, t.instr)) out.push_back(t);
    return out;
}

inline LbConfig lb_apply_transition(const LbConfig& c, Pid pid, const Transition& t) {
    if (!lb_instruction_enabled(c, pid, t.instr) || t.from != c.states[pid])
        throw std::invalid_argument("transition not enabled");
    LbConfig n = c;
    n.states[pid] = t.to;
    if (t.instr.op == Op::Write) {
        n.memory[t.instr.var] = t.instr.val; // memory first, then the trace of it
        n.buffers[pid].push_back({t.instr.var, t.instr.val, true});
    }
    return n;
}

/// Everything the environment can reach: any interleaving of propagate
/// (append the current memory value of some variable, while under cap) and
/// delete (drop the head). Memory is untouched throughout. Includes c.
inline std::vector<LbConfig> lb_env_closure(const LbConfig& c, int cap) {
    std::set<LbConfig> seen{c};
    std::vector<const LbConfig*> frontier{&*seen.begin()};
    while (!frontier.empty()) {
        std::vector<const LbConfig*> next;
        auto visit = [&](LbConfig n) {
            auto [it, fresh] = seen.insert(std::move(n));
            if (fresh) next.push_back(&*it);
        };
        for (const LbConfig* cur : frontier) {
            for (Pid pid = 0; pid < cur->buffers.size(); ++pid) {
                if (!cur->buffers[pid].empty()) {
                    LbConfig n = *cur;
                    n.buffers[pid].erase(n.buffers[pid].begin());
                    visit(std::move(n));
                }
                if (cur->buffers[pid].size() < static_cast<size_t>(cap)) {
                    for (VarId x = 0; x < cur->memory.size(); ++x) {
                        LbConfig n = *cur;
                        n.buffers[pid].push_back({x, n.memory[x], false});
                        visit(std::move(n));
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

using LbArena = Arena<LbConfig>;

inline LbArena build_lb_arena(const Program& p, int cap) {
    GameGraphBuilder b;
    struct Key {
        LbConfig cfg;
        Turn turn;
        Pid last_mover;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, uint32_t> ids;
    std::vector<Key> keys;
    bool truncated = false;

    auto intern = [&](LbConfig cfg, Turn turn, Pid last_mover) {
        Key k{std::move(cfg), turn, last_mover};
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        uint32_t v = b.add_node(turn, last_mover, hits_objective_states(p, k.cfg.states));
        ids.emplace(k, v);
        keys.push_back(std::move(k));
        return v;
    };

    uint32_t init = intern(initial_lb_config(p), Turn::A, 0);
    for (uint32_t v = 0; v < keys.size(); ++v) {
        const Key cur = keys[v];
        if (cur.turn == Turn::A) {
            for (Pid pid = 0; pid < p.procs.size(); ++pid) {
                for (auto& t : lb_enabled_transitions(p, cur.cfg, pid)) {
                    if (t.instr.op == Op::Write &&
                        cur.cfg.buffers[pid].size() >= static_cast<size_t>(cap)) {
                        truncated = true;
                        continue;
                    }
                    uint32_t w = intern(lb_apply_transition(cur.cfg, pid, t), Turn::B, pid);
                    b.add_edge(v, w, EdgeLabel::move(pid, t.instr));
                }
            }
        } else {
            for (auto& n : lb_env_closure(cur.cfg, cap))
                b.add_edge(v, intern(std::move(n), Turn::A, 0), EdgeLabel::update());
        }
    }

    LbArena arena;
    arena.graph = b.finish(init, p.objective.kind, p.objective.fairness);
    arena.graph.num_procs = static_cast<Pid>(p.procs.size());
    arena.graph.cap = cap;
    arena.graph.truncated = truncated;
    arena.configs.reserve(keys.size());
    for (auto& k : keys) arena.configs.push_back(std::move(k.cfg));
    arena.program = p;
    return arena;
}

/// Same layout as config_to_string; own messages carry a trailing `*`.
/// `s=[P1:q0] b=[P1:(x,1*)(x,0)] m=[x=1]`
inline std::string lb_config_to_string(const Program& p, const LbConfig& c) {
    std::string out = "s=[";
    for (Pid i = 0; i < c.states.size(); ++i) {
        if (i) out += ',';
        out += p.procs[i].id;
        out += ':';
        out += p.procs[i].states[c.states[i]];
    }
    out += "] b=[";
    for (Pid i = 0; i < c.buffers.size(); ++i) {
        if (i) out += '|';
        out += p.procs[i].id;
        out += ':';
        for (auto& m : c.buffers[i]) {
            out += '(';
            out += p.vars[m.var].name;
            out += ',';
            out += p.domain[m.val];
            if (m.own) out += '*';
            out += ')';
        }
    }
    out += "] m=[";
    for (VarId x = 0; x < c.memory.size(); ++x) {
        if (x) out += ',';
        out += p.vars[x].name;
        out += '=';
        out += p.domain[c.memory[x]];
    }
    out += ']';
    return out;
}

/// The three-process program separating the two semantics: P1 and P2 race
/// writes of 1 and 2 into x, P3 commits to seeing one order (branch at the
/// initial skip) and reaches its bad state only after observing both orders.
inline Program fig6_program() {
    Program p;
    p.domain = {"0", "1", "2"};
    p.vars = {{"x", 0}};
    Process p1{"P1", {"s1", "s2"}, 0, {{0, Instruction::write(0, 1), 1}}};
    Process p2{"P2", {"s1", "s2"}, 0, {{0, Instruction::write(0, 2), 1}}};
    Process p3{"P3", {"s1", "s2", "s3", "s4", "s5", "sF"}, 0, {}};
    auto t = [&](const char* from, const char* to, Instruction in) {
        p3.transitions.push_back({*p3.state_index(from), in, *p3.state_index(to)});
    };
    t("s1", "s2", Instruction::skip());
    t("s1", "s3", Instruction::skip());
    t("s2", "s2", Instruction::read(0, 0));
    t("s2", "s2", Instruction::read(0, 2));
    t("s3", "s3", Instruction::read(0, 0));
    t("s3", "s3", Instruction::read(0, 1));
    t("s2", "s4", Instruction::read(0, 1));
    t("s3", "s5", Instruction::read(0, 2));
    t("s4", "s4", Instruction::read(0, 1));
    t("s5", "s5", Instruction::read(0, 2));
    t("s4", "sF", Instruction::read(0, 2));
    t("s5", "sF", Instruction::read(0, 1));
    p.procs = {std::move(p1), std::move(p2), std::move(p3)};
    p.objective.kind = ObjectiveKind::Safety;
    p.objective.targets = {{2, *p.procs[2].state_index("sF")}};
    p.objective.fairness = Fairness::Process;
    return p;
}

} // namespace tsogame

#pragma once

#include <map>
#include <optional>
#include <set>

#include "tsogame/program.hpp"

// Store-buffer semantics. Every process owns a FIFO buffer of pending writes;
// buffers are kept oldest first, so index 0 is the next message to hit memory
// and push_back is the write end.

namespace tsogame {

struct Msg {
    VarId var;
    Val val;
    friend auto operator<=>(const Msg&, const Msg&) = default;
};

using Buffer = std::vector<Msg>;

struct TsoConfig {
    std::vector<StateId> states;
    std::vector<Buffer> buffers;
    std::vector<Val> memory;
    friend auto operator<=>(const TsoConfig&, const TsoConfig&) = default;
};

struct TsoConfigHash {
    size_t operator()(const TsoConfig& c) const {
        size_t h = c.states.size();
        auto mix = [&](size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
        for (auto s : c.states) mix(s);
        for (auto& b : c.buffers) {
            mix(b.size() + 0xff);
            for (auto m : b) mix((size_t(m.var) << 8) | m.val);
        }
        for (auto v : c.memory) mix(v);
        return h;
    }
};

inline TsoConfig initial_config(const Program& p) {
    TsoConfig c;
    c.states.reserve(p.procs.size());
    for (auto& proc : p.procs) c.states.push_back(proc.initial);
    c.buffers.resize(p.procs.size());
    c.memory.reserve(p.vars.size());
    for (auto& v : p.vars) c.memory.push_back(v.init);
    return c;
}

/// What a read of x by pid returns: the newest buffered write to x if there is
/// one, the shared memory otherwise.
inline Val visible_value(const TsoConfig& c, Pid pid, VarId x) {
    const Buffer& b = c.buffers[pid];
    for (auto it = b.rbegin(); it != b.rend(); ++it)
        if (it->var == x) return it->val;
    return c.memory[x];
}

inline bool instruction_enabled(const TsoConfig& c, Pid pid, const Instruction& in) {
    switch (in.op) {
    case Op::Read: return visible_value(c, pid, in.var) == in.val;
    case Op::Write: return true;
    case Op::Skip: return true;
    case Op::Fence: return c.buffers[pid].empty();
    }
    return false;
}

/// Enabled outgoing transitions of pid, in declaration order.
inline std::vector<Transition> enabled_transitions(const Program& p, const TsoConfig& c, Pid pid) {
    std::vector<Transition> out;
    for (auto& t : p.procs[pid].transitions)
        if (t.from == c.states[pid] && instruction_enabled(c, pid, t.instr)) out.push_back(t);
    return out;
}

/// Successor after pid takes transition t. t must be enabled at c.
inline TsoConfig apply_transition(const TsoConfig& c, Pid pid, const Transition& t) {
    TsoConfig n = c;
    n.states[pid] = t.to;
    if (t.instr.op == Op::Write) n.buffers[pid].push_back({t.instr.var, t.instr.val});
    return n;
}

/// Commit the oldest buffered write of pid to memory.
inline std::optional<TsoConfig> update_once(const TsoConfig& c, Pid pid) {
    if (c.buffers[pid].empty()) return std::nullopt;
    TsoConfig n = c;
    Msg m = n.buffers[pid].front();
    n.buffers[pid].erase(n.buffers[pid].begin());
    n.memory[m.var] = m.val;
    return n;
}

/// Everything reachable from c by committing buffered writes, in any order and
/// number (including zero). Sorted, so callers get a stable edge order.
inline std::vector<TsoConfig> update_closure(const TsoConfig& c) {
    std::set<TsoConfig> seen{c};
    std::vector<const TsoConfig*> frontier{&*seen.begin()};
    while (!frontier.empty()) {
        std::vector<const TsoConfig*> next;
        for (const TsoConfig* cur : frontier)
            for (Pid pid = 0; pid < cur->buffers.size(); ++pid)
                if (auto n = update_once(*cur, pid)) {
                    auto [it, fresh] = seen.insert(std::move(*n));
                    if (fresh) next.push_back(&*it);
                }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

/// update_closure memoised on the part that matters: local states never change
/// during updates, so the closure is a function of buffers and memory alone.
class UpdateClosureCache {
public:
    std::vector<TsoConfig> closure(const TsoConfig& c) {
        Key k{c.buffers, c.memory};
        auto it = cache_.find(k);
        if (it == cache_.end()) {
            std::vector<Key> res;
            for (auto& n : update_closure(c)) res.push_back({std::move(n.buffers), std::move(n.memory)});
            it = cache_.emplace(std::move(k), std::move(res)).first;
        }
        std::vector<TsoConfig> out;
        out.reserve(it->second.size());
        for (auto& [bufs, mem] : it->second) out.push_back({c.states, bufs, mem});
        return out;
    }

private:
    using Key = std::pair<std::vector<Buffer>, std::vector<Val>>;
    std::map<Key, std::vector<Key>> cache_;
};

/// One-line dump: states, buffers oldest first, then memory.
/// `s=[P1:q0,P2:q1] b=[P1:(x,1)|P2:] m=[x=0]`
inline std::string config_to_string(const Program& p, const TsoConfig& c) {
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

} // namespace tsogame

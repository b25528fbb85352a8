#pragma once

#include <map>

#include "tsogame/game.hpp"
#include "tsogame/tso.hpp"

// Explicit game arena over store-buffer configurations, bounded by a buffer
// capacity. A nodes offer the enabled instructions of every process, B nodes
// offer every outcome of committing buffered writes (including none). A write
// that would overflow the bound is dropped and the arena remembers that it is
// an under-approximation.

namespace tsogame {

template <class Config>
struct Arena {
    GameGraph graph;
    std::vector<Config> configs;
    Program program;
};

using SbArena = Arena<TsoConfig>;

/// A full game position: the store-buffer configuration plus whose turn it is
/// and, on B nodes, which process moved last.
struct GameConfig {
    TsoConfig base;
    Turn turn = Turn::A;
    Pid last_mover = 0; // 0 on A nodes
    auto operator<=>(const GameConfig&) const = default;
};

template <class Config>
GameConfig game_config(const Arena<Config>& a, uint32_t v) {
    return {a.configs[v], a.graph.nodes[v].turn, a.graph.nodes[v].last_mover};
}

inline bool hits_objective_states(const Program& p, const std::vector<StateId>& states) {
    for (auto& [pid, s] : p.objective.targets)
        if (states[pid] == s) return true;
    return false;
}

inline SbArena build_bounded_arena(const Program& p, int cap) {
    GameGraphBuilder b;
    std::map<GameConfig, uint32_t> ids;
    std::vector<GameConfig> keys;
    UpdateClosureCache closure;
    bool truncated = false;

    auto intern = [&](TsoConfig cfg, Turn turn, Pid last_mover) {
        GameConfig k{std::move(cfg), turn, last_mover};
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        uint32_t v = b.add_node(turn, last_mover, hits_objective_states(p, k.base.states));
        ids.emplace(k, v);
        keys.push_back(std::move(k));
        return v;
    };

    uint32_t init = intern(initial_config(p), Turn::A, 0);
    for (uint32_t v = 0; v < keys.size(); ++v) {
        const GameConfig cur = keys[v]; // keys grows while we expand
        if (cur.turn == Turn::A) {
            for (Pid pid = 0; pid < p.procs.size(); ++pid) {
                for (auto& t : enabled_transitions(p, cur.base, pid)) {
                    if (t.instr.op == Op::Write &&
                        cur.base.buffers[pid].size() >= static_cast<size_t>(cap)) {
                        truncated = true;
                        continue;
                    }
                    uint32_t w = intern(apply_transition(cur.base, pid, t), Turn::B, pid);
                    b.add_edge(v, w, EdgeLabel::move(pid, t.instr));
                }
            }
        } else {
            for (auto& n : closure.closure(cur.base))
                b.add_edge(v, intern(std::move(n), Turn::A, 0), EdgeLabel::update());
        }
    }

    SbArena arena;
    arena.graph = b.finish(init, p.objective.kind, p.objective.fairness);
    arena.graph.num_procs = static_cast<Pid>(p.procs.size());
    arena.graph.cap = cap;
    arena.graph.truncated = truncated;
    arena.configs.reserve(keys.size());
    for (auto& k : keys) arena.configs.push_back(std::move(k.base));
    arena.program = p;
    return arena;
}

/// Projection onto one process: its control state and buffer plus the shared
/// memory. Everything the process itself can observe.
inline TsoConfig restrict_config(const TsoConfig& c, Pid iota) {
    if (iota >= c.states.size()) throw std::invalid_argument("no such process");
    TsoConfig r;
    r.states = {c.states[iota]};
    r.buffers = {c.buffers[iota]};
    r.memory = c.memory;
    return r;
}

/// Inverse of restrict_config against a fixed background: process iota comes
/// from the restricted configuration (including the memory it saw), everyone
/// else stays as in base.
inline TsoConfig extend_config(const TsoConfig& restricted, const TsoConfig& base, Pid iota) {
    if (restricted.states.size() != 1 || restricted.buffers.size() != 1)
        throw std::invalid_argument("restricted configuration must have exactly one process");
    if (iota >= base.states.size()) throw std::invalid_argument("no such process");
    TsoConfig e = base;
    e.states[iota] = restricted.states[0];
    e.buffers[iota] = restricted.buffers[0];
    e.memory = restricted.memory;
    return e;
}

/// Transports an A strategy for the one-process game of iota onto the full
/// arena: wherever the full configuration restricts to a position the small
/// strategy covers, play the same instruction. A chosen write that fell off
/// the bounded arena stays undefined (exploration boundary); an instruction
/// that is plain disabled means the caller lifted across diverged memory and
/// is an error.
inline PositionalStrategy lift_strategy(const SbArena& full, const SbArena& single,
                                        const PositionalStrategy& s_single, Pid iota) {
    if (s_single.owner != Turn::A) throw std::invalid_argument("only A strategies lift");
    const GameGraph& g = full.graph;
    const GameGraph& h = single.graph;
    std::map<TsoConfig, uint32_t> small; // A nodes of the one-process arena
    for (uint32_t u = 0; u < h.node_count(); ++u)
        if (h.nodes[u].turn == Turn::A) small.emplace(single.configs[u], u);

    PositionalStrategy s{Turn::A, std::vector<int32_t>(g.node_count(), -1)};
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.nodes[v].turn != Turn::A) continue;
        auto it = small.find(restrict_config(full.configs[v], iota));
        if (it == small.end()) continue;
        int32_t cu = s_single.choice[it->second];
        if (cu < 0) continue;
        const Instruction& instr = h.edge_label[cu].instr;
        StateId succ = single.configs[h.edge_to[cu]].states[0];
        bool placed = false;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e) {
            const EdgeLabel& l = g.edge_label[e];
            if (l.env || l.pid != iota || l.instr != instr) continue;
            if (full.configs[g.edge_to[e]].states[iota] != succ) continue;
            s.choice[v] = static_cast<int32_t>(e);
            placed = true;
            break;
        }
        if (!placed && !instruction_enabled(full.configs[v], iota, instr))
            throw std::runtime_error("lifted strategy picks a disabled instruction");
    }
    return s;
}

/// First position of the play that starves a pending buffer: an A turn with no
/// process able to move while some write is still buffered. Infinite plays and
/// plays ending in other kinds of dead ends are fair.
inline std::optional<size_t> check_update_fairness(const SbArena& a, const Play& play) {
    for (size_t k = 0; k < play.nodes.size(); ++k) {
        uint32_t v = play.nodes[k];
        if (a.graph.nodes[v].turn != Turn::A) continue;
        const TsoConfig& c = a.configs[v];
        bool pending = false;
        for (auto& buf : c.buffers) pending |= !buf.empty();
        if (!pending) continue;
        bool stuck = true;
        for (Pid pid = 0; pid < a.program.procs.size() && stuck; ++pid)
            stuck = enabled_transitions(a.program, c, pid).empty();
        if (stuck) return k;
    }
    return std::nullopt;
}

/// B strategy that never commits anything: every B node keeps its exact
/// configuration through the closure's zero-commit edge.
template <class Config>
PositionalStrategy never_update_strategy(const Arena<Config>& a) {
    const GameGraph& g = a.graph;
    PositionalStrategy s{Turn::B, std::vector<int32_t>(g.node_count(), -1)};
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.nodes[v].turn != Turn::B) continue;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (a.configs[g.edge_to[e]] == a.configs[v]) {
                s.choice[v] = static_cast<int32_t>(e);
                break;
            }
    }
    return s;
}

/// A strategy that moves process pid whenever it can, anything else otherwise.
template <class Config>
PositionalStrategy only_process_strategy(const Arena<Config>& a, Pid pid) {
    const GameGraph& g = a.graph;
    PositionalStrategy s{Turn::A, std::vector<int32_t>(g.node_count(), -1)};
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.nodes[v].turn != Turn::A || g.out_degree(v) == 0) continue;
        int32_t fallback = static_cast<int32_t>(g.edge_start[v]);
        s.choice[v] = fallback;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (!g.edge_label[e].env && g.edge_label[e].pid == pid) {
                s.choice[v] = static_cast<int32_t>(e);
                break;
            }
    }
    return s;
}

} // namespace tsogame

#pragma once

#include <random>

#include "tsogame/dot.hpp"
#include "tsogame/loadbuffer.hpp"

// Seeded random playouts over a built arena. The same seed always yields the
// same transcript: the engine is std::mt19937_64, which the standard pins down
// bit for bit, and edges are stored in deterministic construction order.

namespace tsogame {

struct SimulationOptions {
    uint64_t seed = 0;
    int max_steps = 60;
    bool passive_b = false;                       // B keeps the configuration unchanged
    const PositionalStrategy* follow_a = nullptr; // play these A choices where defined
    const PositionalStrategy* follow_b = nullptr;
};

struct Simulation {
    std::vector<std::string> transcript; // one line per position
    std::vector<std::string> notes;
    bool reached_flag = false; // entered a node carrying the objective flag
    bool deadlocked = false;
};

inline bool process_stuck(const Program& p, const TsoConfig& c) {
    for (Pid pid = 0; pid < p.procs.size(); ++pid)
        if (!enabled_transitions(p, c, pid).empty()) return false;
    return true;
}

inline bool process_stuck(const Program& p, const LbConfig& c) {
    for (Pid pid = 0; pid < p.procs.size(); ++pid)
        if (!lb_enabled_transitions(p, c, pid).empty()) return false;
    return true;
}

template <class Config>
bool buffers_pending(const Config& c) {
    for (auto& b : c.buffers)
        if (!b.empty()) return true;
    return false;
}

template <class Config, class Printer>
Simulation simulate_arena(const Arena<Config>& a, const SimulationOptions& opt, Printer&& print) {
    const GameGraph& g = a.graph;
    std::mt19937_64 rng(opt.seed);
    Simulation sim;

    uint32_t v = g.initial;
    sim.transcript.push_back("0  start  " + print(a.program, a.configs[v]));
    const char* flag_name =
        g.objective == ObjectiveKind::Reachability ? "target state" : "bad state";
    if (g.nodes[v].target) {
        sim.reached_flag = true;
        sim.notes.push_back(std::string(flag_name) + " at the initial configuration");
        return sim;
    }

    for (int step = 1; step <= opt.max_steps; ++step) {
        uint32_t deg = g.out_degree(v);
        if (deg == 0) {
            sim.deadlocked = true;
            sim.notes.push_back("no move available after " + std::to_string(step - 1) + " steps");
            if (g.nodes[v].turn == Turn::A && buffers_pending(a.configs[v])) {
                if (process_stuck(a.program, a.configs[v])) {
                    if (g.fairness == Fairness::Update)
                        sim.notes.push_back("W_U violated: the process player is stranded "
                                            "with buffered writes never committed");
                } else if (g.truncated) {
                    sim.notes.push_back("dead end is a bound artifact: an instruction is "
                                        "enabled but its write exceeds the cap");
                }
            }
            return sim;
        }

        uint32_t e = g.edge_start[v];
        if (g.nodes[v].turn == Turn::A) {
            if (opt.follow_a && opt.follow_a->choice[v] >= 0)
                e = static_cast<uint32_t>(opt.follow_a->choice[v]);
            else
                e += static_cast<uint32_t>(rng() % deg);
        } else if (opt.follow_b && opt.follow_b->choice[v] >= 0) {
            e = static_cast<uint32_t>(opt.follow_b->choice[v]);
        } else if (opt.passive_b) {
            // both move closures contain the do-nothing element, so this finds one
            for (uint32_t cand = e; cand < g.edge_start[v + 1]; ++cand)
                if (a.configs[g.edge_to[cand]] == a.configs[v]) {
                    e = cand;
                    break;
                }
        } else {
            e += static_cast<uint32_t>(rng() % deg);
        }

        v = g.edge_to[e];
        sim.transcript.push_back(std::to_string(step) + "  " +
                                 edge_label_to_string(a.program, g.edge_label[e]) + "  " +
                                 print(a.program, a.configs[v]));
        if (g.nodes[v].target) {
            sim.reached_flag = true;
            sim.notes.push_back(std::string(flag_name) + " reached after " +
                                std::to_string(step) + " steps");
            return sim;
        }
    }
    sim.notes.push_back("step budget exhausted");
    return sim;
}

} // namespace tsogame

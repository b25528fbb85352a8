#pragma once

// Random-program corpus shared by the property suites. Deliberately small
// programs (the interesting behaviours all fit), with targets never placed on
// initial states so that safety objectives are not lost before the first move.

#include <random>

#include "tsogame/program.hpp"

namespace testsupport {

struct CorpusOpts {
    int procs = 2;
    int max_states = 5;
    int vars = 2;
    int domain = 2;
    bool fences = true;
    bool both_kinds = true; // mix reachability and safety objectives
};

inline tsogame::Program random_program(std::mt19937& rng, const CorpusOpts& o = {}) {
    using namespace tsogame;
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint32_t>(n)); };

    Program p;
    for (int d = 0; d < o.domain; ++d) p.domain.push_back(std::to_string(d));
    const char* names[] = {"x", "y", "z", "w"};
    for (int v = 0; v < o.vars; ++v)
        p.vars.push_back({names[v], static_cast<Val>(pick(o.domain))});

    for (int i = 0; i < o.procs; ++i) {
        Process proc;
        proc.id = "P" + std::to_string(i + 1);
        int n = 2 + pick(o.max_states - 1);
        for (int s = 0; s < n; ++s) proc.states.push_back("q" + std::to_string(s));
        int m = n + pick(n + 1);
        for (int t = 0; t < m; ++t) {
            Instruction in;
            switch (pick(o.fences ? 7 : 6)) {
            case 0:
            case 1:
            case 2:
                in = Instruction::read(static_cast<VarId>(pick(o.vars)),
                                       static_cast<Val>(pick(o.domain)));
                break;
            case 3:
            case 4:
                in = Instruction::write(static_cast<VarId>(pick(o.vars)),
                                        static_cast<Val>(pick(o.domain)));
                break;
            case 5: in = Instruction::skip(); break;
            default: in = Instruction::fence(); break;
            }
            proc.transitions.push_back(
                {static_cast<StateId>(pick(n)), in, static_cast<StateId>(pick(n))});
        }
        p.procs.push_back(std::move(proc));
    }

    p.objective.kind = o.both_kinds && pick(2) ? ObjectiveKind::Safety : ObjectiveKind::Reachability;
    int targets = 1 + pick(2);
    for (int t = 0; t < targets; ++t) {
        Pid pid = static_cast<Pid>(pick(o.procs));
        int n = static_cast<int>(p.procs[pid].states.size());
        StateId s = static_cast<StateId>(1 + pick(n - 1)); // never the initial state
        if (!std::count(p.objective.targets.begin(), p.objective.targets.end(),
                        std::pair{pid, s}))
            p.objective.targets.emplace_back(pid, s);
    }
    return p;
}

} // namespace testsupport

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tsogame/pcs.hpp"
#include "tsogame/program.hpp"

// Compiles a perfect channel system into a TSO program whose game verdict
// mirrors channel reachability. P1 walks the channel automaton: a send puts
// the message into P1's store buffer, a receive waits until P2 has rotated
// the matching message into x_r. P2 forever moves the oldest pending message
// from x_w to x_r, so the store buffer of P1 plays the role of the channel.
// Under the update-fair objective the automaton player wins iff the channel
// system can reach its final state; the process-fair variant swaps the roles.
// A channel bounded to b messages corresponds to buffers capped at b + 2.
//
// Generated names carry a '$' prefix, which the input languages reserve:
// values $bot and $d<i>, every P2 state, and the helper states of P1.
// Variables are x_w, x_r, y and, under process fairness, z; the domain
// lists $bot first and then the messages, so message i has value i + 1.

namespace tsogame {

namespace detail {

inline void check_pcs(const Pcs& s) {
    auto dup = [](const std::vector<std::string>& xs) -> const std::string* {
        for (size_t i = 0; i < xs.size(); ++i)
            for (size_t j = i + 1; j < xs.size(); ++j)
                if (xs[i] == xs[j]) return &xs[i];
        return nullptr;
    };
    for (auto& n : s.states)
        if (!n.empty() && n[0] == '$')
            throw std::invalid_argument("pcs state name uses the reserved '$' prefix: " + n);
    for (auto& n : s.messages)
        if (!n.empty() && n[0] == '$')
            throw std::invalid_argument("pcs message name uses the reserved '$' prefix: " + n);
    if (const std::string* d = dup(s.states))
        throw std::invalid_argument("duplicate pcs state " + *d);
    if (const std::string* d = dup(s.messages))
        throw std::invalid_argument("duplicate pcs message " + *d);
    if (s.initial >= s.states.size() || s.final_state >= s.states.size())
        throw std::invalid_argument("pcs initial or final state out of range");
    for (auto& t : s.transitions) {
        if (t.from >= s.states.size() || t.to >= s.states.size())
            throw std::invalid_argument("pcs transition endpoint out of range");
        if (t.op != PcsOp::Nop && t.msg >= s.messages.size())
            throw std::invalid_argument("pcs transition message out of range");
    }
    for (uint32_t m : s.initial_channel)
        if (m >= s.messages.size())
            throw std::invalid_argument("pcs initial channel message out of range");
    if (s.states.size() > 1000 || s.messages.size() + 4 > 255 || s.transitions.size() + 4 > 255 ||
        s.initial_channel.size() > 1000)
        throw std::invalid_argument("pcs too large to compile");
}

inline StateId fresh_state(Process& p, const std::string& name) {
    p.states.push_back(name);
    return static_cast<StateId>(p.states.size() - 1);
}

inline Val message_value(uint32_t msg) { return static_cast<Val>(msg + 1); }

// The rotation cycle: grab the oldest visible message from x_w, offer it in
// x_r, then resynchronize with the sender through y and two fences before
// clearing both variables for the next round. The escape edges fire when a
// value survives where the protocol requires it gone; they make a botched
// rotation observable instead of stuck.
inline Process rotation_process(const Pcs& s, Val bot, Val zero, Val one) {
    const VarId xw = 0, xr = 1, y = 2;
    Process p2;
    p2.id = "P2";
    StateId s1 = fresh_state(p2, "$s1");
    p2.initial = s1;
    std::vector<StateId> grabbed(s.messages.size());
    for (uint32_t m = 0; m < s.messages.size(); ++m)
        grabbed[m] = fresh_state(p2, "$sm_" + s.messages[m]);
    StateId s3 = fresh_state(p2, "$s3");
    StateId s4 = fresh_state(p2, "$s4");
    StateId s5 = fresh_state(p2, "$s5");
    StateId s6 = fresh_state(p2, "$s6");
    StateId s7 = fresh_state(p2, "$s7");
    StateId s8 = fresh_state(p2, "$s8");
    StateId s9 = fresh_state(p2, "$s9");
    StateId s10 = fresh_state(p2, "$s10");
    StateId s11 = fresh_state(p2, "$s11");
    StateId sf = fresh_state(p2, "$sF");

    for (uint32_t m = 0; m < s.messages.size(); ++m) {
        p2.transitions.push_back({s1, Instruction::read(xw, message_value(m)), grabbed[m]});
        p2.transitions.push_back({grabbed[m], Instruction::write(xr, message_value(m)), s3});
    }
    p2.transitions.push_back({s3, Instruction::write(xw, bot), s4});
    p2.transitions.push_back({s4, Instruction::fence(), s5});
    p2.transitions.push_back({s5, Instruction::read(y, zero), s6});
    p2.transitions.push_back({s6, Instruction::read(y, one), s7});
    p2.transitions.push_back({s7, Instruction::write(y, zero), s8});
    p2.transitions.push_back({s8, Instruction::fence(), s9});
    p2.transitions.push_back({s9, Instruction::read(xw, bot), s10});
    p2.transitions.push_back({s10, Instruction::write(xr, bot), s11});
    p2.transitions.push_back({s11, Instruction::fence(), s1});
    p2.transitions.push_back({s5, Instruction::read(y, one), sf});
    p2.transitions.push_back({s6, Instruction::read(y, zero), sf});
    for (uint32_t m = 0; m < s.messages.size(); ++m)
        p2.transitions.push_back({s9, Instruction::read(xw, message_value(m)), sf});
    return p2;
}

// A non-empty initial channel is sent before the automaton starts, head
// first, with full send gadgets: the y writes take part in the rotation
// handshake like any later send.
inline void append_preamble(Process& p1, const Pcs& s, Val one) {
    const VarId xw = 0, y = 2;
    StateId entry = static_cast<StateId>(s.initial);
    if (s.initial_channel.empty()) {
        p1.initial = entry;
        return;
    }
    StateId cur = fresh_state(p1, "$pre0");
    p1.initial = cur;
    for (size_t i = 0; i < s.initial_channel.size(); ++i) {
        StateId mid = fresh_state(p1, "$pre" + std::to_string(i) + "h");
        StateId next = i + 1 == s.initial_channel.size()
                           ? entry
                           : fresh_state(p1, "$pre" + std::to_string(i + 1));
        p1.transitions.push_back(
            {cur, Instruction::write(xw, message_value(s.initial_channel[i])), mid});
        p1.transitions.push_back({mid, Instruction::write(y, one), next});
        cur = next;
    }
}

} // namespace detail

/// Channel reachability as an update-fair reachability game: the automaton
/// player wins iff the channel system reaches its final state (channels
/// bounded to b, buffers capped at b + 2).
inline Program gen_update_fair_program(const Pcs& s) {
    detail::check_pcs(s);
    Program p;
    p.domain.push_back("$bot");
    for (auto& m : s.messages) p.domain.push_back(m);
    auto intern_value = [&p](const std::string& v) -> Val {
        if (auto i = p.value_index(v)) return *i;
        p.domain.push_back(v);
        return static_cast<Val>(p.domain.size() - 1);
    };
    const Val bot = 0;
    const Val zero = intern_value("0");
    const Val one = intern_value("1");
    const VarId xw = 0, xr = 1, y = 2;
    p.vars = {{"x_w", bot}, {"x_r", bot}, {"y", zero}};

    Process p1;
    p1.id = "P1";
    p1.states = s.states;
    detail::append_preamble(p1, s, one);
    for (size_t t = 0; t < s.transitions.size(); ++t) {
        const PcsTransition& d = s.transitions[t];
        StateId from = static_cast<StateId>(d.from);
        StateId to = static_cast<StateId>(d.to);
        switch (d.op) {
        case PcsOp::Nop:
            p1.transitions.push_back({from, Instruction::skip(), to});
            break;
        case PcsOp::Send: {
            StateId h = detail::fresh_state(p1, "$g" + std::to_string(t) + "a");
            p1.transitions.push_back({from, Instruction::write(xw, detail::message_value(d.msg)), h});
            p1.transitions.push_back({h, Instruction::write(y, one), to});
            break;
        }
        case PcsOp::Recv: {
            StateId h1 = detail::fresh_state(p1, "$g" + std::to_string(t) + "a");
            StateId h2 = detail::fresh_state(p1, "$g" + std::to_string(t) + "b");
            p1.transitions.push_back({from, Instruction::skip(), h1});
            p1.transitions.push_back({h1, Instruction::read(xr, detail::message_value(d.msg)), h2});
            p1.transitions.push_back({h2, Instruction::read(xr, bot), to});
            break;
        }
        }
    }

    Process p2 = detail::rotation_process(s, bot, zero, one);
    StateId p2f = *p2.state_index("$sF");
    p.procs = {std::move(p1), std::move(p2)};
    p.objective.kind = ObjectiveKind::Reachability;
    p.objective.targets = {{Pid{0}, static_cast<StateId>(s.final_state)}, {Pid{1}, p2f}};
    p.objective.fairness = Fairness::Update;
    return p;
}

/// Channel reachability as a process-fair safety game with the roles
/// reversed: the update player drives the automaton by scheduling transition
/// tokens through z, and fairness forces the automaton player to follow. The
/// update player wins iff the channel system reaches its final state. The
/// escape edges let P1 retire to a safe sink whenever a message shows up in
/// x_r outside the matching receive, so only faithful schedules win.
inline Program gen_process_fair_program(const Pcs& s) {
    detail::check_pcs(s);
    Program p;
    p.domain.push_back("$bot");
    for (auto& m : s.messages) p.domain.push_back(m);
    auto intern_value = [&p](const std::string& v) -> Val {
        if (auto i = p.value_index(v)) return *i;
        p.domain.push_back(v);
        return static_cast<Val>(p.domain.size() - 1);
    };
    const Val bot = 0;
    const Val zero = intern_value("0");
    const Val one = intern_value("1");
    std::vector<Val> token(s.transitions.size());
    for (size_t t = 0; t < s.transitions.size(); ++t)
        token[t] = intern_value("$d" + std::to_string(t));
    const VarId xw = 0, xr = 1, y = 2, z = 3;
    p.vars = {{"x_w", bot}, {"x_r", bot}, {"y", zero}, {"z", bot}};

    Process p1;
    p1.id = "P1";
    p1.states = s.states;
    detail::append_preamble(p1, s, one);
    std::vector<std::vector<StateId>> receiving(s.messages.size());
    for (size_t t = 0; t < s.transitions.size(); ++t) {
        const PcsTransition& d = s.transitions[t];
        StateId from = static_cast<StateId>(d.from);
        StateId to = static_cast<StateId>(d.to);
        const Instruction claim = Instruction::read(z, token[t]);
        switch (d.op) {
        case PcsOp::Nop:
            p1.transitions.push_back({from, claim, to});
            break;
        case PcsOp::Send: {
            StateId h1 = detail::fresh_state(p1, "$g" + std::to_string(t) + "a");
            StateId h2 = detail::fresh_state(p1, "$g" + std::to_string(t) + "b");
            p1.transitions.push_back({from, claim, h1});
            p1.transitions.push_back({h1, Instruction::write(xw, detail::message_value(d.msg)), h2});
            p1.transitions.push_back({h2, Instruction::write(y, one), to});
            break;
        }
        case PcsOp::Recv: {
            StateId h1 = detail::fresh_state(p1, "$g" + std::to_string(t) + "a");
            StateId h2 = detail::fresh_state(p1, "$g" + std::to_string(t) + "b");
            p1.transitions.push_back({from, claim, h1});
            p1.transitions.push_back({h1, Instruction::read(xr, detail::message_value(d.msg)), h2});
            p1.transitions.push_back({h2, Instruction::read(xr, bot), to});
            receiving[d.msg].push_back(h1);
            receiving[d.msg].push_back(h2);
            break;
        }
        }
    }
    StateId p1f = detail::fresh_state(p1, "$sF");
    p1.transitions.push_back({p1f, Instruction::skip(), p1f});
    const StateId bad = static_cast<StateId>(s.final_state);
    for (uint32_t m = 0; m < s.messages.size(); ++m) {
        for (StateId v = 0; v < p1.states.size(); ++v) {
            if (v == p1f || v == bad) continue;
            bool mid_receive = false;
            for (StateId r : receiving[m]) mid_receive = mid_receive || r == v;
            if (mid_receive) continue;
            p1.transitions.push_back({v, Instruction::read(xr, detail::message_value(m)), p1f});
        }
    }

    p.procs = {std::move(p1), detail::rotation_process(s, bot, zero, one)};
    for (size_t t = 0; t < s.transitions.size(); ++t) {
        Process pd;
        pd.id = "Pd" + std::to_string(t + 1);
        pd.states = {"$s"};
        pd.initial = 0;
        pd.transitions = {{StateId{0}, Instruction::write(z, token[t]), StateId{0}}};
        p.procs.push_back(std::move(pd));
    }
    p.objective.kind = ObjectiveKind::Safety;
    p.objective.targets = {{Pid{0}, bad}};
    p.objective.fairness = Fairness::Process;
    return p;
}

} // namespace tsogame

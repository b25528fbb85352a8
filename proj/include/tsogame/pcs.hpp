#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsogame/parser.hpp"

// Perfect channel systems: finite control plus one unbounded FIFO channel.
// State reachability is undecidable in general; the bounded search below caps
// the channel length and is used as ground truth for the reduction games.

namespace tsogame {

enum class PcsOp : uint8_t { Send, Recv, Nop };

struct PcsTransition {
    uint32_t from = 0;
    PcsOp op = PcsOp::Nop;
    uint32_t msg = 0; // message index; ignored for Nop
    uint32_t to = 0;
    friend bool operator==(const PcsTransition&, const PcsTransition&) = default;
};

struct Pcs {
    std::vector<std::string> states;
    std::vector<std::string> messages;
    std::vector<PcsTransition> transitions;
    uint32_t initial = 0;
    std::vector<uint32_t> initial_channel; // head first
    uint32_t final_state = 0;

    std::optional<uint32_t> state_index(const std::string& name) const {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return static_cast<uint32_t>(i);
        return std::nullopt;
    }
    std::optional<uint32_t> message_index(const std::string& name) const {
        for (size_t i = 0; i < messages.size(); ++i)
            if (messages[i] == name) return static_cast<uint32_t>(i);
        return std::nullopt;
    }
};

struct PcsConfig {
    uint32_t state = 0;
    std::vector<uint32_t> channel; // head at the front
    auto operator<=>(const PcsConfig&) const = default;
};

/// All single transitions from c: send appends at the tail, receive is
/// enabled only on a matching head and removes it, nop changes state only.
inline std::vector<std::pair<size_t, PcsConfig>> pcs_step(const Pcs& s, const PcsConfig& c) {
    std::vector<std::pair<size_t, PcsConfig>> out;
    for (size_t i = 0; i < s.transitions.size(); ++i) {
        const PcsTransition& t = s.transitions[i];
        if (t.from != c.state) continue;
        PcsConfig n = c;
        n.state = t.to;
        switch (t.op) {
        case PcsOp::Nop: break;
        case PcsOp::Send: n.channel.push_back(t.msg); break;
        case PcsOp::Recv:
            if (c.channel.empty() || c.channel.front() != t.msg) continue;
            n.channel.erase(n.channel.begin());
            break;
        }
        out.emplace_back(i, std::move(n));
    }
    return out;
}

struct PcsReach {
    bool reachable = false;
    std::vector<size_t> witness; // transition indices from the initial configuration
};

/// Breadth-first search over configurations with channel length at most
/// `bound`; sends that would overflow are not explored. Reachable is
/// conclusive, unreachable only says "not within this channel budget".
inline PcsReach pcs_reachable_bounded(const Pcs& s, size_t bound) {
    PcsConfig init{s.initial, s.initial_channel};
    if (init.channel.size() > bound) return {};

    std::map<PcsConfig, size_t> id;
    std::vector<PcsConfig> configs{init};
    std::vector<std::pair<size_t, size_t>> parent{{SIZE_MAX, SIZE_MAX}}; // config, transition
    id.emplace(init, 0);
    for (size_t q = 0; q < configs.size(); ++q) {
        if (configs[q].state == s.final_state) {
            PcsReach r{true, {}};
            for (size_t cur = q; parent[cur].first != SIZE_MAX; cur = parent[cur].first)
                r.witness.push_back(parent[cur].second);
            std::reverse(r.witness.begin(), r.witness.end());
            return r;
        }
        for (auto& [t, next] : pcs_step(s, configs[q])) {
            if (next.channel.size() > bound) continue;
            if (id.emplace(next, configs.size()).second) {
                configs.push_back(next);
                parent.emplace_back(q, t);
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Input language
//
//   pcs ::= "pcs" "{" "states" ident+ ";"
//           "init" ident [string] ";" "final" ident ";"
//           (ident "->" ident ":" ("send" ident | "recv" ident | "nop") ";")* "}"
//
// The optional string after the initial state is the initial channel word,
// messages separated by spaces, head first. Messages are declared by use.
// Names beginning with '$' are reserved for generated programs.

inline Pcs parse_pcs(const std::string& src) {
    using detail::Token;
    detail::TokenStream ts(detail::tokenize(src));
    Pcs s;

    auto check_name = [](const Token& t) {
        if (!t.text.empty() && t.text[0] == '$')
            throw ParseError(t.line, t.col, "names may not start with the reserved '$': " + t.text);
        return t.text;
    };
    auto resolve_state = [&](const Token& t) -> uint32_t {
        if (auto i = s.state_index(t.text)) return *i;
        throw ParseError(t.line, t.col, "unknown state " + t.text);
    };
    auto intern_message = [&](const std::string& name) -> uint32_t {
        if (auto i = s.message_index(name)) return *i;
        s.messages.push_back(name);
        return static_cast<uint32_t>(s.messages.size() - 1);
    };

    ts.expect_keyword("pcs");
    ts.expect(Token::Kind::LBrace, "'{'");
    ts.expect_keyword("states");
    while (ts.at(Token::Kind::Word)) {
        const Token& t = ts.next();
        if (s.state_index(t.text))
            throw ParseError(t.line, t.col, "duplicate state " + t.text);
        s.states.push_back(check_name(t));
    }
    if (s.states.empty())
        throw ParseError(ts.peek().line, ts.peek().col, "expected at least one state");
    ts.expect(Token::Kind::Semi, "';'");

    ts.expect_keyword("init");
    s.initial = resolve_state(ts.expect(Token::Kind::Word, "initial state"));
    if (ts.at(Token::Kind::Str)) {
        const Token& word = ts.next();
        std::string name;
        for (size_t i = 0; i <= word.text.size(); ++i) {
            if (i < word.text.size() && !std::isspace(static_cast<unsigned char>(word.text[i]))) {
                name += word.text[i];
                continue;
            }
            if (name.empty()) continue;
            if (name[0] == '$')
                throw ParseError(word.line, word.col,
                                 "names may not start with the reserved '$': " + name);
            s.initial_channel.push_back(intern_message(name));
            name.clear();
        }
    }
    ts.expect(Token::Kind::Semi, "';'");

    ts.expect_keyword("final");
    s.final_state = resolve_state(ts.expect(Token::Kind::Word, "final state"));
    ts.expect(Token::Kind::Semi, "';'");

    while (ts.at(Token::Kind::Word)) {
        PcsTransition t;
        t.from = resolve_state(ts.next());
        ts.expect(Token::Kind::Arrow, "'->'");
        t.to = resolve_state(ts.expect(Token::Kind::Word, "state"));
        ts.expect(Token::Kind::Colon, "':'");
        const Token& op = ts.expect(Token::Kind::Word, "operation");
        if (op.text == "send" || op.text == "recv") {
            t.op = op.text == "send" ? PcsOp::Send : PcsOp::Recv;
            const Token& m = ts.expect(Token::Kind::Word, "message");
            t.msg = intern_message(check_name(m));
        } else if (op.text == "nop") {
            t.op = PcsOp::Nop;
        } else {
            throw ParseError(op.line, op.col, "unknown operation " + op.text);
        }
        ts.expect(Token::Kind::Semi, "';'");
        s.transitions.push_back(t);
    }
    ts.expect(Token::Kind::RBrace, "'}'");
    ts.expect(Token::Kind::End, "end of input");
    return s;
}

} // namespace tsogame

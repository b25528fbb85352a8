#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "tsogame/program.hpp"

// Parser for the program input language. Line comments start with '#'.
//
//   program ::= "domain" value+ ";" ("var" ident "=" value ";")+ proc+ obj
//   proc    ::= "process" ident "{" "init" ident ";"
//               (ident "->" ident ":" instr ";")* "}"
//   instr   ::= "read" ident value | "write" ident value | "skip" | "fence"
//   obj     ::= ("reach"|"avoid") (ident "." ident)+ ";"
//               ["fairness" ("none"|"update"|"process") ";"]
//
// Local states are declared by use: the init line, transition endpoints and
// objective targets introduce them in order of first appearance. Letting the
// objective introduce states keeps sink targets with no incident transitions
// expressible.

namespace tsogame {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " +
                             msg),
          line(l), col(c) {}
};

namespace detail {

struct Token {
    enum class Kind : uint8_t { Word, Str, LBrace, RBrace, Semi, Colon, Dot, Arrow, Eq, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

inline bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = Token::Kind::Arrow;
            advance(2);
        } else if (c == '{') {
            t.kind = Token::Kind::LBrace;
            advance(1);
        } else if (c == '}') {
            t.kind = Token::Kind::RBrace;
            advance(1);
        } else if (c == ';') {
            t.kind = Token::Kind::Semi;
            advance(1);
        } else if (c == ':') {
            t.kind = Token::Kind::Colon;
            advance(1);
        } else if (c == '.') {
            t.kind = Token::Kind::Dot;
            advance(1);
        } else if (c == '=') {
            t.kind = Token::Kind::Eq;
            advance(1);
        } else if (c == '"') {
            t.kind = Token::Kind::Str;
            advance(1);
            while (i < src.size() && src[i] != '"') {
                t.text += src[i];
                advance(1);
            }
            if (i >= src.size()) throw ParseError(t.line, t.col, "unterminated string");
            advance(1);
        } else if (word_char(c)) {
            t.kind = Token::Kind::Word;
            while (i < src.size() && word_char(src[i])) {
                t.text += src[i];
                advance(1);
            }
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at(Token::Kind k) const { return peek().kind == k; }
    bool at_word(const std::string& w) const {
        return peek().kind == Token::Kind::Word && peek().text == w;
    }

    const Token& expect(Token::Kind k, const std::string& what) {
        if (!at(k)) throw ParseError(peek().line, peek().col, "expected " + what);
        return next();
    }
    std::string expect_word(const std::string& what) {
        return expect(Token::Kind::Word, what).text;
    }
    void expect_keyword(const std::string& w) {
        if (!at_word(w)) throw ParseError(peek().line, peek().col, "expected '" + w + "'");
        next();
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace detail

inline Program parse_program(const std::string& src) {
    using detail::Token;
    detail::TokenStream ts(detail::tokenize(src));
    Program p;

    auto resolve_value = [&](const Token& t) -> Val {
        if (auto v = p.value_index(t.text)) return *v;
        throw ParseError(t.line, t.col, "undeclared value " + t.text);
    };
    auto resolve_var = [&](const Token& t) -> VarId {
        if (auto v = p.var_index(t.text)) return *v;
        throw ParseError(t.line, t.col, "undeclared variable " + t.text);
    };

    ts.expect_keyword("domain");
    while (ts.at(Token::Kind::Word)) {
        const Token& t = ts.next();
        if (p.value_index(t.text))
            throw ParseError(t.line, t.col, "duplicate domain value " + t.text);
        p.domain.push_back(t.text);
    }
    if (p.domain.empty())
        throw ParseError(ts.peek().line, ts.peek().col, "domain needs at least one value");
    ts.expect(Token::Kind::Semi, "';'");

    while (ts.at_word("var")) {
        ts.next();
        const Token& name = ts.expect(Token::Kind::Word, "variable name");
        if (p.var_index(name.text))
            throw ParseError(name.line, name.col, "duplicate variable " + name.text);
        ts.expect(Token::Kind::Eq, "'='");
        Val init = resolve_value(ts.expect(Token::Kind::Word, "initial value"));
        ts.expect(Token::Kind::Semi, "';'");
        p.vars.push_back({name.text, init});
    }
    if (p.vars.empty())
        throw ParseError(ts.peek().line, ts.peek().col, "expected at least one 'var'");

    auto intern_state = [](Process& proc, const std::string& name) -> StateId {
        if (auto s = proc.state_index(name)) return *s;
        proc.states.push_back(name);
        return static_cast<StateId>(proc.states.size() - 1);
    };

    while (ts.at_word("process")) {
        ts.next();
        const Token& id = ts.expect(Token::Kind::Word, "process id");
        if (p.proc_index(id.text))
            throw ParseError(id.line, id.col, "duplicate process id " + id.text);
        Process proc;
        proc.id = id.text;
        ts.expect(Token::Kind::LBrace, "'{'");
        ts.expect_keyword("init");
        proc.initial = intern_state(proc, ts.expect_word("initial state"));
        ts.expect(Token::Kind::Semi, "';'");
        while (ts.at(Token::Kind::Word)) {
            StateId from = intern_state(proc, ts.expect_word("state"));
            ts.expect(Token::Kind::Arrow, "'->'");
            StateId to = intern_state(proc, ts.expect_word("state"));
            ts.expect(Token::Kind::Colon, "':'");
            const Token& op = ts.expect(Token::Kind::Word, "instruction");
            Instruction in;
            if (op.text == "read" || op.text == "write") {
                VarId x = resolve_var(ts.expect(Token::Kind::Word, "variable"));
                Val d = resolve_value(ts.expect(Token::Kind::Word, "value"));
                in = op.text == "read" ? Instruction::read(x, d) : Instruction::write(x, d);
            } else if (op.text == "skip") {
                in = Instruction::skip();
            } else if (op.text == "fence") {
                in = Instruction::fence();
            } else {
                throw ParseError(op.line, op.col, "unknown instruction " + op.text);
            }
            ts.expect(Token::Kind::Semi, "';'");
            proc.transitions.push_back({from, in, to});
        }
        ts.expect(Token::Kind::RBrace, "'}'");
        p.procs.push_back(std::move(proc));
    }
    if (p.procs.empty())
        throw ParseError(ts.peek().line, ts.peek().col, "expected at least one process");

    const Token& kind = ts.expect(Token::Kind::Word, "'reach' or 'avoid'");
    if (kind.text == "reach")
        p.objective.kind = ObjectiveKind::Reachability;
    else if (kind.text == "avoid")
        p.objective.kind = ObjectiveKind::Safety;
    else
        throw ParseError(kind.line, kind.col, "expected 'reach' or 'avoid'");
    while (ts.at(Token::Kind::Word) && !ts.at_word("fairness")) {
        const Token& proc_tok = ts.expect(Token::Kind::Word, "process id");
        auto pid = p.proc_index(proc_tok.text);
        if (!pid) throw ParseError(proc_tok.line, proc_tok.col, "unknown process " + proc_tok.text);
        ts.expect(Token::Kind::Dot, "'.'");
        StateId st = intern_state(p.procs[*pid], ts.expect_word("state"));
        p.objective.targets.emplace_back(*pid, st);
    }
    if (p.objective.targets.empty())
        throw ParseError(ts.peek().line, ts.peek().col, "objective needs at least one state");
    ts.expect(Token::Kind::Semi, "';'");

    p.objective.fairness = Fairness::None;
    if (ts.at_word("fairness")) {
        ts.next();
        const Token& f = ts.expect(Token::Kind::Word, "fairness mode");
        if (f.text == "none")
            p.objective.fairness = Fairness::None;
        else if (f.text == "update")
            p.objective.fairness = Fairness::Update;
        else if (f.text == "process")
            p.objective.fairness = Fairness::Process;
        else
            throw ParseError(f.line, f.col, "unknown fairness mode " + f.text);
        ts.expect(Token::Kind::Semi, "';'");
    }
    ts.expect(Token::Kind::End, "end of input");

    if (p.objective.fairness == Fairness::Update &&
        p.objective.kind != ObjectiveKind::Reachability)
        throw ParseError(kind.line, kind.col, "update fairness requires a reachability objective");
    if (p.objective.fairness == Fairness::Process && p.objective.kind != ObjectiveKind::Safety)
        throw ParseError(kind.line, kind.col, "process fairness requires a safety objective");
    return p;
}

} // namespace tsogame

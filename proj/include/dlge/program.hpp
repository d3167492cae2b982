#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlge/atom.hpp"
#include "dlge/instance.hpp"

namespace dlge {

// body -> head, with implicit universal quantifiers; head-only variables are
// existentially quantified. `neqs` holds `X != Y` builtins from the body,
// evaluated over constants at trigger time.
struct Tgd {
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::vector<std::pair<Term, Term>> neqs;
    int line = 0;

    std::vector<Term> existential_vars() const;
    std::vector<Term> body_vars() const;
    bool linear() const { return body.size() == 1; }
    std::string text() const;
};

// body -> lhs = rhs over two distinct body variables. Multi-equality heads
// are desugared at parse time into one Egd per equality.
struct Egd {
    std::vector<Atom> body;
    Term lhs;
    Term rhs;
    int line = 0;

    std::string text() const;
};

// `? body.` is a BCQ; `?(X,Y) body.` projects the named output variables.
struct Query {
    std::vector<Term> outputs;
    std::vector<Atom> body;
    int line = 0;

    bool boolean() const { return outputs.empty(); }
    std::string text() const;
};

struct Program {
    std::vector<Tgd> tgds;
    std::vector<Egd> egds;
    std::vector<Atom> facts;
    std::vector<Query> queries;

    // predicate -> (arity, first line seen)
    std::map<uint32_t, std::pair<size_t, int>> schema;

    Instance database() const;
    Program tgds_only() const;
    size_t schema_size() const { return schema.size(); }
    size_t max_arity() const;
    void note_predicate(const Atom& atom, int line);
};

struct Diagnostic {
    int line = 0;
    int column = 0;
    std::string message;

    std::string text() const;
};

} // namespace dlge

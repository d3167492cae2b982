#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlge/term.hpp"

namespace dlge {

// Predicate plus an ordered argument list. Atoms in rules may contain
// variables; atoms stored in an instance are ground (constants and nulls).
struct Atom {
    uint32_t predicate = 0;
    std::vector<Term> args;

    Atom() = default;
    Atom(uint32_t pred, std::vector<Term> a) : predicate(pred), args(std::move(a)) {}
    Atom(std::string_view pred, std::vector<Term> a)
        : predicate(SymbolTable::global().intern(pred)), args(std::move(a)) {}

    size_t arity() const { return args.size(); }
    const std::string& predicate_name() const { return SymbolTable::global().name(predicate); }
    bool ground() const;

    std::string text() const;

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }

    size_t hash() const;
};

struct AtomHash {
    size_t operator()(const Atom& a) const { return a.hash(); }
};

// Canonical pattern of a ground atom: constants kept verbatim, each null
// replaced by its first-occurrence index. Two facts are isomorphic iff their
// canonical patterns coincide.
std::vector<uint64_t> canonical_pattern(const Atom& fact);

bool isomorphic(const Atom& f, const Atom& g);

std::string conjunction_text(const std::vector<Atom>& atoms);

} // namespace dlge

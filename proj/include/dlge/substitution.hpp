#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "dlge/atom.hpp"
#include "dlge/term.hpp"

namespace dlge {

// A finite functional map over terms. Homomorphisms are substitutions that
// are the identity on constants; nothing here enforces that, callers bind
// only variables or nulls.
class Substitution {
public:
    Substitution() = default;

    bool empty() const { return map_.empty(); }
    size_t size() const { return map_.size(); }

    bool bound(const Term& t) const { return map_.count(t) != 0; }
    std::optional<Term> lookup(const Term& t) const {
        auto it = map_.find(t);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    // Binds src to dst. Returns false (and leaves the map unchanged) if src
    // is already bound to a different term.
    bool bind(const Term& src, const Term& dst);
    void erase(const Term& src) { map_.erase(src); }

    Term apply(const Term& t) const {
        auto it = map_.find(t);
        return it == map_.end() ? t : it->second;
    }
    Atom apply(const Atom& a) const;
    std::vector<Atom> apply(const std::vector<Atom>& atoms) const;

    // compose(first, second): t -> second(first(t)) over both domains.
    static Substitution compose(const Substitution& first, const Substitution& second);

    // True if s(s(t)) == s(t) for every t in the domain.
    bool idempotent() const;

    const std::unordered_map<Term, Term, TermHash>& entries() const { return map_; }

    friend bool operator==(const Substitution& a, const Substitution& b) {
        return a.map_ == b.map_;
    }

    std::string text() const;

private:
    std::unordered_map<Term, Term, TermHash> map_;
};

} // namespace dlge

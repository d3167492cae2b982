#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dlge/instance.hpp"
#include "dlge/substitution.hpp"

namespace dlge {

struct MatchResult {
    Substitution subst;
    // Matched fact id per pattern atom, in the original pattern order.
    std::vector<FactId> atom_facts;
};

// Enumerates every homomorphism theta with theta(pattern) contained in inst,
// each exactly once, in a deterministic order. Constants and nulls in the
// pattern match only themselves; repeated variables force equal images.
// Unknown predicates yield no matches. The callback returns false to stop.
void for_each_match(const std::vector<Atom>& pattern, const Instance& inst,
                    const Substitution& seed,
                    const std::function<bool(const MatchResult&)>& cb);

std::vector<Substitution> match(const std::vector<Atom>& pattern, const Instance& inst);

bool has_match(const std::vector<Atom>& pattern, const Instance& inst,
               const Substitution& seed = {});

// Searches for a homomorphism h mapping src into dst: total over the nulls of
// src, identity on constants, with h(src) a subset of dst. With `onto`, h must
// additionally cover every fact of dst. Returns the null assignments.
std::optional<Substitution> find_homomorphism(const Instance& src, const Instance& dst,
                                              bool onto = false);

// Facts of dst not covered by any into-homomorphism image; empty when no
// homomorphism exists at all. Used for harmlessness witness reports.
std::vector<Atom> uncovered_facts(const Instance& src, const Instance& dst);

} // namespace dlge

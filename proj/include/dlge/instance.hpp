#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dlge/atom.hpp"
#include "dlge/substitution.hpp"

namespace dlge {

using FactId = uint32_t;
inline constexpr FactId kNoFact = UINT32_MAX;

// A set of ground facts with stable insertion ids. Ids survive EGD rewrites:
// rewriting updates fact content in place and reports merges when two facts
// collapse onto the same atom. Single-writer; frozen instances are safe to
// read concurrently.
class Instance {
public:
    struct Merge {
        FactId dead;
        FactId survivor;
    };

    Instance() = default;

    // Inserts a ground atom; returns the existing id under set semantics.
    FactId insert(Atom atom);

    bool contains(const Atom& atom) const { return find_fact(atom) != kNoFact; }
    FactId find_fact(const Atom& atom) const;

    bool live(FactId id) const { return id < facts_.size() && alive_[id]; }
    const Atom& atom(FactId id) const { return facts_[id]; }

    size_t size() const { return live_count_; }
    bool empty() const { return live_count_ == 0; }

    // Live fact ids for one predicate, in insertion order.
    const std::vector<FactId>& by_predicate(uint32_t predicate) const;
    // Live fact ids with `term` at position `pos` (0-based) of `predicate`.
    std::vector<FactId> by_position(uint32_t predicate, size_t pos, const Term& term) const;

    std::vector<FactId> fact_ids() const;
    std::vector<Atom> atoms() const;

    std::vector<uint32_t> predicates() const;
    std::unordered_set<Term, TermHash> term_universe() const;
    std::vector<Term> constants() const;

    // Rewrites every argument through `f`. Fact ids are preserved; facts that
    // become identical merge, keeping the older id. Merges are reported in
    // application order.
    std::vector<Merge> rewrite(const std::function<Term(const Term&)>& f);
    std::vector<Merge> rewrite(const Substitution& s);

    friend bool operator==(const Instance& a, const Instance& b);

private:
    void index_insert(FactId id);
    void index_erase(FactId id);

    std::vector<Atom> facts_;
    std::vector<bool> alive_;
    size_t live_count_ = 0;
    std::unordered_map<Atom, FactId, AtomHash> by_atom_;
    std::unordered_map<uint32_t, std::vector<FactId>> by_pred_;
    // (predicate, position, term) -> fact ids; positions are 0-based here.
    struct PosKey {
        uint64_t pred_pos;
        Term term;
        bool operator==(const PosKey& o) const {
            return pred_pos == o.pred_pos && term == o.term;
        }
    };
    struct PosKeyHash {
        size_t operator()(const PosKey& k) const {
            return std::hash<uint64_t>()(k.pred_pos) * 1099511628211ULL ^ k.term.hash();
        }
    };
    std::unordered_map<PosKey, std::vector<FactId>, PosKeyHash> by_pos_;
};

} // namespace dlge

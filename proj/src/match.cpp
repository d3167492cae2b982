#include "dlge/match.hpp"

#include <algorithm>
#include <unordered_set>

namespace dlge {

namespace {

// Greedy reorder: repeatedly pick the atom with the most already-bound
// variables, breaking ties by original position.
std::vector<size_t> plan_order(const std::vector<Atom>& pattern, const Substitution& seed) {
    std::unordered_set<Term, TermHash> bound;
    for (const auto& [src, dst] : seed.entries()) bound.insert(src);
    std::vector<size_t> order;
    std::vector<bool> used(pattern.size(), false);
    for (size_t step = 0; step < pattern.size(); ++step) {
        size_t best = pattern.size();
        int best_score = -1;
        for (size_t i = 0; i < pattern.size(); ++i) {
            if (used[i]) continue;
            int score = 0;
            for (const Term& t : pattern[i].args)
                if (!t.is_variable() || bound.count(t)) ++score;
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        used[best] = true;
        order.push_back(best);
        for (const Term& t : pattern[best].args)
            if (t.is_variable()) bound.insert(t);
    }
    return order;
}

struct Search {
    const std::vector<Atom>& pattern;
    const Instance& inst;
    const std::function<bool(const MatchResult&)>& cb;
    std::vector<size_t> order;
    MatchResult current;
    bool stopped = false;

    bool unify(const Atom& atom, const Atom& fact, std::vector<Term>& bound_here) {
        for (size_t i = 0; i < atom.args.size(); ++i) {
            const Term& p = atom.args[i];
            const Term& f = fact.args[i];
            if (p.is_variable()) {
                auto existing = current.subst.lookup(p);
                if (existing) {
                    if (*existing != f) return false;
                } else {
                    current.subst.bind(p, f);
                    bound_here.push_back(p);
                }
            } else if (p != f) {
                return false;
            }
        }
        return true;
    }

    std::vector<FactId> candidates(const Atom& atom) const {
        const std::vector<FactId>* best = &inst.by_predicate(atom.predicate);
        std::vector<FactId> narrowed;
        bool have_narrowed = false;
        for (size_t i = 0; i < atom.args.size(); ++i) {
            Term t = atom.args[i].is_variable() ? current.subst.apply(atom.args[i]) : atom.args[i];
            if (t.is_variable()) continue;
            std::vector<FactId> ids = inst.by_position(atom.predicate, i, t);
            if (!have_narrowed || ids.size() < (have_narrowed ? narrowed.size() : best->size())) {
                narrowed = std::move(ids);
                have_narrowed = true;
            }
        }
        if (have_narrowed) return narrowed;
        return *best;
    }

    void run(size_t depth) {
        if (stopped) return;
        if (depth == order.size()) {
            if (!cb(current)) stopped = true;
            return;
        }
        size_t atom_idx = order[depth];
        const Atom& atom = pattern[atom_idx];
        for (FactId id : candidates(atom)) {
            if (!inst.live(id)) continue;
            const Atom& fact = inst.atom(id);
            if (fact.args.size() != atom.args.size()) continue;
            std::vector<Term> bound_here;
            if (unify(atom, fact, bound_here)) {
                current.atom_facts[atom_idx] = id;
                run(depth + 1);
            }
            for (const Term& t : bound_here) current.subst.erase(t);
            if (stopped) return;
        }
    }
};

} // namespace

void for_each_match(const std::vector<Atom>& pattern, const Instance& inst,
                    const Substitution& seed,
                    const std::function<bool(const MatchResult&)>& cb) {
    Search search{pattern, inst, cb};
    search.order = plan_order(pattern, seed);
    search.current.subst = seed;
    search.current.atom_facts.assign(pattern.size(), kNoFact);
    search.run(0);
}

std::vector<Substitution> match(const std::vector<Atom>& pattern, const Instance& inst) {
    std::vector<Substitution> out;
    for_each_match(pattern, inst, {}, [&](const MatchResult& m) {
        out.push_back(m.subst);
        return true;
    });
    return out;
}

bool has_match(const std::vector<Atom>& pattern, const Instance& inst, const Substitution& seed) {
    bool found = false;
    for_each_match(pattern, inst, seed, [&](const MatchResult&) {
        found = true;
        return false;
    });
    return found;
}

namespace {

// Backtracking search for a homomorphism between instances. Nulls of src act
// as variables; constants are rigid. With onto, prunes branches that can no
// longer cover all of dst.
struct HomSearch {
    std::vector<Atom> src_facts;
    const Instance& dst;
    bool onto;
    size_t dst_size;
    Substitution assignment;                       // null -> term
    std::unordered_map<FactId, int> cover_count;   // dst facts covered so far
    size_t covered = 0;

    bool unify(const Atom& a, const Atom& fact, std::vector<Term>& bound_here) {
        for (size_t i = 0; i < a.args.size(); ++i) {
            const Term& p = a.args[i];
            const Term& f = fact.args[i];
            if (p.is_null()) {
                auto existing = assignment.lookup(p);
                if (existing) {
                    if (*existing != f) return false;
                } else {
                    assignment.bind(p, f);
                    bound_here.push_back(p);
                }
            } else if (p != f) {
                return false;
            }
        }
        return true;
    }

    std::vector<FactId> candidates(const Atom& a) const {
        std::vector<FactId> narrowed;
        bool have_narrowed = false;
        for (size_t i = 0; i < a.args.size(); ++i) {
            Term t = a.args[i].is_null() ? assignment.apply(a.args[i]) : a.args[i];
            if (t.is_null()) continue; // still unassigned
            std::vector<FactId> ids = dst.by_position(a.predicate, i, t);
            if (!have_narrowed || ids.size() < narrowed.size()) {
                narrowed = std::move(ids);
                have_narrowed = true;
            }
        }
        if (have_narrowed) return narrowed;
        return dst.by_predicate(a.predicate);
    }

    bool run(size_t depth) {
        if (depth == src_facts.size()) return !onto || covered == dst_size;
        if (onto && dst_size - covered > src_facts.size() - depth) return false;
        const Atom& a = src_facts[depth];
        for (FactId id : candidates(a)) {
            if (!dst.live(id)) continue;
            const Atom& fact = dst.atom(id);
            if (fact.args.size() != a.args.size()) continue;
            std::vector<Term> bound_here;
            if (unify(a, fact, bound_here)) {
                int& count = cover_count[id];
                if (count++ == 0) ++covered;
                if (run(depth + 1)) return true;
                if (--count == 0) --covered;
            }
            for (const Term& t : bound_here) assignment.erase(t);
        }
        return false;
    }
};

std::vector<Atom> ordered_src_facts(const Instance& src) {
    std::vector<Atom> facts = src.atoms();
    // Most-constrained first: fewer nulls, then more arguments.
    std::stable_sort(facts.begin(), facts.end(), [](const Atom& a, const Atom& b) {
        auto nulls = [](const Atom& x) {
            size_t n = 0;
            for (const Term& t : x.args) n += t.is_null();
            return n;
        };
        size_t na = nulls(a), nb = nulls(b);
        if (na != nb) return na < nb;
        return a.args.size() > b.args.size();
    });
    return facts;
}

} // namespace

std::optional<Substitution> find_homomorphism(const Instance& src, const Instance& dst, bool onto) {
    HomSearch search{ordered_src_facts(src), dst, onto, dst.size()};
    if (search.run(0)) return search.assignment;
    return std::nullopt;
}

std::vector<Atom> uncovered_facts(const Instance& src, const Instance& dst) {
    // Collect dst facts reachable as images under some into-homomorphism by
    // checking, per dst fact, a homomorphism forced through it.
    std::vector<Atom> missing;
    auto base = find_homomorphism(src, dst, false);
    if (!base) return missing;
    for (FactId id : dst.fact_ids()) {
        const Atom& target = dst.atom(id);
        bool covered = false;
        for (const Atom& a : src.atoms()) {
            if (a.predicate != target.predicate || a.args.size() != target.args.size()) continue;
            // Try to extend: h(a) == target plus a full into-homomorphism.
            HomSearch search{ordered_src_facts(src), dst, false, dst.size()};
            std::vector<Term> bound_here;
            if (!search.unify(a, target, bound_here)) continue;
            if (search.run(0)) {
                covered = true;
                break;
            }
        }
        if (!covered) missing.push_back(target);
    }
    return missing;
}

} // namespace dlge

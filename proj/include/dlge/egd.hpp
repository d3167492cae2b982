#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlge/chase.hpp"
#include "dlge/instance.hpp"
#include "dlge/program.hpp"

namespace dlge {

// Disjoint-set over constants and nulls with constant-priority
// representatives. A component holding two distinct constants is a hard
// violation.
class UnificationGraph {
public:
    // Returns false when the merge would put two distinct constants into one
    // component; the clashing constants are reported via `clash`.
    bool add_edge(const Term& a, const Term& b, std::pair<Term, Term>* clash = nullptr);

    Term find(const Term& t) const;
    // Component representative: its constant when present, else the oldest
    // null (smallest serial).
    Term representative(const Term& t) const;
    bool same_component(const Term& a, const Term& b) const {
        return find(a) == find(b);
    }

    size_t edge_count() const { return edges_; }
    bool has_node(const Term& t) const { return parent_.count(t) != 0; }

    struct Component {
        Term representative;
        std::vector<Term> members; // sorted
    };
    std::vector<Component> components() const;

    std::string to_json(const std::optional<EgdFailure>& failure) const;

private:
    Term find_root(const Term& t) const;
    void ensure(const Term& t);

    mutable std::unordered_map<Term, Term, TermHash> parent_;
    std::unordered_map<Term, Term, TermHash> constant_of_; // root -> constant in component
    std::unordered_map<Term, Term, TermHash> oldest_null_; // root -> oldest null
    size_t edges_ = 0;
};

struct EgdFixpointConfig {
    // When set, assignments are resolved and applied to the instance each
    // time the pending-edge buffer reaches the threshold, instead of once per
    // matching pass. Both modes produce the same unified instance.
    std::optional<size_t> batch_threshold;
};

struct EgdFixpointResult {
    bool failed = false;
    std::optional<EgdFailure> failure;
    UnificationGraph graph;
    Substitution h;    // null -> representative, idempotent
    Instance unified;  // input rewritten by h

    std::string to_json() const { return graph.to_json(failure); }
};

// Applies the EGDs to fixpoint over a completed TGD chase: matches every EGD
// body modulo the current components, merges the two sides of each trigger,
// and repeats until no merging trigger remains. Component resolution then
// yields the homomorphism h and the unified instance.
EgdFixpointResult egd_fixpoint(const Instance& chased, const Program& p,
                               EgdFixpointConfig config = {});

struct SatEncoding {
    Instance base;  // chased facts with nulls frozen as constants + eq/neq seeds
    Program rules;  // one eq-head TGD per EGD, plus eq symmetry/transitivity
    Query check_query;

    uint32_t eq_predicate = 0;
    uint32_t neq_predicate = 0;
};

// Builds the satisfiability encoding: nulls downgraded to fresh constants,
// neq over all ordered pairs of distinct constants from dom_d, eq seeded
// reflexively, one eq-head TGD per EGD.
SatEncoding build_sat_encoding(const Instance& chased, const Program& p,
                               const std::vector<Term>& dom_d);

// Encoding-based satisfiability: chases the encoding and checks that the
// contradiction query stays unsatisfied. Requires warded TGDs.
bool check_satisfiability(const Instance& db, const Program& p, ChaseLimits limits = {});

} // namespace dlge

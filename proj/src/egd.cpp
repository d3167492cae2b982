#include "dlge/egd.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace dlge {

void UnificationGraph::ensure(const Term& t) {
    if (parent_.emplace(t, t).second) {
        if (t.is_constant()) constant_of_.emplace(t, t);
        else oldest_null_.emplace(t, t);
    }
}

Term UnificationGraph::find_root(const Term& t) const {
    auto it = parent_.find(t);
    if (it == parent_.end()) return t;
    if (it->second == t) return t;
    Term root = find_root(it->second);
    it->second = root;
    return root;
}

Term UnificationGraph::find(const Term& t) const {
    return find_root(t);
}

bool UnificationGraph::add_edge(const Term& a, const Term& b, std::pair<Term, Term>* clash) {
    ensure(a);
    ensure(b);
    ++edges_;
    Term ra = find_root(a);
    Term rb = find_root(b);
    if (ra == rb) return true;
    auto ca = constant_of_.find(ra);
    auto cb = constant_of_.find(rb);
    if (ca != constant_of_.end() && cb != constant_of_.end() && ca->second != cb->second) {
        if (clash) *clash = {ca->second, cb->second};
        return false;
    }
    parent_[rb] = ra;
    if (cb != constant_of_.end()) constant_of_[ra] = cb->second;
    auto na = oldest_null_.find(ra);
    auto nb = oldest_null_.find(rb);
    if (nb != oldest_null_.end()) {
        if (na == oldest_null_.end() || nb->second.id() < na->second.id())
            oldest_null_[ra] = nb->second;
    }
    return true;
}

Term UnificationGraph::representative(const Term& t) const {
    Term root = find_root(t);
    auto c = constant_of_.find(root);
    if (c != constant_of_.end()) return c->second;
    auto n = oldest_null_.find(root);
    if (n != oldest_null_.end()) return n->second;
    return root;
}

std::vector<UnificationGraph::Component> UnificationGraph::components() const {
    std::map<Term, std::vector<Term>> groups;
    for (const auto& [node, parent] : parent_) groups[find_root(node)].push_back(node);
    std::vector<Component> out;
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        out.push_back({representative(root), std::move(members)});
    }
    return out;
}

std::string UnificationGraph::to_json(const std::optional<EgdFailure>& failure) const {
    nlohmann::json j;
    nlohmann::json comps = nlohmann::json::array();
    for (const Component& c : components()) {
        nlohmann::json entry;
        entry["representative"] = c.representative.text();
        entry["members"] = nlohmann::json::array();
        for (const Term& t : c.members) entry["members"].push_back(t.text());
        comps.push_back(entry);
    }
    j["components"] = comps;
    j["edges"] = edges_;
    if (failure) {
        j["failure"] = {{"a", failure->a.text()},
                        {"b", failure->b.text()},
                        {"egd", failure->egd_index + 1}};
    } else {
        j["failure"] = nullptr;
    }
    return j.dump(2);
}

EgdFixpointResult egd_fixpoint(const Instance& chased, const Program& p,
                               EgdFixpointConfig config) {
    EgdFixpointResult result;
    result.unified = chased;
    Instance& work = result.unified;

    // All nulls of the input keep an entry in the graph so h covers them even
    // after batched rewrites replace them in `work`.
    std::vector<Term> input_nulls;
    for (const Term& t : chased.term_universe())
        if (t.is_null()) input_nulls.push_back(t);
    std::sort(input_nulls.begin(), input_nulls.end());

    size_t pending = 0;
    auto flush = [&]() {
        if (pending == 0) return;
        Substitution step;
        for (const Term& t : work.term_universe()) {
            Term rep = result.graph.representative(t);
            if (rep != t) step.bind(t, rep);
        }
        work.rewrite(step);
        pending = 0;
    };

    bool changed = true;
    while (changed && !result.failed) {
        changed = false;
        for (size_t e = 0; e < p.egds.size() && !result.failed; ++e) {
            const Egd& egd = p.egds[e];
            for_each_match(egd.body, work, {}, [&](const MatchResult& m) {
                Term a = result.graph.has_node(m.subst.apply(egd.lhs))
                             ? result.graph.representative(m.subst.apply(egd.lhs))
                             : m.subst.apply(egd.lhs);
                Term b = result.graph.has_node(m.subst.apply(egd.rhs))
                             ? result.graph.representative(m.subst.apply(egd.rhs))
                             : m.subst.apply(egd.rhs);
                if (a == b) return true;
                std::pair<Term, Term> clash;
                if (!result.graph.add_edge(a, b, &clash)) {
                    result.failed = true;
                    result.failure = EgdFailure{clash.first, clash.second, e, m.subst};
                    return false;
                }
                ++pending;
                changed = true;
                if (config.batch_threshold && pending >= *config.batch_threshold) {
                    flush();
                    return false; // instance changed; restart matching
                }
                return true;
            });
        }
        flush();
    }

    if (result.failed) return result;

    for (const Term& n : input_nulls) {
        Term rep = result.graph.has_node(n) ? result.graph.representative(n) : n;
        if (rep != n) result.h.bind(n, rep);
    }
    // `work` was rewritten with interim representatives; one final pass with h
    // settles everything.
    work.rewrite(result.h);
    return result;
}

namespace {

const char* kEqName = "eq$";
const char* kNeqName = "neq$";

Term freeze(const Term& t) {
    return t.is_null() ? Term::constant(t.text()) : t;
}

} // namespace

SatEncoding build_sat_encoding(const Instance& chased, const Program& p,
                               const std::vector<Term>& dom_d) {
    SatEncoding enc;
    enc.eq_predicate = SymbolTable::global().intern(kEqName);
    enc.neq_predicate = SymbolTable::global().intern(kNeqName);

    for (const Atom& fact : chased.atoms()) {
        Atom frozen = fact;
        for (Term& t : frozen.args) t = freeze(t);
        enc.base.insert(frozen);
    }
    for (const Term& c1 : dom_d) {
        enc.base.insert(Atom(enc.eq_predicate, {c1, c1}));
        for (const Term& c2 : dom_d)
            if (c1 != c2) enc.base.insert(Atom(enc.neq_predicate, {c1, c2}));
    }

    for (const Egd& egd : p.egds) {
        Tgd rule;
        rule.body = egd.body;
        rule.head = {Atom(enc.eq_predicate, {egd.lhs, egd.rhs})};
        rule.line = egd.line;
        enc.rules.tgds.push_back(std::move(rule));
    }
    Term x = Term::variable("X");
    Term y = Term::variable("Y");
    Term z = Term::variable("Z");
    {
        Tgd sym;
        sym.body = {Atom(enc.eq_predicate, {x, y})};
        sym.head = {Atom(enc.eq_predicate, {y, x})};
        enc.rules.tgds.push_back(std::move(sym));
    }
    {
        Tgd trans;
        trans.body = {Atom(enc.eq_predicate, {x, y}), Atom(enc.eq_predicate, {y, z})};
        trans.head = {Atom(enc.eq_predicate, {x, z})};
        enc.rules.tgds.push_back(std::move(trans));
    }
    for (const Tgd& rule : enc.rules.tgds) {
        Program& rp = enc.rules;
        for (const Atom& a : rule.body) rp.note_predicate(a, rule.line);
        for (const Atom& a : rule.head) rp.note_predicate(a, rule.line);
    }

    enc.check_query.body = {Atom(enc.eq_predicate, {x, y}), Atom(enc.neq_predicate, {x, y})};
    return enc;
}

bool check_satisfiability(const Instance& db, const Program& p, ChaseLimits limits) {
    ChaseOutcome tgd_chase = relaxed_warded_chase(db, p.tgds_only(), limits);

    // Hard violations can involve constants written in rules, not only in D;
    // seed neq over the whole active domain.
    std::set<Term> dom;
    for (const Term& t : db.constants()) dom.insert(t);
    auto note_atoms = [&dom](const std::vector<Atom>& atoms) {
        for (const Atom& a : atoms)
            for (const Term& t : a.args)
                if (t.is_constant()) dom.insert(t);
    };
    for (const Tgd& rule : p.tgds) {
        note_atoms(rule.body);
        note_atoms(rule.head);
    }
    for (const Egd& egd : p.egds) note_atoms(egd.body);

    SatEncoding enc =
        build_sat_encoding(tgd_chase.instance, p, std::vector<Term>(dom.begin(), dom.end()));
    ChaseOutcome closure = standard_chase(enc.base, enc.rules, limits);
    return !has_match(enc.check_query.body, closure.instance);
}

} // namespace dlge

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "dlge/egd.hpp"
#include "dlge/syntax.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/schema_check.hpp"

using namespace dlge;
using fixtures::c;
using fixtures::v;

namespace {

Atom mk(const std::string& pred, std::vector<Term> args) {
    return Atom(pred, std::move(args));
}

// No EGD trigger with different sides may survive on the unified instance.
bool satisfies_egds(const Instance& inst, const Program& p) {
    for (const Egd& egd : p.egds)
        for (const Substitution& m : match(egd.body, inst))
            if (m.apply(egd.lhs) != m.apply(egd.rhs)) return false;
    return true;
}

} // namespace

TEST_CASE("egd_fixpoint: intro chase grounds the three nulls") {
    Program p = fixtures::load("intro");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    REQUIRE(tgd.status == ChaseStatus::Saturated);
    EgdFixpointResult fix = egd_fixpoint(tgd.instance, p);
    REQUIRE_FALSE(fix.failed);
    auto matches = match({mk("partOf", {c("camshaft"), v("A")}), mk("partOf", {c("thrust"), v("B")}),
                          mk("partOf", {v("B"), v("C")})},
                         tgd.instance);
    bool found = false;
    for (const Substitution& m : matches) {
        Term a = m.apply(v("A")), b = m.apply(v("B")), cc = m.apply(v("C"));
        if (!a.is_null() || !b.is_null() || !cc.is_null()) continue;
        if (fix.h.apply(a) == c("engine") && fix.h.apply(b) == c("camshaft") &&
            fix.h.apply(cc) == c("engine"))
            found = true;
    }
    CHECK(found);
    CHECK(fix.unified.contains(mk("partOf", {c("thrust"), c("camshaft")})));
    CHECK(fix.unified.contains(mk("partOf", {c("camshaft"), c("engine")})));
}

TEST_CASE("egd_fixpoint: key clustering unifies all three set nulls") {
    Program p = fixtures::load("clusters_key");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    REQUIRE(tgd.status == ChaseStatus::Saturated);
    EgdFixpointResult fix = egd_fixpoint(tgd.instance, p);
    REQUIRE_FALSE(fix.failed);
    std::set<Term> nulls;
    for (const Term& t : tgd.instance.term_universe())
        if (t.is_null()) nulls.insert(t);
    REQUIRE(nulls.size() >= 3);
    std::set<Term> reps;
    for (const Term& n : nulls) reps.insert(fix.graph.representative(n));
    CHECK(reps.size() == 1);
    CHECK(match({mk("comp", {c("1"), v("Z")}), mk("comp", {c("2"), v("Z")}),
                 mk("comp", {c("3"), v("Z")})},
                fix.unified)
              .size() > 0);
}

TEST_CASE("egd_fixpoint: split-merge clashes two constants") {
    Program p = fixtures::load("split_merge");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    REQUIRE(tgd.status == ChaseStatus::Saturated);
    EgdFixpointResult fix = egd_fixpoint(tgd.instance, p);
    REQUIRE(fix.failed);
    REQUIRE(fix.failure.has_value());
    std::set<Term> clash = {fix.failure->a, fix.failure->b};
    CHECK(clash == std::set<Term>{c("b"), c("c")});
    std::string json = fix.to_json();
    CHECK(json.find("failure") != std::string::npos);
}

TEST_CASE("egd_fixpoint: no triggers leaves everything untouched") {
    Program p = fixtures::parse("comp(X,Z1), comp(X,Z2) -> Z1 = Z2.");
    Instance inst;
    inst.insert(mk("comp", {c("1"), Term::fresh_null()}));
    inst.insert(mk("comp", {c("2"), Term::fresh_null()}));
    EgdFixpointResult fix = egd_fixpoint(inst, p);
    CHECK_FALSE(fix.failed);
    CHECK(fix.h.empty());
    CHECK(fix.unified == inst);
    CHECK(fix.graph.edge_count() == 0);
}

TEST_CASE("egd_fixpoint: merges discovered through earlier merges") {
    // s unifies n1 with n2, which makes the two t-facts join and force a
    // constant clash: matching runs modulo the current components.
    Program p = fixtures::parse("s(W,W2) -> W = W2.\nt(Z,Y), t(Z,Y2) -> Y = Y2.");
    Instance inst;
    Term n1 = Term::fresh_null(), n2 = Term::fresh_null();
    inst.insert(mk("s", {n1, n2}));
    inst.insert(mk("t", {n1, c("a")}));
    inst.insert(mk("t", {n2, c("b")}));
    EgdFixpointResult fix = egd_fixpoint(inst, p);
    REQUIRE(fix.failed);
    std::set<Term> clash = {fix.failure->a, fix.failure->b};
    CHECK(clash == std::set<Term>{c("a"), c("b")});
}

TEST_CASE("egd_fixpoint result satisfies the EGDs") {
    auto programs = corpus::safe_corpus(30, 616);
    REQUIRE(programs.size() >= 20);
    for (const Program& p : programs) {
        ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {2000, 400});
        REQUIRE(tgd.status == ChaseStatus::Saturated);
        EgdFixpointResult fix = egd_fixpoint(tgd.instance, p);
        if (fix.failed) continue;
        CHECK(satisfies_egds(fix.unified, p));
        CHECK(fix.h.idempotent());
        for (const auto& [from, to] : fix.h.entries()) CHECK(from.is_null());
    }
}

TEST_CASE("component partition is independent of edge insertion order") {
    std::mt19937 rng(2718);
    for (int round = 0; round < 60; ++round) {
        std::vector<std::pair<Term, Term>> edges;
        std::vector<Term> terms;
        for (uint32_t i = 1; i <= 8; ++i) terms.push_back(Term::null(1000 + i));
        terms.push_back(c("k1"));
        terms.push_back(c("k2"));
        size_t nedges = 1 + rng() % 8;
        for (size_t i = 0; i < nedges; ++i)
            edges.emplace_back(terms[rng() % terms.size()], terms[rng() % terms.size()]);

        auto partition_of = [&](const std::vector<std::pair<Term, Term>>& ordered) {
            UnificationGraph g;
            bool failed = false;
            for (const auto& [a, b] : ordered)
                if (!g.add_edge(a, b)) failed = true;
            std::map<Term, std::set<Term>> groups;
            if (!failed)
                for (const auto& comp : g.components()) {
                    std::set<Term> members(comp.members.begin(), comp.members.end());
                    groups[*members.begin()] = members;
                }
            return std::make_pair(failed, groups);
        };
        auto base = partition_of(edges);
        std::vector<std::pair<Term, Term>> shuffled = edges;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto other = partition_of(shuffled);
        CHECK(base.first == other.first);
        if (!base.first) CHECK(base.second == other.second);
    }
}

TEST_CASE("batched and unbatched modes produce identical unified instances") {
    auto programs = corpus::safe_corpus(25, 31415);
    REQUIRE(programs.size() >= 15);
    for (const Program& p : programs) {
        ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {2000, 400});
        REQUIRE(tgd.status == ChaseStatus::Saturated);
        EgdFixpointResult plain = egd_fixpoint(tgd.instance, p);
        for (size_t threshold : {size_t(1), size_t(2), size_t(7)}) {
            EgdFixpointConfig config;
            config.batch_threshold = threshold;
            EgdFixpointResult batched = egd_fixpoint(tgd.instance, p, config);
            CHECK(plain.failed == batched.failed);
            if (!plain.failed) CHECK(plain.unified == batched.unified);
        }
    }
}

TEST_CASE("intro program under batching matches the plain run") {
    Program p = fixtures::load("intro");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    EgdFixpointResult plain = egd_fixpoint(tgd.instance, p);
    EgdFixpointConfig config;
    config.batch_threshold = 1;
    EgdFixpointResult batched = egd_fixpoint(tgd.instance, p, config);
    REQUIRE_FALSE(plain.failed);
    REQUIRE_FALSE(batched.failed);
    CHECK(plain.unified == batched.unified);
}

TEST_CASE("build_sat_encoding: seeds and shapes") {
    Program p = fixtures::load("clusters_key");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    std::vector<Term> dom = p.database().constants();
    SatEncoding enc = build_sat_encoding(tgd.instance, p, dom);

    size_t n = dom.size();
    size_t neq_count = 0, eq_count = 0;
    for (const Atom& a : enc.base.atoms()) {
        if (a.predicate == enc.neq_predicate) ++neq_count;
        if (a.predicate == enc.eq_predicate) ++eq_count;
        for (const Term& t : a.args) CHECK_FALSE(t.is_null()); // nulls frozen
    }
    CHECK(neq_count == n * (n - 1));
    CHECK(eq_count == n); // reflexive seeds
    CHECK(enc.rules.tgds.size() == p.egds.size() + 2);
    CHECK(enc.rules.egds.empty());
}

TEST_CASE("build_sat_encoding: no EGDs means the check query can never hold") {
    Program p = fixtures::parse("e(X) -> r(X,Z).\ne(a). e(b).");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p, {1000});
    SatEncoding enc = build_sat_encoding(tgd.instance, p, p.database().constants());
    CHECK(enc.rules.tgds.size() == 2); // symmetry + transitivity only
    ChaseOutcome closure = standard_chase(enc.base, enc.rules, {10000});
    CHECK_FALSE(has_match(enc.check_query.body, closure.instance));
}

TEST_CASE("build_sat_encoding: split-merge encoding derives the contradiction") {
    Program p = fixtures::load("split_merge");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    SatEncoding enc = build_sat_encoding(tgd.instance, p, p.database().constants());
    ChaseOutcome closure = standard_chase(enc.base, enc.rules, {10000});
    REQUIRE(closure.status == ChaseStatus::Saturated);
    CHECK(has_match(enc.check_query.body, closure.instance));
}

TEST_CASE("check_satisfiability on the worked examples") {
    Program intro = fixtures::load("intro");
    CHECK(check_satisfiability(intro.database(), intro));
    Program split = fixtures::load("split_merge");
    CHECK_FALSE(check_satisfiability(split.database(), split));
    Program no_egds = fixtures::parse("e(X) -> r(X,Z).\ne(a).");
    CHECK(check_satisfiability(no_egds.database(), no_egds));
}

TEST_CASE("satisfiability routes agree on the corpus and the worked examples") {
    std::vector<Program> programs;
    for (const std::string& name : fixtures::all_programs()) {
        Program p = fixtures::load(name);
        if (check_warded(p).warded) programs.push_back(std::move(p));
    }
    for (Program& p : corpus::safe_corpus(40, 8128)) programs.push_back(std::move(p));
    size_t unsat_seen = 0;
    for (const Program& p : programs) {
        Instance db = p.database();
        bool encoding_route = check_satisfiability(db, p, {4000, 1000});
        ChaseOutcome tgd = relaxed_warded_chase(db, p.tgds_only(), {4000, 1000});
        bool direct_route = !egd_fixpoint(tgd.instance, p).failed;
        CHECK(encoding_route == direct_route);
        if (!direct_route) ++unsat_seen;
    }
    INFO("unsatisfiable cases: ", unsat_seen);
    CHECK(unsat_seen >= 1); // split_merge at minimum
}

TEST_CASE("unification report matches its schema") {
    Program p = fixtures::load("clusters_key");
    ChaseOutcome tgd = relaxed_warded_chase(p.database(), p.tgds_only(), {1000});
    EgdFixpointResult fix = egd_fixpoint(tgd.instance, p);
    auto schema = schema_check::load_schema("unification.schema.json");
    auto errors = schema_check::validate(schema, nlohmann::json::parse(fix.to_json()));
    for (const std::string& e : errors) INFO(e);
    CHECK(errors.empty());
}

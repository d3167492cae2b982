#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "dlge/reason.hpp"
#include "dlge/syntax.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"

using namespace dlge;
using fixtures::c;
using fixtures::v;

namespace {

Atom mk(const std::string& pred, std::vector<Term> args) {
    return Atom(pred, std::move(args));
}

Query bcq(std::vector<Atom> body) {
    Query q;
    q.body = std::move(body);
    return q;
}

std::set<std::vector<Term>> tuple_set(const ReasoningResult& r) {
    return {r.tuples.begin(), r.tuples.end()};
}

} // namespace

TEST_CASE("chase_h: intro pipeline grounds the pipeline facts") {
    Program p = fixtures::load("intro");
    ChaseHResult result = chase_h(p.database(), p);
    REQUIRE(result.status == ReasonStatus::Answered);
    CHECK(result.queried().contains(mk("partOf", {c("thrust"), c("camshaft")})));
    CHECK(result.queried().contains(mk("partOf", {c("camshaft"), c("engine")})));
}

TEST_CASE("chase_h: empty EGD set equals the relaxed chase") {
    Program p = fixtures::parse("e(X) -> r(X,Z).\ne(a). e(b).");
    ChaseHResult result = chase_h(p.database(), p);
    REQUIRE(result.status == ReasonStatus::Answered);
    // The EGD fixpoint is empty, so the queried instance is the TGD chase.
    CHECK(result.queried() == result.tgd_chase.instance);
    CHECK(result.egd.h.empty());
    ChaseOutcome relaxed = relaxed_warded_chase(p.database(), p, {10000});
    CHECK(result.queried().size() == relaxed.instance.size());
}

TEST_CASE("chase_h: split-merge is unsatisfiable") {
    Program p = fixtures::load("split_merge");
    ChaseHResult result = chase_h(p.database(), p);
    CHECK(result.status == ReasonStatus::Unsatisfiable);
}

TEST_CASE("chase_h refuses uncertified programs unless forced") {
    Program p = fixtures::load("clusters_siblings");
    ChaseHResult refused = chase_h(p.database(), p);
    CHECK(refused.status == ReasonStatus::NotCertified);
    CHECK_FALSE(refused.safety_witnesses.empty());

    ReasonOptions options;
    options.force_unsafe = true;
    ChaseHResult forced = chase_h(p.database(), p, options);
    CHECK(forced.status == ReasonStatus::Answered);
    bool warned = false;
    for (const std::string& note : forced.notes)
        if (note.find("warning") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("answer_bcq: intro query true, false without the tag rule") {
    Program p = fixtures::load("intro");
    REQUIRE(p.queries.size() == 1);
    ReasoningResult with_both = answer_bcq(p.database(), p, p.queries[0]);
    CHECK(with_both.status == ReasonStatus::Answered);
    CHECK(with_both.bcq_answer);

    Program without_tag_egd = p;
    without_tag_egd.egds.erase(without_tag_egd.egds.begin() + 1);
    ReasoningResult without = answer_bcq(p.database(), without_tag_egd, p.queries[0]);
    CHECK(without.status == ReasonStatus::Answered);
    CHECK_FALSE(without.bcq_answer);
}

TEST_CASE("answer_bcq: key clustering query true, false TGD-only") {
    Program p = fixtures::load("clusters_key");
    REQUIRE(p.queries.size() == 1);
    ReasoningResult full = answer_bcq(p.database(), p, p.queries[0]);
    CHECK(full.bcq_answer);

    ReasonOptions tgd_only;
    tgd_only.tgd_only = true;
    ReasoningResult partial = answer_bcq(p.database(), p, p.queries[0], tgd_only);
    CHECK(partial.status == ReasonStatus::Answered);
    CHECK_FALSE(partial.bcq_answer);
}

TEST_CASE("answer_bcq: direct clustering matches its key formulation") {
    Program p = fixtures::load("clusters_shared_attribute");
    REQUIRE(p.queries.size() == 1);
    ReasoningResult full = answer_bcq(p.database(), p, p.queries[0]);
    CHECK(full.bcq_answer);
    ReasonOptions tgd_only;
    tgd_only.tgd_only = true;
    CHECK_FALSE(answer_bcq(p.database(), p, p.queries[0], tgd_only).bcq_answer);
}

TEST_CASE("answer_bcq: fusion triple needs the unsafe override and answers true") {
    Program p = fixtures::load("fusion_triple");
    REQUIRE(p.queries.size() == 1);
    ReasoningResult refused = answer_bcq(p.database(), p, p.queries[0]);
    CHECK(refused.status == ReasonStatus::NotCertified);
    ReasonOptions options;
    options.force_unsafe = true;
    ReasoningResult forced = answer_bcq(p.database(), p, p.queries[0], options);
    CHECK(forced.status == ReasonStatus::Answered);
    CHECK(forced.bcq_answer);
}

TEST_CASE("answer_bcq: unsatisfiable input entails every BCQ") {
    Program p = fixtures::load("split_merge");
    ReasoningResult r1 = answer_bcq(p.database(), p, bcq({mk("r", {c("a"), c("b")})}));
    CHECK(r1.status == ReasonStatus::Answered);
    CHECK(r1.bcq_answer);
    ReasoningResult r2 = answer_bcq(p.database(), p, bcq({mk("s", {v("X"), v("X"), v("X")})}));
    CHECK(r2.bcq_answer);
    bool noted = false;
    for (const std::string& note : r2.notes)
        if (note.find("unsatisfiable") != std::string::npos) noted = true;
    CHECK(noted);
}

TEST_CASE("answer_cq: pair clusters with the key EGD returns all nine pairs") {
    Program p = fixtures::load("pair_clusters");
    REQUIRE(p.queries.size() == 1);
    ReasoningResult r = answer_cq(p.database(), p, p.queries[0]);
    REQUIRE(r.status == ReasonStatus::Answered);
    std::set<std::vector<Term>> expect;
    for (const char* x : {"1", "2", "3"})
        for (const char* y : {"1", "2", "3"}) expect.insert({c(x), c(y)});
    CHECK(tuple_set(r) == expect);
}

TEST_CASE("answer_cq: without the EGD only track-local pairs remain") {
    Program p = fixtures::load("pair_clusters");
    p.egds.clear();
    p.facts = {mk("p", {c("1"), c("2")}), mk("p", {c("2"), c("2")})};
    Query q = p.queries[0];
    ReasoningResult r = answer_cq(p.database(), p, q);
    REQUIRE(r.status == ReasonStatus::Answered);
    std::set<std::vector<Term>> expect = {{c("1"), c("2")}, {c("2"), c("1")},
                                          {c("1"), c("1")}, {c("2"), c("2")}};
    CHECK(tuple_set(r) == expect);
}

TEST_CASE("answer_cq: no matches yields an empty set") {
    Program p = fixtures::load("pair_clusters");
    Query q;
    q.outputs = {v("X")};
    q.body = {mk("p", {v("X"), c("zzz")})};
    ReasoningResult r = answer_cq(p.database(), p, q);
    CHECK(r.status == ReasonStatus::Answered);
    CHECK(r.tuples.empty());
}

TEST_CASE("answer_cq: unsatisfiable input reports status instead of tuples") {
    Program p = fixtures::load("split_merge");
    Query q;
    q.outputs = {v("X")};
    q.body = {mk("r", {v("X"), v("Y")})};
    ReasoningResult r = answer_cq(p.database(), p, q);
    CHECK(r.status == ReasonStatus::Unsatisfiable);
    CHECK(r.tuples.empty());
}

TEST_CASE("answer_cq: nulls in answers render distinctly and filter on demand") {
    Program p = fixtures::parse("e(X) -> r(X,Z).\ne(a).\n?(X,Z) r(X,Z).");
    ReasoningResult with_nulls = answer_cq(p.database(), p, p.queries[0]);
    REQUIRE(with_nulls.tuples.size() == 1);
    CHECK(with_nulls.tuples[0][1].is_null());
    CHECK(with_nulls.tuples[0][1].text().rfind("_:n", 0) == 0);

    ReasonOptions constants_only;
    constants_only.constants_only = true;
    ReasoningResult filtered = answer_cq(p.database(), p, p.queries[0], constants_only);
    CHECK(filtered.tuples.empty());
}

TEST_CASE("verify_harmlessness: confirmed on the safe clustering programs") {
    for (const char* name : {"clusters_shared_attribute", "clusters_key"}) {
        INFO(name);
        Program p = fixtures::load(name);
        HarmlessnessReport report =
            verify_harmlessness_on_instance(p.database(), p, {2000, 400});
        CHECK(report.verdict == HarmlessnessReport::Verdict::Confirmed);
    }
    // A failing chase confirms through the other defining condition: the
    // TGD-only chase itself violates the key.
    Program split = fixtures::load("split_merge");
    HarmlessnessReport report =
        verify_harmlessness_on_instance(split.database(), split, {2000, 400});
    CHECK(report.verdict == HarmlessnessReport::Verdict::Confirmed);
}

TEST_CASE("verify_harmlessness: sibling facts witness the harmful key") {
    Program p = fixtures::load("clusters_siblings");
    HarmlessnessReport report = verify_harmlessness_on_instance(p.database(), p, {2000, 400});
    REQUIRE(report.verdict == HarmlessnessReport::Verdict::Witness);
    bool found = false;
    for (const Atom& a : report.uncovered)
        if (a == mk("siblings", {c("a"), c("c")})) found = true;
    CHECK(found);
}

TEST_CASE("verify_harmlessness: fusion program is harmless here, harmful sans copy rule") {
    Program p = fixtures::load("fusion_triple");
    HarmlessnessReport ok = verify_harmlessness_on_instance(p.database(), p, {2000, 400});
    CHECK(ok.verdict == HarmlessnessReport::Verdict::Confirmed);

    Program without_copy = p;
    without_copy.tgds.erase(without_copy.tgds.begin() + 2); // drop b(X,Y,Z) -> f(X,Y,Z)
    HarmlessnessReport bad =
        verify_harmlessness_on_instance(without_copy.database(), without_copy, {2000, 400});
    REQUIRE(bad.verdict == HarmlessnessReport::Verdict::Witness);
    bool f_uncovered = false;
    for (const Atom& a : bad.uncovered)
        if (a.predicate_name() == "f") f_uncovered = true;
    CHECK(f_uncovered);
}

TEST_CASE("verify_harmlessness: inconclusive when limits stop the chase") {
    Program p = fixtures::parse("component(X) -> component(Z), partOf(X,Z).\ncomponent(engine).");
    HarmlessnessReport report = verify_harmlessness_on_instance(p.database(), p, {20});
    CHECK(report.verdict == HarmlessnessReport::Verdict::Inconclusive);
}

TEST_CASE("pipeline BCQs agree with the bounded standard chase on the safe corpus") {
    std::mt19937 rng(90210);
    auto programs = corpus::safe_corpus(40, 90210);
    REQUIRE(programs.size() >= 30);
    size_t bcqs = 0;
    for (const Program& p : programs) {
        Instance db = p.database();
        ChaseHResult pipeline = chase_h(db, p);
        REQUIRE((pipeline.status == ReasonStatus::Answered ||
                 pipeline.status == ReasonStatus::Unsatisfiable));
        for (int i = 0; i < 8; ++i) {
            Query q = corpus::random_bcq(rng, p);
            ReasoningResult via_pipeline = answer_query(pipeline, q, {});
            auto via_standard = answer_with_standard_chase(db, p, q, {4000, 1000});
            REQUIRE(via_standard.has_value());
            INFO(q.text());
            CHECK(via_pipeline.bcq_answer == via_standard->bcq_answer);
            ++bcqs;
        }
    }
    CHECK(bcqs >= 240);
}

TEST_CASE("EGD application never loses BCQ answers") {
    std::mt19937 rng(1101);
    auto programs = corpus::safe_corpus(25, 1101);
    for (const Program& p : programs) {
        Instance db = p.database();
        ReasonOptions tgd_only;
        tgd_only.tgd_only = true;
        ChaseHResult before = chase_h(db, p, tgd_only);
        ChaseHResult after = chase_h(db, p);
        if (after.status != ReasonStatus::Answered) continue;
        for (int i = 0; i < 6; ++i) {
            Query q = corpus::random_bcq(rng, p);
            if (has_match(q.body, before.queried())) {
                INFO(q.text());
                CHECK(has_match(q.body, after.queried()));
            }
        }
    }
}

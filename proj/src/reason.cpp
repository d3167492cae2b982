#include "dlge/reason.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace dlge {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::vector<std::vector<Term>> evaluate_tuples(const Query& q, const Instance& inst,
                                               bool constants_only) {
    std::set<std::vector<Term>> seen;
    std::vector<std::vector<Term>> out;
    for_each_match(q.body, inst, {}, [&](const MatchResult& m) {
        std::vector<Term> tuple;
        tuple.reserve(q.outputs.size());
        for (const Term& v : q.outputs) tuple.push_back(m.subst.apply(v));
        if (constants_only) {
            for (const Term& t : tuple)
                if (t.is_null()) return true;
        }
        if (seen.insert(tuple).second) out.push_back(std::move(tuple));
        return true;
    });
    return out;
}

} // namespace

const char* reason_status_name(ReasonStatus s) {
    switch (s) {
    case ReasonStatus::Answered: return "answered";
    case ReasonStatus::Unsatisfiable: return "unsatisfiable";
    case ReasonStatus::NotCertified: return "not_certified";
    case ReasonStatus::StepLimit: return "step_limit";
    }
    return "?";
}

const Instance& ChaseHResult::queried() const {
    return tgd_only ? tgd_chase.instance : egd.unified;
}

ChaseHResult chase_h(const Instance& db, const Program& p, const ReasonOptions& options) {
    ChaseHResult result;
    result.tgd_only = options.tgd_only;

    WardedVerdict warded = check_warded(p);
    if (!warded.warded) {
        result.status = ReasonStatus::NotCertified;
        result.ward_violations = std::move(warded.violations);
        result.notes.push_back("TGD set is not warded");
        return result;
    }
    SafetyVerdict safety = check_safe_taintedness(p);
    if (!safety.safe) {
        result.safety_witnesses = safety.witnesses;
        if (!options.force_unsafe) {
            result.status = ReasonStatus::NotCertified;
            result.notes.push_back(
                "safe taintedness is not certified; rerun with the unsafe override or use the "
                "standard chase");
            return result;
        }
        result.notes.push_back(
            "warning: safe taintedness not certified, answers may be unsound");
    }

    auto start = std::chrono::steady_clock::now();
    result.tgd_chase = relaxed_warded_chase(db, p.tgds_only(), options.limits);
    result.stats.chase_ms = ms_since(start);
    result.stats.tgd_chase_size = result.tgd_chase.instance.size();
    result.stats.tgd_steps = result.tgd_chase.tgd_steps;
    if (result.tgd_chase.status == ChaseStatus::StepLimitExceeded) {
        result.status = ReasonStatus::StepLimit;
        return result;
    }

    if (options.tgd_only) {
        result.status = ReasonStatus::Answered;
        return result;
    }

    start = std::chrono::steady_clock::now();
    EgdFixpointConfig config;
    config.batch_threshold = options.batch_threshold;
    result.egd = egd_fixpoint(result.tgd_chase.instance, p, config);
    result.stats.egd_ms = ms_since(start);
    result.stats.egd_edges = result.egd.graph.edge_count();
    result.stats.unified_size = result.egd.unified.size();
    result.status = result.egd.failed ? ReasonStatus::Unsatisfiable : ReasonStatus::Answered;
    return result;
}

ReasoningResult answer_query(const ChaseHResult& pipeline, const Query& q,
                             const ReasonOptions& options) {
    ReasoningResult result;
    result.status = pipeline.status;
    result.notes = pipeline.notes;
    result.safety_witnesses = pipeline.safety_witnesses;
    result.ward_violations = pipeline.ward_violations;
    result.stats = pipeline.stats;
    result.boolean = q.boolean();
    result.output_vars = q.outputs;

    if (pipeline.status == ReasonStatus::NotCertified || pipeline.status == ReasonStatus::StepLimit)
        return result;

    if (pipeline.status == ReasonStatus::Unsatisfiable) {
        if (q.boolean()) {
            // Trivial entailment: an unsatisfiable theory entails every BCQ.
            result.status = ReasonStatus::Answered;
            result.bcq_answer = true;
            result.notes.push_back("input is unsatisfiable; every BCQ holds trivially");
        }
        return result;
    }

    if (q.boolean()) {
        result.bcq_answer = has_match(q.body, pipeline.queried());
    } else {
        result.tuples = evaluate_tuples(q, pipeline.queried(), options.constants_only);
    }
    return result;
}

ReasoningResult answer_bcq(const Instance& db, const Program& p, const Query& q,
                           const ReasonOptions& options) {
    return answer_query(chase_h(db, p, options), q, options);
}

ReasoningResult answer_cq(const Instance& db, const Program& p, const Query& q,
                          const ReasonOptions& options) {
    return answer_query(chase_h(db, p, options), q, options);
}

std::optional<ReasoningResult> answer_with_standard_chase(const Instance& db, const Program& p,
                                                          const Query& q, ChaseLimits limits) {
    ChaseOutcome outcome = standard_chase(db, p, limits);
    if (outcome.status == ChaseStatus::StepLimitExceeded) return std::nullopt;
    ReasoningResult result;
    result.boolean = q.boolean();
    result.output_vars = q.outputs;
    if (outcome.failed()) {
        if (q.boolean()) {
            result.status = ReasonStatus::Answered;
            result.bcq_answer = true;
            result.notes.push_back("input is unsatisfiable; every BCQ holds trivially");
        } else {
            result.status = ReasonStatus::Unsatisfiable;
        }
        return result;
    }
    result.status = ReasonStatus::Answered;
    if (q.boolean()) result.bcq_answer = has_match(q.body, outcome.instance);
    else result.tuples = evaluate_tuples(q, outcome.instance, false);
    return result;
}

HarmlessnessReport verify_harmlessness_on_instance(const Instance& db, const Program& p,
                                                   ChaseLimits limits) {
    HarmlessnessReport report;
    ChaseOutcome full = standard_chase(db, p, limits);
    ChaseOutcome tgd_only = standard_chase(db, p.tgds_only(), limits);
    if (full.status == ChaseStatus::StepLimitExceeded ||
        tgd_only.status == ChaseStatus::StepLimitExceeded) {
        report.verdict = HarmlessnessReport::Verdict::Inconclusive;
        report.detail = "chase step limit hit before saturation";
        return report;
    }
    if (full.failed()) {
        // Condition (i): the TGD-only chase must violate some EGD.
        bool violated = false;
        for (const Egd& egd : p.egds) {
            for_each_match(egd.body, tgd_only.instance, {}, [&](const MatchResult& m) {
                if (m.subst.apply(egd.lhs) != m.subst.apply(egd.rhs)) {
                    violated = true;
                    return false;
                }
                return true;
            });
            if (violated) break;
        }
        if (violated) {
            report.verdict = HarmlessnessReport::Verdict::Confirmed;
            report.detail = "chase failed and the TGD-only chase violates the EGDs";
        } else {
            report.verdict = HarmlessnessReport::Verdict::Witness;
            report.detail = "chase failed but the TGD-only chase satisfies every EGD";
        }
        return report;
    }
    auto hom = find_homomorphism(tgd_only.instance, full.instance, /*onto=*/true);
    if (hom) {
        report.verdict = HarmlessnessReport::Verdict::Confirmed;
        report.detail = "found a homomorphism mapping the TGD-only chase onto the full chase";
        report.homomorphism = std::move(hom);
        return report;
    }
    report.verdict = HarmlessnessReport::Verdict::Witness;
    report.uncovered = uncovered_facts(tgd_only.instance, full.instance);
    if (report.uncovered.empty())
        report.detail = "no homomorphism from the TGD-only chase into the full chase";
    else
        report.detail = "some full-chase facts have no preimage under any homomorphism";
    return report;
}

} // namespace dlge

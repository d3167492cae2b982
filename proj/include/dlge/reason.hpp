#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlge/analysis.hpp"
#include "dlge/chase.hpp"
#include "dlge/egd.hpp"
#include "dlge/program.hpp"

namespace dlge {

enum class ReasonStatus { Answered, Unsatisfiable, NotCertified, StepLimit };

const char* reason_status_name(ReasonStatus s);

struct ReasonStats {
    size_t tgd_chase_size = 0;
    size_t unified_size = 0;
    size_t tgd_steps = 0;
    size_t egd_edges = 0;
    double chase_ms = 0;
    double egd_ms = 0;
};

struct ReasonOptions {
    ChaseLimits limits;
    bool force_unsafe = false;   // run chase^H even when safety is not certified
    bool tgd_only = false;       // skip the EGD fixpoint
    bool constants_only = false; // drop CQ tuples containing nulls
    std::optional<size_t> batch_threshold;
};

// chase^H: relaxed warded chase of the TGDs followed by the EGD fixpoint.
struct ChaseHResult {
    ReasonStatus status = ReasonStatus::Answered;
    ChaseOutcome tgd_chase;
    EgdFixpointResult egd;
    std::vector<SafetyWitness> safety_witnesses;
    std::vector<WardViolation> ward_violations;
    std::vector<std::string> notes;
    ReasonStats stats;

    // The instance queries run against (unified unless tgd_only).
    const Instance& queried() const;
    bool tgd_only = false;
};

ChaseHResult chase_h(const Instance& db, const Program& p, const ReasonOptions& options = {});

struct ReasoningResult {
    ReasonStatus status = ReasonStatus::Answered;
    bool boolean = true;
    bool bcq_answer = false;
    std::vector<Term> output_vars;
    std::vector<std::vector<Term>> tuples;
    ReasonStats stats;
    std::vector<std::string> notes;
    std::vector<SafetyWitness> safety_witnesses;
    std::vector<WardViolation> ward_violations;
};

ReasoningResult answer_bcq(const Instance& db, const Program& p, const Query& q,
                           const ReasonOptions& options = {});
ReasoningResult answer_cq(const Instance& db, const Program& p, const Query& q,
                          const ReasonOptions& options = {});
// Dispatches on q.boolean(); reuses an already computed pipeline result.
ReasoningResult answer_query(const ChaseHResult& pipeline, const Query& q,
                             const ReasonOptions& options = {});

// Oracle path: evaluates a query over the bounded standard chase of the full
// dependency set. Returns nullopt when the chase hits the step limit.
std::optional<ReasoningResult> answer_with_standard_chase(const Instance& db, const Program& p,
                                                          const Query& q, ChaseLimits limits = {});

// Runtime harmlessness check per the defining conditions: (i) if the full
// chase fails, the TGD-only chase must violate some EGD; (ii) otherwise a
// homomorphism must map the TGD-only chase onto the full chase. Test oracle,
// not part of the query path.
struct HarmlessnessReport {
    enum class Verdict { Confirmed, Witness, Inconclusive } verdict = Verdict::Inconclusive;
    std::string detail;
    std::vector<Atom> uncovered; // full-chase facts with no preimage
    std::optional<Substitution> homomorphism;
};

HarmlessnessReport verify_harmlessness_on_instance(const Instance& db, const Program& p,
                                                   ChaseLimits limits = {});

} // namespace dlge

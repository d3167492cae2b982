#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dlge/analysis.hpp"
#include "dlge/instance.hpp"
#include "dlge/match.hpp"
#include "dlge/program.hpp"

namespace dlge {

struct ChaseEdge {
    FactId source;
    FactId target;
    int rule; // TGD index
    Substitution trigger;
    bool forest;
};

// Derivation graph over fact ids: one node per fact, edges labelled with the
// producing rule and its (extended) trigger. Forest edges are the warded
// forest: at most one incoming per node; database facts and outputs of
// ward-less nonlinear rules are roots. track(f) is the root of f's tree.
class ChaseGraph {
public:
    void add_node(FactId id);
    void add_edge(FactId source, FactId target, int rule, const Substitution& trigger,
                  bool forest);
    void contract(FactId dead, FactId survivor);

    const std::vector<ChaseEdge>& edges() const { return edges_; }
    const std::vector<FactId>& nodes() const { return nodes_; }
    bool has_node(FactId id) const { return node_set_.count(id) != 0; }

    FactId forest_parent(FactId id) const;
    FactId track(FactId id) const;
    std::vector<FactId> roots() const;
    size_t forest_edge_count() const;

private:
    std::vector<ChaseEdge> edges_;
    std::vector<FactId> nodes_;
    std::unordered_set<FactId> node_set_;
    std::unordered_map<FactId, FactId> forest_parent_;
    mutable std::unordered_map<FactId, FactId> track_memo_;
};

enum class ChaseStatus { Saturated, Failed, StepLimitExceeded };

const char* chase_status_name(ChaseStatus s);

struct EgdFailure {
    Term a;
    Term b;
    size_t egd_index = 0;
    Substitution trigger;
};

struct TranscriptStep {
    bool egd = false;
    size_t rule = 0;
    Substitution trigger;
    std::vector<FactId> produced;                    // TGD steps
    std::optional<std::pair<Term, Term>> assignment; // EGD steps
};

struct ChaseOutcome {
    ChaseStatus status = ChaseStatus::Saturated;
    Instance instance;
    ChaseGraph graph;
    Substitution egd_assignments;
    std::optional<EgdFailure> failure;
    size_t tgd_steps = 0;
    std::vector<TranscriptStep> transcript;

    bool failed() const { return status == ChaseStatus::Failed; }
    std::string transcript_jsonl() const;
};

struct ChaseLimits {
    size_t max_tgd_steps = 10000;
    // Secondary guardrail for databases whose trigger universe explodes;
    // exceeding it reports StepLimitExceeded as well.
    size_t max_facts = SIZE_MAX;
};

// Round-based chase: all applicable TGD steps of a round (each rule/trigger
// fires at most once, restricted-chase applicability), then EGD steps to
// fixpoint. May hit the step limit; failure means a hard EGD violation.
ChaseOutcome standard_chase(const Instance& db, const Program& p, ChaseLimits limits = {});

// TGD-only chase gated by plain fact isomorphism: candidate facts with an
// isomorphic live fact are not generated. Requires warded TGDs.
ChaseOutcome warded_chase(const Instance& db, const Program& p, ChaseLimits limits = {});

// TGD-only chase gated by T-isomorphism: a candidate is suppressed only if an
// isomorphic fact with the same track exists. When any candidate of a step
// survives, all of the step's facts are inserted so shared fresh nulls keep
// their joins. Requires warded TGDs.
ChaseOutcome relaxed_warded_chase(const Instance& db, const Program& p, ChaseLimits limits = {});

// One restricted TGD step for an explicit trigger: extends the trigger with
// fresh nulls, inserts head facts not already present, and wires graph edges.
// A no-op when some extension of the trigger already satisfies the head.
std::vector<FactId> tgd_step(Instance& inst, ChaseGraph& graph, const Program& p,
                             size_t tgd_index, const Substitution& trigger);

struct EgdStepResult {
    enum class Kind { NoOp, Assigned, Failure } kind = Kind::NoOp;
    Term from;
    Term to;
};

// One EGD step: both sides constants fails, otherwise the null side is
// rewritten throughout the instance (younger null to older) and the
// assignment is recorded with back-substitution into earlier targets.
EgdStepResult egd_step(Instance& inst, ChaseGraph& graph, const Program& p, size_t egd_index,
                       const Substitution& trigger, Substitution& assignments);

FactId compute_track(const ChaseGraph& graph, FactId id);

struct DotOptions {
    bool clusters = false; // group nodes by track
};

std::string export_dot(const ChaseGraph& graph, const Instance& inst, DotOptions options = {});

} // namespace dlge

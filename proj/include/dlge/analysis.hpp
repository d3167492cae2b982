#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dlge/program.hpp"

namespace dlge {

// 1-based predicate position.
struct Position {
    uint32_t predicate = 0;
    int index = 0;

    std::string text() const;
    friend bool operator==(const Position& a, const Position& b) {
        return a.predicate == b.predicate && a.index == b.index;
    }
    friend bool operator<(const Position& a, const Position& b) {
        if (a.predicate != b.predicate) return a.predicate < b.predicate;
        return a.index < b.index;
    }
};

enum class VarClass { Harmless, Harmful, Dangerous };

const char* var_class_name(VarClass c);

// Per-dependency view of body variables. `tainted` marks variables occurring
// in a tainted body position.
struct RuleVariables {
    std::map<Term, VarClass> classes;
    std::set<Term> tainted;
};

struct WardViolation {
    size_t tgd_index = 0; // 0-based
    std::vector<Term> variables;
    std::string text() const;
};

struct SafetyWitness {
    enum class Kind { RepeatedVariable, GroundTaintedPosition };
    Kind kind;
    bool on_egd = false;
    size_t rule_index = 0; // 0-based within tgds or egds
    int line = 0;
    Term variable;     // for RepeatedVariable
    Position position; // for GroundTaintedPosition
    std::string text() const;
};

struct AnalysisReport {
    std::set<Position> affected;
    std::set<Position> tainted;
    std::map<Position, std::set<size_t>> taint_cause; // position -> EGD indices

    std::vector<RuleVariables> tgd_vars;
    std::vector<RuleVariables> egd_vars;

    std::vector<std::optional<size_t>> wards; // per TGD: body atom index
    bool warded = false;
    std::vector<WardViolation> ward_violations;

    bool safe = false;
    std::vector<SafetyWitness> safety_witnesses;

    std::string to_json() const;
};

std::set<Position> affected_positions(const Program& p);

// A body variable is harmful iff all its body occurrences sit in affected
// positions; dangerous iff harmful and it also occurs in the head. For EGDs
// the equality sides count as the head.
RuleVariables classify_tgd_variables(const Tgd& rule, const std::set<Position>& affected);
RuleVariables classify_egd_variables(const Egd& rule, const std::set<Position>& affected);

struct WardedVerdict {
    bool warded = false;
    std::vector<std::optional<size_t>> wards;
    std::vector<WardViolation> violations;
};
WardedVerdict check_warded(const Program& p);

struct TaintResult {
    std::set<Position> tainted;
    std::map<Position, std::set<size_t>> cause;
};
TaintResult tainted_positions(const Program& p);

struct SafetyVerdict {
    bool safe = false;
    std::vector<SafetyWitness> witnesses;
};
SafetyVerdict check_safe_taintedness(const Program& p);

AnalysisReport analyze(const Program& p);

} // namespace dlge

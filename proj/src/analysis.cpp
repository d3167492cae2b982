#include "dlge/analysis.hpp"

#include <sstream>

#include "json.hpp"

namespace dlge {

namespace {

using PositionsOf = std::map<Term, std::vector<Position>>;

PositionsOf positions_of(const std::vector<Atom>& atoms) {
    PositionsOf out;
    for (const Atom& a : atoms)
        for (size_t i = 0; i < a.args.size(); ++i)
            if (a.args[i].is_variable())
                out[a.args[i]].push_back({a.predicate, static_cast<int>(i) + 1});
    return out;
}

bool all_affected(const std::vector<Position>& positions, const std::set<Position>& affected) {
    for (const Position& p : positions)
        if (!affected.count(p)) return false;
    return !positions.empty();
}

RuleVariables classify(const std::vector<Atom>& body, const std::vector<Term>& head_vars,
                       const std::set<Position>& affected) {
    RuleVariables out;
    PositionsOf body_pos = positions_of(body);
    for (const auto& [var, positions] : body_pos) {
        bool harmful = all_affected(positions, affected);
        bool in_head = false;
        for (const Term& h : head_vars)
            if (h == var) in_head = true;
        out.classes[var] =
            !harmful ? VarClass::Harmless : (in_head ? VarClass::Dangerous : VarClass::Harmful);
    }
    return out;
}

std::vector<Term> head_vars_of(const Tgd& rule) {
    std::set<Term> vars;
    for (const Atom& a : rule.head)
        for (const Term& t : a.args)
            if (t.is_variable()) vars.insert(t);
    return {vars.begin(), vars.end()};
}

} // namespace

std::string Position::text() const {
    return SymbolTable::global().name(predicate) + "[" + std::to_string(index) + "]";
}

const char* var_class_name(VarClass c) {
    switch (c) {
    case VarClass::Harmless: return "harmless";
    case VarClass::Harmful: return "harmful";
    case VarClass::Dangerous: return "dangerous";
    }
    return "?";
}

std::string WardViolation::text() const {
    std::ostringstream out;
    out << "tgd " << tgd_index + 1 << ": dangerous variables";
    for (const Term& v : variables) out << ' ' << v.text();
    out << " do not share a body atom";
    return out.str();
}

std::string SafetyWitness::text() const {
    std::ostringstream out;
    out << (on_egd ? "egd " : "tgd ") << rule_index + 1 << " (line " << line << "): ";
    if (kind == Kind::RepeatedVariable)
        out << "tainted variable " << variable.text() << " is repeated in the body";
    else
        out << "constant in tainted position " << position.text();
    return out.str();
}

std::set<Position> affected_positions(const Program& p) {
    std::set<Position> affected;
    for (const Tgd& rule : p.tgds) {
        std::vector<Term> exist_list = rule.existential_vars();
        std::set<Term> exist(exist_list.begin(), exist_list.end());
        for (const Atom& a : rule.head)
            for (size_t i = 0; i < a.args.size(); ++i)
                if (a.args[i].is_variable() && exist.count(a.args[i]))
                    affected.insert({a.predicate, static_cast<int>(i) + 1});
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Tgd& rule : p.tgds) {
            PositionsOf body_pos = positions_of(rule.body);
            PositionsOf head_pos = positions_of(rule.head);
            for (const auto& [var, positions] : body_pos) {
                if (!head_pos.count(var)) continue;
                if (!all_affected(positions, affected)) continue;
                for (const Position& hp : head_pos[var])
                    if (affected.insert(hp).second) changed = true;
            }
        }
    }
    return affected;
}

RuleVariables classify_tgd_variables(const Tgd& rule, const std::set<Position>& affected) {
    return classify(rule.body, head_vars_of(rule), affected);
}

RuleVariables classify_egd_variables(const Egd& rule, const std::set<Position>& affected) {
    return classify(rule.body, {rule.lhs, rule.rhs}, affected);
}

WardedVerdict check_warded(const Program& p) {
    WardedVerdict verdict;
    std::set<Position> affected = affected_positions(p);
    verdict.warded = true;
    for (size_t i = 0; i < p.tgds.size(); ++i) {
        const Tgd& rule = p.tgds[i];
        RuleVariables vars = classify_tgd_variables(rule, affected);
        std::vector<Term> dangerous;
        for (const auto& [var, cls] : vars.classes)
            if (cls == VarClass::Dangerous) dangerous.push_back(var);
        if (dangerous.empty()) {
            verdict.wards.emplace_back(std::nullopt);
            continue;
        }
        std::optional<size_t> ward;
        for (size_t b = 0; b < rule.body.size() && !ward; ++b) {
            bool contains_all = true;
            for (const Term& v : dangerous) {
                bool found = false;
                for (const Term& t : rule.body[b].args)
                    if (t == v) found = true;
                if (!found) {
                    contains_all = false;
                    break;
                }
            }
            if (contains_all) ward = b;
        }
        verdict.wards.push_back(ward);
        if (!ward) {
            verdict.warded = false;
            verdict.violations.push_back({i, std::move(dangerous)});
        }
    }
    return verdict;
}

TaintResult tainted_positions(const Program& p) {
    TaintResult result;
    std::set<Position> affected = affected_positions(p);

    // Seed: affected body positions of harmful equality sides.
    for (size_t e = 0; e < p.egds.size(); ++e) {
        const Egd& egd = p.egds[e];
        RuleVariables vars = classify_egd_variables(egd, affected);
        PositionsOf body_pos = positions_of(egd.body);
        for (const Term& side : {egd.lhs, egd.rhs}) {
            auto cls = vars.classes.find(side);
            if (cls == vars.classes.end() || cls->second == VarClass::Harmless) continue;
            for (const Position& pos : body_pos[side]) {
                result.tainted.insert(pos);
                result.cause[pos].insert(e);
            }
        }
    }

    // Propagate through TGDs along shared variables, body<->head.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Tgd& rule : p.tgds) {
            PositionsOf body_pos = positions_of(rule.body);
            PositionsOf head_pos = positions_of(rule.head);
            for (const auto& [var, bpositions] : body_pos) {
                auto hit = head_pos.find(var);
                if (hit == head_pos.end()) continue;
                const std::vector<Position>& hpositions = hit->second;
                auto flow = [&](const std::vector<Position>& from,
                                const std::vector<Position>& to) {
                    std::set<size_t> causes;
                    bool any = false;
                    for (const Position& pos : from) {
                        if (!result.tainted.count(pos)) continue;
                        any = true;
                        auto c = result.cause.find(pos);
                        if (c != result.cause.end())
                            causes.insert(c->second.begin(), c->second.end());
                    }
                    if (!any) return;
                    for (const Position& pos : to) {
                        if (result.tainted.insert(pos).second) changed = true;
                        for (size_t cause : causes)
                            if (result.cause[pos].insert(cause).second) changed = true;
                    }
                };
                flow(bpositions, hpositions);
                flow(hpositions, bpositions);
            }
        }
    }
    return result;
}

SafetyVerdict check_safe_taintedness(const Program& p) {
    SafetyVerdict verdict;
    TaintResult taint = tainted_positions(p);

    auto check_rule = [&](const std::vector<Atom>& body, const std::vector<Atom>& head,
                          bool on_egd, size_t index, int line) {
        std::map<Term, int> occurrences;
        std::set<Term> tainted_vars;
        for (const Atom& a : body)
            for (size_t i = 0; i < a.args.size(); ++i) {
                const Term& t = a.args[i];
                Position pos{a.predicate, static_cast<int>(i) + 1};
                bool is_tainted = taint.tainted.count(pos) != 0;
                if (t.is_variable()) {
                    ++occurrences[t];
                    if (is_tainted) tainted_vars.insert(t);
                } else if (t.is_constant() && is_tainted) {
                    verdict.witnesses.push_back({SafetyWitness::Kind::GroundTaintedPosition, on_egd,
                                                 index, line, Term(), pos});
                }
            }
        for (const Term& v : tainted_vars)
            if (occurrences[v] > 1)
                verdict.witnesses.push_back(
                    {SafetyWitness::Kind::RepeatedVariable, on_egd, index, line, v, {}});
        for (const Atom& a : head)
            for (size_t i = 0; i < a.args.size(); ++i) {
                Position pos{a.predicate, static_cast<int>(i) + 1};
                if (a.args[i].is_constant() && taint.tainted.count(pos))
                    verdict.witnesses.push_back({SafetyWitness::Kind::GroundTaintedPosition, on_egd,
                                                 index, line, Term(), pos});
            }
    };

    for (size_t i = 0; i < p.tgds.size(); ++i)
        check_rule(p.tgds[i].body, p.tgds[i].head, false, i, p.tgds[i].line);
    for (size_t i = 0; i < p.egds.size(); ++i) check_rule(p.egds[i].body, {}, true, i, p.egds[i].line);

    verdict.safe = verdict.witnesses.empty();
    return verdict;
}

AnalysisReport analyze(const Program& p) {
    AnalysisReport report;
    report.affected = affected_positions(p);
    TaintResult taint = tainted_positions(p);
    report.tainted = std::move(taint.tainted);
    report.taint_cause = std::move(taint.cause);
    for (const Tgd& rule : p.tgds) {
        RuleVariables vars = classify_tgd_variables(rule, report.affected);
        PositionsOf body_pos = positions_of(rule.body);
        for (const auto& [var, positions] : body_pos)
            for (const Position& pos : positions)
                if (report.tainted.count(pos)) vars.tainted.insert(var);
        report.tgd_vars.push_back(std::move(vars));
    }
    for (const Egd& rule : p.egds) {
        RuleVariables vars = classify_egd_variables(rule, report.affected);
        PositionsOf body_pos = positions_of(rule.body);
        for (const auto& [var, positions] : body_pos)
            for (const Position& pos : positions)
                if (report.tainted.count(pos)) vars.tainted.insert(var);
        report.egd_vars.push_back(std::move(vars));
    }
    WardedVerdict warded = check_warded(p);
    report.wards = std::move(warded.wards);
    report.warded = warded.warded;
    report.ward_violations = std::move(warded.violations);
    SafetyVerdict safety = check_safe_taintedness(p);
    report.safe = safety.safe;
    report.safety_witnesses = std::move(safety.witnesses);
    return report;
}

std::string AnalysisReport::to_json() const {
    nlohmann::json j;
    auto positions_json = [](const std::set<Position>& positions) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Position& p : positions)
            arr.push_back({{"predicate", SymbolTable::global().name(p.predicate)},
                           {"index", p.index}});
        return arr;
    };
    j["affected"] = positions_json(affected);
    j["tainted"] = positions_json(tainted);
    nlohmann::json causes = nlohmann::json::array();
    for (const auto& [pos, egds] : taint_cause) {
        nlohmann::json entry;
        entry["position"] = {{"predicate", SymbolTable::global().name(pos.predicate)},
                             {"index", pos.index}};
        entry["egds"] = nlohmann::json::array();
        for (size_t e : egds) entry["egds"].push_back(e + 1);
        causes.push_back(entry);
    }
    j["taint_cause"] = causes;
    auto vars_json = [](const std::vector<RuleVariables>& rules) {
        nlohmann::json arr = nlohmann::json::array();
        for (const RuleVariables& rv : rules) {
            nlohmann::json entry = nlohmann::json::object();
            for (const auto& [var, cls] : rv.classes) {
                entry[var.text()] = {{"class", var_class_name(cls)},
                                     {"tainted", rv.tainted.count(var) != 0}};
            }
            arr.push_back(entry);
        }
        return arr;
    };
    j["tgd_variables"] = vars_json(tgd_vars);
    j["egd_variables"] = vars_json(egd_vars);
    nlohmann::json wards_json = nlohmann::json::array();
    for (const auto& ward : wards)
        wards_json.push_back(ward ? nlohmann::json(*ward) : nlohmann::json(nullptr));
    j["wards"] = wards_json;
    j["warded"] = warded;
    nlohmann::json violations = nlohmann::json::array();
    for (const WardViolation& v : ward_violations) violations.push_back(v.text());
    j["ward_violations"] = violations;
    j["safe"] = safe;
    nlohmann::json witnesses = nlohmann::json::array();
    for (const SafetyWitness& w : safety_witnesses) witnesses.push_back(w.text());
    j["safety_witnesses"] = witnesses;
    return j.dump(2);
}

} // namespace dlge

#include "dlge/chase.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dlge {

void ChaseGraph::add_node(FactId id) {
    if (node_set_.insert(id).second) nodes_.push_back(id);
}

void ChaseGraph::add_edge(FactId source, FactId target, int rule, const Substitution& trigger,
                          bool forest) {
    add_node(source);
    add_node(target);
    if (forest) {
        auto [it, inserted] = forest_parent_.emplace(target, source);
        if (!inserted) forest = false; // keep the first incoming forest edge
        track_memo_.clear();
    }
    edges_.push_back({source, target, rule, trigger, forest});
}

void ChaseGraph::contract(FactId dead, FactId survivor) {
    if (dead == survivor) return;
    for (ChaseEdge& e : edges_) {
        if (e.source == dead) e.source = survivor;
        if (e.target == dead) e.target = survivor;
    }
    edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                                [](const ChaseEdge& e) { return e.source == e.target; }),
                 edges_.end());
    node_set_.erase(dead);
    nodes_.erase(std::remove(nodes_.begin(), nodes_.end(), dead), nodes_.end());
    forest_parent_.erase(dead);
    for (auto& [child, parent] : forest_parent_)
        if (parent == dead) parent = survivor;
    // A contraction could orphan a forest edge record; drop self-parents.
    auto self = forest_parent_.find(survivor);
    if (self != forest_parent_.end() && self->second == survivor) forest_parent_.erase(self);
    track_memo_.clear();
}

FactId ChaseGraph::forest_parent(FactId id) const {
    auto it = forest_parent_.find(id);
    return it == forest_parent_.end() ? kNoFact : it->second;
}

FactId ChaseGraph::track(FactId id) const {
    auto memo = track_memo_.find(id);
    if (memo != track_memo_.end()) return memo->second;
    std::vector<FactId> path;
    FactId cur = id;
    while (true) {
        auto it = forest_parent_.find(cur);
        if (it == forest_parent_.end()) break;
        path.push_back(cur);
        cur = it->second;
    }
    for (FactId v : path) track_memo_[v] = cur;
    track_memo_[id] = cur;
    return cur;
}

std::vector<FactId> ChaseGraph::roots() const {
    std::vector<FactId> out;
    for (FactId id : nodes_)
        if (!forest_parent_.count(id)) out.push_back(id);
    return out;
}

size_t ChaseGraph::forest_edge_count() const {
    return forest_parent_.size();
}

const char* chase_status_name(ChaseStatus s) {
    switch (s) {
    case ChaseStatus::Saturated: return "saturated";
    case ChaseStatus::Failed: return "failed";
    case ChaseStatus::StepLimitExceeded: return "step_limit_exceeded";
    }
    return "?";
}

std::string ChaseOutcome::transcript_jsonl() const {
    std::ostringstream out;
    for (const TranscriptStep& step : transcript) {
        nlohmann::json j;
        j["rule_kind"] = step.egd ? "egd" : "tgd";
        j["rule"] = step.rule + 1;
        nlohmann::json trig = nlohmann::json::object();
        {
            std::vector<std::pair<Term, Term>> entries(step.trigger.entries().begin(),
                                                       step.trigger.entries().end());
            std::sort(entries.begin(), entries.end());
            for (const auto& [src, dst] : entries) trig[src.text()] = dst.text();
        }
        j["trigger"] = trig;
        if (step.egd) {
            if (step.assignment)
                j["assignment"] = {{"from", step.assignment->first.text()},
                                   {"to", step.assignment->second.text()}};
        } else {
            nlohmann::json produced = nlohmann::json::array();
            for (FactId id : step.produced) produced.push_back(id);
            j["produced"] = produced;
        }
        out << j.dump() << '\n';
    }
    return out.str();
}

namespace {

struct PatternKey {
    std::vector<uint64_t> data;
    bool operator==(const PatternKey& o) const { return data == o.data; }
};

struct PatternKeyHash {
    size_t operator()(const PatternKey& k) const {
        size_t h = 1469598103934665603ULL;
        for (uint64_t v : k.data) h = (h ^ v) * 1099511628211ULL;
        return h;
    }
};

struct TriggerKey {
    size_t rule;
    std::vector<Atom> image;
    bool operator==(const TriggerKey& o) const { return rule == o.rule && image == o.image; }
};

struct TriggerKeyHash {
    size_t operator()(const TriggerKey& k) const {
        size_t h = k.rule * 1099511628211ULL;
        for (const Atom& a : k.image) h = h * 31 + a.hash();
        return h;
    }
};

enum class Variant { Standard, Warded, Relaxed };

bool neq_constraints_pass(const Tgd& rule, const Substitution& theta) {
    for (const auto& [lhs, rhs] : rule.neqs) {
        Term a = theta.apply(lhs);
        Term b = theta.apply(rhs);
        // Only distinct constants pass; a null on either side blocks.
        if (!a.is_constant() || !b.is_constant() || a == b) return false;
    }
    return true;
}

class Engine {
public:
    Engine(const Instance& db, const Program& p, ChaseLimits limits, Variant variant)
        : prog_(p), limits_(limits), variant_(variant) {
        if (variant_ != Variant::Standard) {
            WardedVerdict verdict = check_warded(p);
            if (!verdict.warded)
                throw std::invalid_argument("warded chase requires a warded TGD set");
            wards_ = std::move(verdict.wards);
        } else {
            wards_ = check_warded(p).wards;
        }
        for (const Atom& fact : db.atoms()) {
            FactId id = outcome_.instance.insert(fact);
            register_fact(id);
            delta_.push_back(id);
        }
    }

    ChaseOutcome run() {
        bool out_of_steps = false;
        while (true) {
            // No point materializing more triggers than we may still fire; a
            // truncated round keeps its delta and rescans (fired triggers are
            // skipped through the seen-set).
            size_t remaining = limits_.max_tgd_steps - outcome_.tgd_steps;
            bool truncated = false;
            std::vector<std::pair<size_t, MatchResult>> round =
                collect_triggers(remaining + 1, truncated);
            if (!truncated) delta_.clear();
            size_t fired = 0;
            for (const auto& [rule_idx, m] : round) {
                if (outcome_.tgd_steps >= limits_.max_tgd_steps ||
                    outcome_.instance.size() >= limits_.max_facts) {
                    out_of_steps = true;
                    break;
                }
                if (fire(rule_idx, m)) ++fired;
            }
            bool egd_acted = false;
            if (variant_ == Variant::Standard && !prog_.egds.empty()) {
                if (!egd_fixpoint_rounds(egd_acted)) return std::move(outcome_); // failed
                // Rewrites can enable triggers among untouched facts; rescan.
                if (egd_acted) delta_ = outcome_.instance.fact_ids();
            }
            if (out_of_steps) {
                outcome_.status = ChaseStatus::StepLimitExceeded;
                return std::move(outcome_);
            }
            if (fired == 0 && !egd_acted && !truncated) {
                outcome_.status = ChaseStatus::Saturated;
                return std::move(outcome_);
            }
        }
    }

private:
    void register_fact(FactId id) {
        outcome_.graph.add_node(id);
        pattern_index_[PatternKey{canonical_pattern(outcome_.instance.atom(id))}].push_back(id);
    }

    // Semi-naive collection: every trigger must touch a fact from the last
    // round's delta, pinned to one body atom at a time; duplicates across
    // pins collapse on the trigger image. Stops at `cap` fresh triggers.
    std::vector<std::pair<size_t, MatchResult>> collect_triggers(size_t cap, bool& truncated) {
        std::vector<std::pair<size_t, MatchResult>> out;
        std::unordered_set<TriggerKey, TriggerKeyHash> in_round;
        truncated = false;
        for (size_t r = 0; r < prog_.tgds.size() && !truncated; ++r) {
            const Tgd& rule = prog_.tgds[r];
            for (size_t pin = 0; pin < rule.body.size() && !truncated; ++pin) {
                const Atom& pinned = rule.body[pin];
                std::vector<Atom> rest;
                for (size_t j = 0; j < rule.body.size(); ++j)
                    if (j != pin) rest.push_back(rule.body[j]);
                for (FactId df : delta_) {
                    if (truncated) break;
                    if (!outcome_.instance.live(df)) continue;
                    const Atom& fact = outcome_.instance.atom(df);
                    if (fact.predicate != pinned.predicate ||
                        fact.args.size() != pinned.args.size())
                        continue;
                    Substitution seed;
                    bool ok = true;
                    for (size_t k = 0; k < pinned.args.size() && ok; ++k) {
                        const Term& t = pinned.args[k];
                        if (t.is_variable()) ok = seed.bind(t, fact.args[k]);
                        else ok = t == fact.args[k];
                    }
                    if (!ok) continue;
                    for_each_match(rest, outcome_.instance, seed, [&](const MatchResult& m) {
                        if (!neq_constraints_pass(rule, m.subst)) return true;
                        TriggerKey key{r, m.subst.apply(rule.body)};
                        if (seen_.count(key) || !in_round.insert(key).second) return true;
                        MatchResult full;
                        full.subst = m.subst;
                        full.atom_facts.resize(rule.body.size());
                        size_t rest_idx = 0;
                        for (size_t j = 0; j < rule.body.size(); ++j)
                            full.atom_facts[j] = j == pin ? df : m.atom_facts[rest_idx++];
                        out.emplace_back(r, std::move(full));
                        if (out.size() >= cap) {
                            truncated = true;
                            return false;
                        }
                        return true;
                    });
                }
            }
        }
        return out;
    }

    // Candidate facts of one step share the extended trigger. Returns false
    // when the step was not applicable (seen, satisfied or fully suppressed).
    bool fire(size_t rule_idx, const MatchResult& m) {
        const Tgd& rule = prog_.tgds[rule_idx];
        TriggerKey key{rule_idx, m.subst.apply(rule.body)};
        if (!seen_.insert(key).second) return false;
        // Restricted applicability: some extension already satisfies the head.
        if (has_match(rule.head, outcome_.instance, m.subst)) return false;

        Substitution extended = m.subst;
        for (const Term& v : rule.existential_vars()) extended.bind(v, Term::fresh_null());

        std::vector<Atom> candidates;
        for (const Atom& h : rule.head) {
            Atom fact = extended.apply(h);
            if (std::find(candidates.begin(), candidates.end(), fact) == candidates.end())
                candidates.push_back(std::move(fact));
        }

        // Forest parent for this step's outputs.
        FactId parent = kNoFact;
        if (rule.body.size() == 1) {
            parent = m.atom_facts[0];
        } else if (wards_[rule_idx]) {
            parent = m.atom_facts[*wards_[rule_idx]];
        }

        std::vector<bool> suppressed(candidates.size(), false);
        if (variant_ != Variant::Standard) {
            for (size_t i = 0; i < candidates.size(); ++i)
                suppressed[i] = is_suppressed(candidates[i], parent);
            if (std::all_of(suppressed.begin(), suppressed.end(), [](bool b) { return b; }))
                return false;
        }

        std::vector<FactId> body_facts;
        for (FactId id : m.atom_facts)
            if (std::find(body_facts.begin(), body_facts.end(), id) == body_facts.end())
                body_facts.push_back(id);

        std::vector<FactId> produced;
        for (size_t i = 0; i < candidates.size(); ++i) {
            // Plain-isomorphism gating drops suppressed candidates one by one;
            // T-isomorphism keeps the whole step so shared nulls stay joined.
            if (variant_ == Variant::Warded && suppressed[i]) continue;
            if (outcome_.instance.contains(candidates[i])) continue;
            FactId id = outcome_.instance.insert(candidates[i]);
            register_fact(id);
            delta_.push_back(id);
            for (FactId src : body_facts)
                outcome_.graph.add_edge(src, id, static_cast<int>(rule_idx), extended,
                                        src == parent);
            produced.push_back(id);
        }
        if (produced.empty()) return false;
        ++outcome_.tgd_steps;
        outcome_.transcript.push_back({false, rule_idx, extended, produced, std::nullopt});
        return true;
    }

    bool is_suppressed(const Atom& candidate, FactId parent) const {
        auto it = pattern_index_.find(PatternKey{canonical_pattern(candidate)});
        if (it == pattern_index_.end()) return false;
        if (variant_ == Variant::Warded) {
            for (FactId id : it->second)
                if (outcome_.instance.live(id)) return true;
            return false;
        }
        // Relaxed: same canonical pattern and the same track. Outputs of
        // ward-less nonlinear rules are fresh roots and are never suppressed.
        if (parent == kNoFact) return false;
        FactId candidate_track = outcome_.graph.track(parent);
        for (FactId id : it->second)
            if (outcome_.instance.live(id) && outcome_.graph.track(id) == candidate_track)
                return true;
        return false;
    }

    // Applies EGD steps to fixpoint, one matching pass at a time: all pairs
    // of a pass merge through a small union-find and the instance is
    // rewritten once per pass. Sequential replay of the recorded assignments
    // produces the same instance. Returns false on hard violation.
    bool egd_fixpoint_rounds(bool& acted) {
        struct Pair {
            Term a, b;
            size_t egd;
            Substitution trigger;
        };
        while (true) {
            std::vector<Pair> pairs;
            for (size_t e = 0; e < prog_.egds.size(); ++e) {
                const Egd& egd = prog_.egds[e];
                for_each_match(egd.body, outcome_.instance, {}, [&](const MatchResult& m) {
                    Term a = m.subst.apply(egd.lhs);
                    Term b = m.subst.apply(egd.rhs);
                    if (a != b) pairs.push_back({a, b, e, m.subst});
                    return true;
                });
            }
            std::unordered_map<Term, Term, TermHash> parent;
            std::function<Term(Term)> find = [&](Term t) {
                auto it = parent.find(t);
                if (it == parent.end() || it->second == t) return t;
                Term root = find(it->second);
                it->second = root;
                return root;
            };
            bool merged = false;
            for (const Pair& pair : pairs) {
                Term a = find(pair.a);
                Term b = find(pair.b);
                if (a == b) continue;
                if (a.is_constant() && b.is_constant()) {
                    outcome_.status = ChaseStatus::Failed;
                    outcome_.failure = EgdFailure{a, b, pair.egd, pair.trigger};
                    return false;
                }
                Term from, to;
                if (a.is_null() && b.is_null()) {
                    from = a.id() > b.id() ? a : b;
                    to = a.id() > b.id() ? b : a;
                } else if (a.is_null()) {
                    from = a;
                    to = b;
                } else {
                    from = b;
                    to = a;
                }
                parent.emplace(to, to);
                parent[from] = to;
                record_assignment(outcome_.egd_assignments, from, to);
                outcome_.transcript.push_back(
                    {true, pair.egd, pair.trigger, {}, std::make_pair(from, to)});
                merged = true;
            }
            if (!merged) return true;
            acted = true;
            Substitution pass;
            for (const auto& [term, _] : parent) {
                Term root = find(term);
                if (root != term) pass.bind(term, root);
            }
            std::vector<Instance::Merge> merges = outcome_.instance.rewrite(pass);
            for (const auto& merge : merges) outcome_.graph.contract(merge.dead, merge.survivor);
            rebuild_pattern_index();
        }
    }

    void rebuild_pattern_index() {
        pattern_index_.clear();
        for (FactId id : outcome_.instance.fact_ids())
            pattern_index_[PatternKey{canonical_pattern(outcome_.instance.atom(id))}].push_back(id);
    }

public:
    static void record_assignment(Substitution& assignments, const Term& from, const Term& to) {
        std::vector<std::pair<Term, Term>> updates;
        for (const auto& [src, dst] : assignments.entries())
            if (dst == from) updates.emplace_back(src, to);
        for (const auto& [src, dst] : updates) {
            assignments.erase(src);
            assignments.bind(src, dst);
        }
        assignments.erase(from);
        assignments.bind(from, to);
    }

private:
    const Program& prog_;
    ChaseLimits limits_;
    Variant variant_;
    std::vector<std::optional<size_t>> wards_;
    ChaseOutcome outcome_;
    std::vector<FactId> delta_;
    std::unordered_map<PatternKey, std::vector<FactId>, PatternKeyHash> pattern_index_;
    std::unordered_set<TriggerKey, TriggerKeyHash> seen_;
};

} // namespace

ChaseOutcome standard_chase(const Instance& db, const Program& p, ChaseLimits limits) {
    return Engine(db, p, limits, Variant::Standard).run();
}

ChaseOutcome warded_chase(const Instance& db, const Program& p, ChaseLimits limits) {
    return Engine(db, p, limits, Variant::Warded).run();
}

ChaseOutcome relaxed_warded_chase(const Instance& db, const Program& p, ChaseLimits limits) {
    return Engine(db, p, limits, Variant::Relaxed).run();
}

std::vector<FactId> tgd_step(Instance& inst, ChaseGraph& graph, const Program& p, size_t tgd_index,
                             const Substitution& trigger) {
    const Tgd& rule = p.tgds.at(tgd_index);
    std::vector<FactId> body_facts;
    for (const Atom& b : rule.body) {
        FactId id = inst.find_fact(trigger.apply(b));
        if (id == kNoFact)
            throw std::invalid_argument("trigger does not match the instance: " + b.text());
        if (std::find(body_facts.begin(), body_facts.end(), id) == body_facts.end())
            body_facts.push_back(id);
        graph.add_node(id);
    }
    if (has_match(rule.head, inst, trigger)) return {};

    Substitution extended = trigger;
    for (const Term& v : rule.existential_vars()) extended.bind(v, Term::fresh_null());

    std::optional<size_t> ward;
    WardedVerdict verdict = check_warded(p);
    if (tgd_index < verdict.wards.size()) ward = verdict.wards[tgd_index];
    FactId parent = kNoFact;
    if (rule.body.size() == 1)
        parent = inst.find_fact(trigger.apply(rule.body[0]));
    else if (ward) {
        FactId id = inst.find_fact(trigger.apply(rule.body[*ward]));
        parent = id;
    }

    std::vector<FactId> produced;
    for (const Atom& h : rule.head) {
        Atom fact = extended.apply(h);
        if (inst.contains(fact)) continue;
        FactId id = inst.insert(fact);
        graph.add_node(id);
        for (FactId src : body_facts)
            graph.add_edge(src, id, static_cast<int>(tgd_index), extended, src == parent);
        if (std::find(produced.begin(), produced.end(), id) == produced.end())
            produced.push_back(id);
    }
    return produced;
}

EgdStepResult egd_step(Instance& inst, ChaseGraph& graph, const Program& p, size_t egd_index,
                       const Substitution& trigger, Substitution& assignments) {
    const Egd& egd = p.egds.at(egd_index);
    for (const Atom& b : egd.body)
        if (!inst.contains(trigger.apply(b)))
            throw std::invalid_argument("trigger does not match the instance: " + b.text());
    Term a = trigger.apply(egd.lhs);
    Term b = trigger.apply(egd.rhs);
    EgdStepResult result;
    if (a == b) return result; // precondition fails: no-op
    if (a.is_constant() && b.is_constant()) {
        result.kind = EgdStepResult::Kind::Failure;
        result.from = a;
        result.to = b;
        return result;
    }
    Term from, to;
    if (a.is_null() && b.is_null()) {
        from = a.id() > b.id() ? a : b;
        to = a.id() > b.id() ? b : a;
    } else if (a.is_null()) {
        from = a;
        to = b;
    } else {
        from = b;
        to = a;
    }
    Substitution step;
    step.bind(from, to);
    for (const auto& merge : inst.rewrite(step)) graph.contract(merge.dead, merge.survivor);
    Engine::record_assignment(assignments, from, to);
    result.kind = EgdStepResult::Kind::Assigned;
    result.from = from;
    result.to = to;
    return result;
}

FactId compute_track(const ChaseGraph& graph, FactId id) {
    return graph.track(id);
}

std::string export_dot(const ChaseGraph& graph, const Instance& inst, DotOptions options) {
    std::ostringstream out;
    out << "digraph chase {\n";
    out << "  node [shape=box, fontname=\"monospace\"];\n";
    auto label = [&](FactId id) {
        std::string text = inst.live(id) ? inst.atom(id).text() : ("#" + std::to_string(id));
        std::string escaped;
        for (char c : text) {
            if (c == '"' || c == '\\') escaped += '\\';
            escaped += c;
        }
        return escaped;
    };
    if (options.clusters) {
        std::map<FactId, std::vector<FactId>> by_track;
        for (FactId id : graph.nodes()) by_track[graph.track(id)].push_back(id);
        size_t k = 0;
        for (const auto& [root, members] : by_track) {
            out << "  subgraph cluster_" << k++ << " {\n";
            out << "    label=\"track: " << label(root) << "\";\n";
            for (FactId id : members)
                out << "    n" << id << " [label=\"" << label(id) << "\"];\n";
            out << "  }\n";
        }
    } else {
        for (FactId id : graph.nodes())
            out << "  n" << id << " [label=\"" << label(id) << "\"];\n";
    }
    for (const ChaseEdge& e : graph.edges()) {
        out << "  n" << e.source << " -> n" << e.target << " [label=\"t" << e.rule + 1 << "\"";
        if (e.forest) out << ", penwidth=2.0, color=black";
        else out << ", color=gray60, style=dashed";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace dlge

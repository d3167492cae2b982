#include "dlge/instance.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dlge {

FactId Instance::insert(Atom atom) {
    if (!atom.ground()) throw std::invalid_argument("instance facts must be ground: " + atom.text());
    auto it = by_atom_.find(atom);
    if (it != by_atom_.end()) return it->second;
    FactId id = static_cast<FactId>(facts_.size());
    facts_.push_back(std::move(atom));
    alive_.push_back(true);
    ++live_count_;
    by_atom_.emplace(facts_[id], id);
    index_insert(id);
    return id;
}

FactId Instance::find_fact(const Atom& atom) const {
    auto it = by_atom_.find(atom);
    return it == by_atom_.end() ? kNoFact : it->second;
}

const std::vector<FactId>& Instance::by_predicate(uint32_t predicate) const {
    static const std::vector<FactId> empty;
    auto it = by_pred_.find(predicate);
    return it == by_pred_.end() ? empty : it->second;
}

std::vector<FactId> Instance::by_position(uint32_t predicate, size_t pos, const Term& term) const {
    PosKey key{(uint64_t(predicate) << 8) | (pos & 0xff), term};
    auto it = by_pos_.find(key);
    return it == by_pos_.end() ? std::vector<FactId>{} : it->second;
}

std::vector<FactId> Instance::fact_ids() const {
    std::vector<FactId> out;
    out.reserve(live_count_);
    for (FactId id = 0; id < facts_.size(); ++id)
        if (alive_[id]) out.push_back(id);
    return out;
}

std::vector<Atom> Instance::atoms() const {
    std::vector<Atom> out;
    out.reserve(live_count_);
    for (FactId id = 0; id < facts_.size(); ++id)
        if (alive_[id]) out.push_back(facts_[id]);
    return out;
}

std::vector<uint32_t> Instance::predicates() const {
    std::vector<uint32_t> out;
    for (const auto& [pred, ids] : by_pred_)
        if (!ids.empty()) out.push_back(pred);
    std::sort(out.begin(), out.end());
    return out;
}

std::unordered_set<Term, TermHash> Instance::term_universe() const {
    std::unordered_set<Term, TermHash> out;
    for (FactId id = 0; id < facts_.size(); ++id)
        if (alive_[id])
            for (const Term& t : facts_[id].args) out.insert(t);
    return out;
}

std::vector<Term> Instance::constants() const {
    std::set<Term> sorted;
    for (const Term& t : term_universe())
        if (t.is_constant()) sorted.insert(t);
    return {sorted.begin(), sorted.end()};
}

void Instance::index_insert(FactId id) {
    const Atom& a = facts_[id];
    by_pred_[a.predicate].push_back(id);
    for (size_t pos = 0; pos < a.args.size(); ++pos) {
        PosKey key{(uint64_t(a.predicate) << 8) | (pos & 0xff), a.args[pos]};
        by_pos_[key].push_back(id);
    }
}

void Instance::index_erase(FactId id) {
    const Atom& a = facts_[id];
    auto& preds = by_pred_[a.predicate];
    preds.erase(std::remove(preds.begin(), preds.end(), id), preds.end());
    for (size_t pos = 0; pos < a.args.size(); ++pos) {
        PosKey key{(uint64_t(a.predicate) << 8) | (pos & 0xff), a.args[pos]};
        auto it = by_pos_.find(key);
        if (it == by_pos_.end()) continue;
        it->second.erase(std::remove(it->second.begin(), it->second.end(), id), it->second.end());
    }
}

std::vector<Instance::Merge> Instance::rewrite(const std::function<Term(const Term&)>& f) {
    std::vector<Merge> merges;
    for (FactId id = 0; id < facts_.size(); ++id) {
        if (!alive_[id]) continue;
        Atom updated = facts_[id];
        bool changed = false;
        for (Term& t : updated.args) {
            Term image = f(t);
            if (image != t) {
                t = image;
                changed = true;
            }
        }
        if (!changed) continue;
        by_atom_.erase(facts_[id]);
        index_erase(id);
        FactId existing = find_fact(updated);
        if (existing != kNoFact && existing != id) {
            // Collapsed onto another fact: the younger id dies.
            FactId dead = std::max(existing, id);
            FactId survivor = std::min(existing, id);
            if (survivor == id) {
                by_atom_.erase(facts_[existing]);
                index_erase(existing);
                facts_[id] = std::move(updated);
                by_atom_.emplace(facts_[id], id);
                index_insert(id);
            }
            alive_[dead] = false;
            --live_count_;
            merges.push_back({dead, survivor});
        } else {
            facts_[id] = std::move(updated);
            by_atom_.emplace(facts_[id], id);
            index_insert(id);
        }
    }
    return merges;
}

std::vector<Instance::Merge> Instance::rewrite(const Substitution& s) {
    return rewrite([&s](const Term& t) { return s.apply(t); });
}

bool operator==(const Instance& a, const Instance& b) {
    if (a.size() != b.size()) return false;
    for (FactId id = 0; id < a.facts_.size(); ++id)
        if (a.alive_[id] && !b.contains(a.facts_[id])) return false;
    return true;
}

} // namespace dlge

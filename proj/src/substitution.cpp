#include "dlge/substitution.hpp"

#include <algorithm>
#include <sstream>

namespace dlge {

bool Substitution::bind(const Term& src, const Term& dst) {
    auto [it, inserted] = map_.emplace(src, dst);
    return inserted || it->second == dst;
}

Atom Substitution::apply(const Atom& a) const {
    Atom out;
    out.predicate = a.predicate;
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(apply(t));
    return out;
}

std::vector<Atom> Substitution::apply(const std::vector<Atom>& atoms) const {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(apply(a));
    return out;
}

Substitution Substitution::compose(const Substitution& first, const Substitution& second) {
    Substitution out;
    for (const auto& [src, dst] : first.map_) out.map_[src] = second.apply(dst);
    for (const auto& [src, dst] : second.map_) out.map_.emplace(src, dst);
    return out;
}

bool Substitution::idempotent() const {
    for (const auto& [src, dst] : map_)
        if (apply(dst) != dst) return false;
    return true;
}

std::string Substitution::text() const {
    std::vector<std::pair<Term, Term>> sorted(map_.begin(), map_.end());
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream out;
    out << '{';
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i) out << ", ";
        out << sorted[i].first.text() << "->" << sorted[i].second.text();
    }
    out << '}';
    return out.str();
}

} // namespace dlge

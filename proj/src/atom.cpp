#include "dlge/atom.hpp"

#include <sstream>

namespace dlge {

bool Atom::ground() const {
    for (const Term& t : args)
        if (t.is_variable()) return false;
    return true;
}

std::string Atom::text() const {
    std::ostringstream out;
    out << predicate_name() << '(';
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out << ',';
        out << args[i].text();
    }
    out << ')';
    return out.str();
}

size_t Atom::hash() const {
    size_t h = std::hash<uint32_t>()(predicate);
    for (const Term& t : args)
        h = h * 1099511628211ULL + t.hash();
    return h;
}

std::vector<uint64_t> canonical_pattern(const Atom& fact) {
    std::vector<uint64_t> pattern;
    pattern.reserve(fact.args.size() + 1);
    pattern.push_back(fact.predicate);
    std::vector<uint32_t> seen; // null serials in first-occurrence order
    for (const Term& t : fact.args) {
        if (t.is_null()) {
            size_t idx = 0;
            while (idx < seen.size() && seen[idx] != t.id()) ++idx;
            if (idx == seen.size()) seen.push_back(t.id());
            pattern.push_back((uint64_t(3) << 32) | idx);
        } else {
            pattern.push_back((uint64_t(uint8_t(t.kind())) << 32) | t.id());
        }
    }
    return pattern;
}

bool isomorphic(const Atom& f, const Atom& g) {
    return canonical_pattern(f) == canonical_pattern(g);
}

std::string conjunction_text(const std::vector<Atom>& atoms) {
    std::ostringstream out;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (i) out << ", ";
        out << atoms[i].text();
    }
    return out.str();
}

} // namespace dlge

#include "dlge/program.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dlge {

namespace {

void collect_vars(const std::vector<Atom>& atoms, std::set<Term>& out) {
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_variable()) out.insert(t);
}

std::string rule_body_text(const std::vector<Atom>& body,
                           const std::vector<std::pair<Term, Term>>& neqs) {
    std::ostringstream out;
    out << conjunction_text(body);
    for (const auto& [a, b] : neqs) out << ", " << a.text() << " != " << b.text();
    return out.str();
}

} // namespace

std::vector<Term> Tgd::existential_vars() const {
    std::set<Term> in_body, in_head;
    collect_vars(body, in_body);
    collect_vars(head, in_head);
    std::vector<Term> out;
    for (const Term& v : in_head)
        if (!in_body.count(v)) out.push_back(v);
    return out;
}

std::vector<Term> Tgd::body_vars() const {
    std::set<Term> vars;
    collect_vars(body, vars);
    return {vars.begin(), vars.end()};
}

std::string Tgd::text() const {
    return rule_body_text(body, neqs) + " -> " + conjunction_text(head) + ".";
}

std::string Egd::text() const {
    return conjunction_text(body) + " -> " + lhs.text() + " = " + rhs.text() + ".";
}

std::string Query::text() const {
    std::ostringstream out;
    out << '?';
    if (!outputs.empty()) {
        out << '(';
        for (size_t i = 0; i < outputs.size(); ++i) {
            if (i) out << ',';
            out << outputs[i].text();
        }
        out << ')';
    }
    out << ' ' << conjunction_text(body) << '.';
    return out.str();
}

Instance Program::database() const {
    Instance db;
    for (const Atom& fact : facts) db.insert(fact);
    return db;
}

Program Program::tgds_only() const {
    Program out = *this;
    out.egds.clear();
    return out;
}

size_t Program::max_arity() const {
    size_t w = 0;
    for (const auto& [pred, info] : schema) w = std::max(w, info.first);
    return w;
}

void Program::note_predicate(const Atom& atom, int line) {
    schema.emplace(atom.predicate, std::make_pair(atom.arity(), line));
}

std::string Diagnostic::text() const {
    std::ostringstream out;
    out << "line " << line << ':' << column << ": " << message;
    return out.str();
}

} // namespace dlge

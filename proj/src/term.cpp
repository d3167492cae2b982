#include "dlge/term.hpp"

namespace dlge {

SymbolTable& SymbolTable::global() {
    static SymbolTable table;
    return table;
}

uint32_t SymbolTable::intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

const std::string& SymbolTable::name(uint32_t id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return names_.at(id);
}

namespace {
std::atomic<uint32_t> g_null_counter{0};
}

Term Term::constant(std::string_view name) {
    return Term(TermKind::Constant, SymbolTable::global().intern(name));
}

Term Term::variable(std::string_view name) {
    return Term(TermKind::Variable, SymbolTable::global().intern(name));
}

Term Term::null(uint32_t serial) {
    uint32_t seen = g_null_counter.load();
    while (seen < serial && !g_null_counter.compare_exchange_weak(seen, serial)) {
    }
    return Term(TermKind::Null, serial);
}

Term Term::fresh_null() {
    return Term(TermKind::Null, g_null_counter.fetch_add(1) + 1);
}

std::string Term::text() const {
    switch (kind_) {
    case TermKind::Null:
        return "_:n" + std::to_string(id_);
    default:
        return SymbolTable::global().name(id_);
    }
}

} // namespace dlge

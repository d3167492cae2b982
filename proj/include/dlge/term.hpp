#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dlge {

// Global intern table for constant/variable/predicate names. Symbol ids are
// stable for the lifetime of the process.
class SymbolTable {
public:
    static SymbolTable& global();

    uint32_t intern(std::string_view name);
    const std::string& name(uint32_t id) const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, uint32_t> ids_;
};

enum class TermKind : uint8_t { Constant = 0, Null = 1, Variable = 2 };

// A term is a constant, a labelled null or a variable. Constants and
// variables are interned symbols; nulls carry a session-unique serial that
// renders as `_:nK`.
class Term {
public:
    Term() : kind_(TermKind::Constant), id_(0) {}

    static Term constant(std::string_view name);
    static Term variable(std::string_view name);
    // Null with an explicit serial. Bumps the session counter so that
    // fresh_null() never reissues a serial seen here (e.g. from parsed input).
    static Term null(uint32_t serial);
    static Term fresh_null();

    TermKind kind() const { return kind_; }
    bool is_constant() const { return kind_ == TermKind::Constant; }
    bool is_null() const { return kind_ == TermKind::Null; }
    bool is_variable() const { return kind_ == TermKind::Variable; }
    bool is_ground() const { return kind_ != TermKind::Variable; }

    uint32_t id() const { return id_; }

    // Rendered form: constants and variables print their name, nulls `_:nK`.
    std::string text() const;

    friend bool operator==(const Term& a, const Term& b) {
        return a.kind_ == b.kind_ && a.id_ == b.id_;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend bool operator<(const Term& a, const Term& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        return a.id_ < b.id_;
    }

    size_t hash() const {
        return std::hash<uint64_t>()((uint64_t(kind_) << 32) ^ id_);
    }

private:
    Term(TermKind kind, uint32_t id) : kind_(kind), id_(id) {}

    TermKind kind_;
    uint32_t id_;
};

struct TermHash {
    size_t operator()(const Term& t) const { return t.hash(); }
};

} // namespace dlge

template <> struct std::hash<dlge::Term> {
    size_t operator()(const dlge::Term& t) const { return t.hash(); }
};

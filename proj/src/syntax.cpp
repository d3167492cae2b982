#include "dlge/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dlge {

namespace {

enum class Tok {
    Ident,   // lowercase-initial: constant
    Var,     // uppercase-initial: variable
    Number,  // numeric constant
    String,  // quoted constant
    Null,    // _:nK
    LParen,
    RParen,
    Comma,
    Arrow,
    Dot,
    Eq,
    Neq,
    Question,
    End,
    Bad,
};

struct Token {
    Tok kind;
    std::string text;
    uint32_t null_serial = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_trivia();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) {
            tok.kind = Tok::End;
            return tok;
        }
        char c = text_[pos_];
        if (c == '(') return single(tok, Tok::LParen);
        if (c == ')') return single(tok, Tok::RParen);
        if (c == ',') return single(tok, Tok::Comma);
        if (c == '.') return single(tok, Tok::Dot);
        if (c == '=') return single(tok, Tok::Eq);
        if (c == '?') return single(tok, Tok::Question);
        if (c == '-' && peek(1) == '>') {
            advance();
            advance();
            tok.kind = Tok::Arrow;
            return tok;
        }
        if (c == '!' && peek(1) == '=') {
            advance();
            advance();
            tok.kind = Tok::Neq;
            return tok;
        }
        if (c == '"') return lex_string(tok);
        if (c == '_') return lex_null(tok);
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(tok);
        if (std::isalpha(static_cast<unsigned char>(c))) return lex_ident(tok);
        tok.kind = Tok::Bad;
        tok.text = std::string(1, c);
        advance();
        return tok;
    }

private:
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (pos_ < text_.size()) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void skip_trivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token single(Token tok, Tok kind) {
        tok.kind = kind;
        advance();
        return tok;
    }

    Token lex_string(Token tok) {
        advance(); // opening quote
        std::string value;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
            value += text_[pos_];
            advance();
        }
        if (pos_ >= text_.size()) {
            tok.kind = Tok::Bad;
            tok.text = "unterminated string";
            return tok;
        }
        advance(); // closing quote
        tok.kind = Tok::String;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_null(Token tok) {
        // Only the `_:nK` form is recognised.
        if (peek(1) == ':' && peek(2) == 'n' && std::isdigit(static_cast<unsigned char>(peek(3)))) {
            advance();
            advance();
            advance();
            uint64_t serial = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                serial = serial * 10 + (text_[pos_] - '0');
                if (serial > UINT32_MAX) serial = UINT32_MAX;
                advance();
            }
            tok.kind = Tok::Null;
            tok.null_serial = static_cast<uint32_t>(serial);
            return tok;
        }
        tok.kind = Tok::Bad;
        tok.text = "_";
        advance();
        return tok;
    }

    Token lex_number(Token tok) {
        std::string value;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value += text_[pos_];
            advance();
        }
        tok.kind = Tok::Number;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_ident(Token tok) {
        std::string value;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            value += text_[pos_];
            advance();
        }
        tok.kind = std::isupper(static_cast<unsigned char>(value[0])) ? Tok::Var : Tok::Ident;
        tok.text = std::move(value);
        return tok;
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

constexpr size_t kMaxArity = 64;
constexpr size_t kMaxErrors = 64;

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { shift(); }

    ParseResult run() {
        while (cur_.kind != Tok::End && errors_.size() < kMaxErrors) {
            if (!statement()) recover();
        }
        ParseResult result;
        result.errors = std::move(errors_);
        if (result.errors.empty()) result.program = std::move(program_);
        return result;
    }

private:
    void shift() {
        cur_ = lexer_.next();
    }

    void error(const Token& at, std::string message) {
        errors_.push_back({at.line, at.column, std::move(message)});
    }

    void recover() {
        while (cur_.kind != Tok::Dot && cur_.kind != Tok::End) shift();
        if (cur_.kind == Tok::Dot) shift();
    }

    bool expect(Tok kind, const char* what) {
        if (cur_.kind != kind) {
            error(cur_, std::string("expected ") + what);
            return false;
        }
        shift();
        return true;
    }

    // term := constant | variable | null
    std::optional<Term> term(bool allow_null, bool allow_var) {
        switch (cur_.kind) {
        case Tok::Ident:
        case Tok::Number:
        case Tok::String: {
            Term t = Term::constant(cur_.text);
            shift();
            return t;
        }
        case Tok::Var: {
            if (!allow_var) {
                error(cur_, "variables are not allowed here");
                shift();
                return std::nullopt;
            }
            Term t = Term::variable(cur_.text);
            shift();
            return t;
        }
        case Tok::Null: {
            if (!allow_null) {
                error(cur_, "labelled nulls are only allowed in facts");
                shift();
                return std::nullopt;
            }
            Term t = Term::null(cur_.null_serial);
            shift();
            return t;
        }
        default:
            error(cur_, "expected a term");
            return std::nullopt;
        }
    }

    std::optional<Atom> atom(bool allow_null, bool allow_var) {
        Token name = cur_;
        if (cur_.kind != Tok::Ident) {
            error(cur_, "expected a predicate name");
            return std::nullopt;
        }
        shift();
        if (!expect(Tok::LParen, "'('")) return std::nullopt;
        Atom out(name.text, {});
        while (true) {
            auto t = term(allow_null, allow_var);
            if (!t) return std::nullopt;
            out.args.push_back(*t);
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            break;
        }
        if (!expect(Tok::RParen, "')'")) return std::nullopt;
        if (out.args.size() > kMaxArity) {
            error(name, "predicate arity exceeds " + std::to_string(kMaxArity));
            return std::nullopt;
        }
        if (!check_arity(out, name)) return std::nullopt;
        return out;
    }

    bool check_arity(const Atom& a, const Token& at) {
        auto it = program_.schema.find(a.predicate);
        if (it != program_.schema.end() && it->second.first != a.arity()) {
            std::ostringstream msg;
            msg << "arity conflict for '" << a.predicate_name() << "': " << a.arity()
                << " here vs " << it->second.first << " at line " << it->second.second;
            error(at, msg.str());
            return false;
        }
        program_.note_predicate(a, at.line);
        return true;
    }

    // conjunction of atoms with optional `X != Y` constraints
    bool body(std::vector<Atom>& atoms, std::vector<std::pair<Term, Term>>* neqs, bool allow_null) {
        while (true) {
            // Disequality: term != term
            if ((cur_.kind == Tok::Var || cur_.kind == Tok::Ident || cur_.kind == Tok::Number ||
                 cur_.kind == Tok::String) &&
                peek_is_neq()) {
                Token at = cur_;
                auto lhs = term(false, true);
                shift(); // !=
                auto rhs = term(false, true);
                if (!lhs || !rhs) return false;
                if (!neqs) {
                    error(at, "'!=' is only allowed in TGD bodies");
                    return false;
                }
                neqs->emplace_back(*lhs, *rhs);
            } else {
                auto a = atom(allow_null, true);
                if (!a) return false;
                atoms.push_back(*a);
            }
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            return true;
        }
    }

    bool peek_is_neq() {
        // One-token lookahead is enough: `X != ...` vs `p(...)`.
        Lexer copy = lexer_;
        Token after = copy.next();
        return after.kind == Tok::Neq;
    }

    bool statement() {
        if (cur_.kind == Tok::Question) return query();
        Token start = cur_;
        std::vector<Atom> atoms;
        std::vector<std::pair<Term, Term>> neqs;
        if (!body(atoms, &neqs, /*allow_null=*/true)) return false;
        if (cur_.kind == Tok::Dot) {
            shift();
            if (atoms.size() != 1 || !neqs.empty()) {
                error(start, "a fact statement must be a single ground atom");
                return false;
            }
            if (!atoms[0].ground()) {
                error(start, "facts must be ground: " + atoms[0].text());
                return false;
            }
            program_.facts.push_back(atoms[0]);
            return true;
        }
        if (cur_.kind != Tok::Arrow) {
            error(cur_, "expected '->' or '.'");
            return false;
        }
        shift();
        for (const Atom& a : atoms)
            for (const Term& t : a.args)
                if (t.is_null()) {
                    error(start, "labelled nulls are only allowed in facts");
                    return false;
                }
        return rule(start, std::move(atoms), std::move(neqs));
    }

    bool rule(const Token& start, std::vector<Atom> body_atoms,
              std::vector<std::pair<Term, Term>> neqs) {
        std::vector<Atom> head_atoms;
        std::vector<std::pair<Term, Term>> equalities;
        while (true) {
            if (cur_.kind == Tok::Ident && !peek_is_eq_or_neq()) {
                auto a = atom(/*allow_null=*/false, /*allow_var=*/true);
                if (!a) return false;
                head_atoms.push_back(*a);
            } else {
                Token at = cur_;
                auto lhs = term(false, true);
                if (!lhs) return false;
                if (cur_.kind != Tok::Eq) {
                    error(cur_, "expected '=' in equality head");
                    return false;
                }
                shift();
                auto rhs = term(false, true);
                if (!rhs) return false;
                if (!lhs->is_variable() || !rhs->is_variable()) {
                    error(at, "an equality head must relate two variables");
                    return false;
                }
                if (*lhs == *rhs) {
                    error(at, "an equality head must relate two distinct variables");
                    return false;
                }
                equalities.emplace_back(*lhs, *rhs);
            }
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            break;
        }
        if (!expect(Tok::Dot, "'.'")) return false;
        if (!head_atoms.empty() && !equalities.empty()) {
            error(start, "a rule head cannot mix atoms and equalities");
            return false;
        }
        if (head_atoms.empty() && equalities.empty()) {
            error(start, "empty rule head");
            return false;
        }
        if (!equalities.empty()) {
            if (!neqs.empty()) {
                error(start, "'!=' is only allowed in TGD bodies");
                return false;
            }
            for (const auto& [lhs, rhs] : equalities) {
                Egd egd;
                egd.body = body_atoms;
                egd.lhs = lhs;
                egd.rhs = rhs;
                egd.line = start.line;
                program_.egds.push_back(std::move(egd));
            }
        } else {
            Tgd tgd;
            tgd.body = std::move(body_atoms);
            tgd.head = std::move(head_atoms);
            tgd.neqs = std::move(neqs);
            tgd.line = start.line;
            program_.tgds.push_back(std::move(tgd));
        }
        return true;
    }

    bool peek_is_eq_or_neq() {
        Lexer copy = lexer_;
        Token after = copy.next();
        return after.kind == Tok::Eq || after.kind == Tok::Neq;
    }

    bool query() {
        Token start = cur_;
        shift(); // '?'
        Query q;
        q.line = start.line;
        if (cur_.kind == Tok::LParen) {
            shift();
            while (true) {
                if (cur_.kind != Tok::Var) {
                    error(cur_, "expected an output variable");
                    return false;
                }
                q.outputs.push_back(Term::variable(cur_.text));
                shift();
                if (cur_.kind == Tok::Comma) {
                    shift();
                    continue;
                }
                break;
            }
            if (!expect(Tok::RParen, "')'")) return false;
        }
        if (!body(q.body, nullptr, /*allow_null=*/false)) return false;
        if (!expect(Tok::Dot, "'.'")) return false;
        program_.queries.push_back(std::move(q));
        return true;
    }

    Lexer lexer_;
    Token cur_;
    Program program_;
    std::vector<Diagnostic> errors_;
};

bool plain_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (std::isdigit(static_cast<unsigned char>(s[0]))) {
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }
    if (!std::islower(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string print_term(const Term& t) {
    if (t.is_constant()) {
        const std::string& name = t.text();
        if (plain_identifier(name)) return name;
        std::string quoted = "\"";
        for (char c : name) {
            if (c == '"' || c == '\\') quoted += '\\';
            quoted += c;
        }
        quoted += '"';
        return quoted;
    }
    return t.text();
}

std::string print_atom(const Atom& a) {
    std::string out = a.predicate_name();
    out += '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += print_term(a.args[i]);
    }
    out += ')';
    return out;
}

std::string print_conjunction(const std::vector<Atom>& atoms) {
    std::string out;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        out += print_atom(atoms[i]);
    }
    return out;
}

} // namespace

ParseResult parse_program(std::string_view text) {
    return Parser(text).run();
}

ParseResult parse_program_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult result;
        result.errors.push_back({0, 0, "cannot open file: " + path});
        return result;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_program(buffer.str());
}

std::string print_program(const Program& p) {
    std::ostringstream out;
    for (const Tgd& tgd : p.tgds) {
        out << print_conjunction(tgd.body);
        for (const auto& [a, b] : tgd.neqs) out << ", " << a.text() << " != " << b.text();
        out << " -> " << print_conjunction(tgd.head) << ".\n";
    }
    for (const Egd& egd : p.egds)
        out << print_conjunction(egd.body) << " -> " << egd.lhs.text() << " = " << egd.rhs.text()
            << ".\n";
    for (const Atom& fact : p.facts) out << print_atom(fact) << ".\n";
    for (const Query& q : p.queries) out << print_query(q) << '\n';
    return out.str();
}

std::string print_query(const Query& q) {
    std::string out = "?";
    if (!q.outputs.empty()) {
        out += '(';
        for (size_t i = 0; i < q.outputs.size(); ++i) {
            if (i) out += ',';
            out += q.outputs[i].text();
        }
        out += ')';
    }
    out += ' ';
    out += print_conjunction(q.body);
    out += '.';
    return out;
}

std::vector<Diagnostic> validate(const Program& p) {
    std::vector<Diagnostic> out;
    std::map<uint32_t, std::pair<size_t, int>> arities;
    auto check_atom = [&](const Atom& a, int line) {
        auto [it, inserted] = arities.emplace(a.predicate, std::make_pair(a.arity(), line));
        if (!inserted && it->second.first != a.arity()) {
            std::ostringstream msg;
            msg << "arity conflict for '" << a.predicate_name() << "': " << a.arity() << " at line "
                << line << " vs " << it->second.first << " at line " << it->second.second;
            out.push_back({line, 0, msg.str()});
        }
    };
    for (const Tgd& tgd : p.tgds) {
        for (const Atom& a : tgd.body) check_atom(a, tgd.line);
        for (const Atom& a : tgd.head) check_atom(a, tgd.line);
        if (tgd.body.empty()) out.push_back({tgd.line, 0, "TGD body is empty"});
        if (tgd.head.empty()) out.push_back({tgd.line, 0, "TGD head is empty"});
    }
    for (const Egd& egd : p.egds) {
        for (const Atom& a : egd.body) check_atom(a, egd.line);
        std::set<Term> vars;
        for (const Atom& a : egd.body)
            for (const Term& t : a.args)
                if (t.is_variable()) vars.insert(t);
        for (const Term& side : {egd.lhs, egd.rhs})
            if (!vars.count(side))
                out.push_back(
                    {egd.line, 0, "equality side '" + side.text() + "' does not occur in the body"});
        if (egd.lhs == egd.rhs)
            out.push_back({egd.line, 0, "equality relates a variable with itself"});
    }
    for (const Atom& fact : p.facts) check_atom(fact, 0);
    for (const Query& q : p.queries) {
        for (const Atom& a : q.body) check_atom(a, q.line);
        std::set<Term> vars;
        for (const Atom& a : q.body)
            for (const Term& t : a.args)
                if (t.is_variable()) vars.insert(t);
        for (const Term& v : q.outputs)
            if (!vars.count(v))
                out.push_back(
                    {q.line, 0, "output variable '" + v.text() + "' does not occur in the body"});
    }
    return out;
}

std::vector<Atom> load_csv_facts(const std::string& dir, std::vector<Diagnostic>& errors) {
    std::vector<Atom> facts;
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        errors.push_back({0, 0, "not a directory: " + dir});
        return facts;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
        std::string predicate = file.stem().string();
        std::ifstream in(file);
        if (!in) {
            errors.push_back({0, 0, "cannot open file: " + file.string()});
            continue;
        }
        std::string line;
        int lineno = 0;
        std::optional<size_t> arity;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            Atom fact(predicate, {});
            std::string field;
            std::istringstream row(line);
            while (std::getline(row, field, ',')) fact.args.push_back(Term::constant(field));
            if (line.back() == ',') fact.args.push_back(Term::constant(""));
            if (arity && *arity != fact.arity()) {
                errors.push_back({lineno, 0,
                                  file.filename().string() + ": row arity " +
                                      std::to_string(fact.arity()) + " conflicts with " +
                                      std::to_string(*arity)});
                continue;
            }
            arity = fact.arity();
            facts.push_back(std::move(fact));
        }
    }
    return facts;
}

} // namespace dlge

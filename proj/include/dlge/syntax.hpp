#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dlge/program.hpp"

namespace dlge {

struct ParseResult {
    std::optional<Program> program;
    std::vector<Diagnostic> errors;

    bool ok() const { return program.has_value() && errors.empty(); }
};

// Grammar, one statement per `.`:
//   tgd:   body -> head.
//   egd:   body -> V = W.            (several equalities share the body)
//   fact:  atom.                     (ground)
//   bcq:   ? body.
//   cq:    ?(X,Y) body.
// Lowercase identifiers, numerals and quoted strings are constants;
// uppercase-initial identifiers are variables; `_:nK` is a labelled null
// (facts only); `X != Y` is allowed in TGD bodies; `%` starts a comment.
ParseResult parse_program(std::string_view text);
ParseResult parse_program_file(const std::string& path);

std::string print_program(const Program& p);
std::string print_query(const Query& q);

// Structural well-formedness beyond the grammar: consistent arities, EGD
// sides bound in the body, query outputs bound in the body.
std::vector<Diagnostic> validate(const Program& p);

// Loads facts from CSV files in a directory: one file per predicate, the
// file stem names the predicate, every field is read as a constant. Facts
// merge additively with duplicates suppressed.
std::vector<Atom> load_csv_facts(const std::string& dir, std::vector<Diagnostic>& errors);

} // namespace dlge

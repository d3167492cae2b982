#pragma once

#include <random>
#include <vector>

#include "dlge/chase.hpp"
#include "dlge/program.hpp"

namespace corpus {

struct Config {
    size_t max_predicates = 4;
    size_t max_arity = 3;
    size_t max_tgds = 8;
    size_t max_egds = 3;
    size_t max_facts = 8;
    size_t max_constants = 5;
    size_t chase_step_limit = 2000;
    size_t chase_fact_limit = 400;
};

// One random program plus its database (program.facts).
dlge::Program random_program(std::mt19937& rng, const Config& cfg = {});

// Random 1- or 2-atom BCQ over the program's schema, mixing fresh variables,
// shared variables and database constants.
dlge::Query random_bcq(std::mt19937& rng, const dlge::Program& p, const Config& cfg = {});

// Samples random programs and keeps those that are warded, safe-tainted and
// whose bounded standard chase (with and without EGDs) saturates. Also
// requires the relaxed chase to saturate so every engine is exercised.
std::vector<dlge::Program> safe_corpus(size_t count, uint32_t seed, const Config& cfg = {});

// Random warded programs (safety not required) for chase-level properties.
std::vector<dlge::Program> warded_corpus(size_t count, uint32_t seed, const Config& cfg = {});

} // namespace corpus

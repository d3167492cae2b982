#include "dlge/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dlge/analysis.hpp"
#include "dlge/chase.hpp"
#include "dlge/egd.hpp"
#include "dlge/reason.hpp"
#include "dlge/syntax.hpp"

namespace dlge {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitParse = 2;
constexpr int kExitUnsat = 3;
constexpr int kExitStepLimit = 4;

struct CommonOptions {
    std::string program_path;
    std::string facts_dir;
    size_t limit = 10000;
    std::string format = "text";
    std::string variant = "relaxed";
    std::string method = "both";
    size_t batch_threshold = 0;
    bool tgd_only = false;
    bool force_unsafe = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("program", opts.program_path, "program file (.dlge)")->required();
    cmd->add_option("--facts", opts.facts_dir, "directory of per-predicate CSV fact files");
    cmd->add_option("--limit", opts.limit, "TGD step limit")->check(CLI::PositiveNumber);
    cmd->add_option("--batch-threshold", opts.batch_threshold,
                    "EGD edge-buffer size before assignments are applied");
    cmd->add_flag("--force-unsafe", opts.force_unsafe,
                  "run the pipeline even when safe taintedness is not certified");
}

// Returns false on parse/IO failure (diagnostics already printed).
bool load(const CommonOptions& opts, Program& program, std::ostream& err) {
    ParseResult parsed = parse_program_file(opts.program_path);
    if (!parsed.ok()) {
        for (const Diagnostic& d : parsed.errors)
            err << opts.program_path << ":" << d.text() << "\n";
        return false;
    }
    program = std::move(*parsed.program);
    if (!opts.facts_dir.empty()) {
        std::vector<Diagnostic> errors;
        std::vector<Atom> csv_facts = load_csv_facts(opts.facts_dir, errors);
        if (!errors.empty()) {
            for (const Diagnostic& d : errors) err << opts.facts_dir << ": " << d.message << "\n";
            return false;
        }
        for (Atom& fact : csv_facts) {
            program.note_predicate(fact, 0);
            program.facts.push_back(std::move(fact));
        }
    }
    std::vector<Diagnostic> diags = validate(program);
    if (!diags.empty()) {
        for (const Diagnostic& d : diags) err << opts.program_path << ":" << d.text() << "\n";
        return false;
    }
    return true;
}

std::vector<std::string> sorted_fact_texts(const Instance& inst) {
    std::vector<std::string> out;
    for (const Atom& a : inst.atoms()) out.push_back(a.text());
    std::sort(out.begin(), out.end());
    return out;
}

nlohmann::json stats_json(const ReasonStats& stats) {
    return {{"tgd_chase_size", stats.tgd_chase_size},
            {"unified_size", stats.unified_size},
            {"tgd_steps", stats.tgd_steps},
            {"egd_edges", stats.egd_edges},
            {"chase_ms", stats.chase_ms},
            {"egd_ms", stats.egd_ms}};
}

int cmd_analyze(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    Program program;
    if (!load(opts, program, err)) return kExitParse;
    AnalysisReport report = analyze(program);
    if (opts.format == "json") {
        out << report.to_json() << "\n";
    } else {
        out << "warded: " << (report.warded ? "yes" : "no") << "\n";
        for (const WardViolation& v : report.ward_violations) out << "  violation: " << v.text() << "\n";
        out << "affected:";
        for (const Position& p : report.affected) out << ' ' << p.text();
        out << "\ntainted:";
        for (const Position& p : report.tainted) out << ' ' << p.text();
        out << "\n";
        for (const auto& [pos, egds] : report.taint_cause) {
            out << "  cause " << pos.text() << ":";
            for (size_t e : egds) out << " egd" << e + 1;
            out << "\n";
        }
        out << "wards:";
        for (size_t i = 0; i < report.wards.size(); ++i) {
            out << " tgd" << i + 1 << "=";
            if (report.wards[i]) out << "atom" << *report.wards[i] + 1;
            else out << "-";
        }
        out << "\n";
        out << "safe: " << (report.safe ? "yes" : "unknown") << "\n";
        for (const SafetyWitness& w : report.safety_witnesses)
            out << "  witness: " << w.text() << "\n";
    }
    return report.warded && report.safe ? kExitOk : kExitRejected;
}

int cmd_chase(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    Program program;
    if (!load(opts, program, err)) return kExitParse;
    ChaseLimits limits{opts.limit};
    Instance db = program.database();
    ChaseOutcome outcome;
    if (opts.variant == "standard") {
        outcome = standard_chase(db, program, limits);
    } else {
        WardedVerdict verdict = check_warded(program);
        if (!verdict.warded) {
            for (const WardViolation& v : verdict.violations) err << v.text() << "\n";
            err << "the " << opts.variant << " chase requires a warded TGD set\n";
            return kExitRejected;
        }
        outcome = opts.variant == "warded" ? warded_chase(db, program.tgds_only(), limits)
                                           : relaxed_warded_chase(db, program.tgds_only(), limits);
    }
    if (opts.format == "dot") {
        out << export_dot(outcome.graph, outcome.instance, {true});
    } else if (opts.format == "json") {
        nlohmann::json j;
        j["status"] = chase_status_name(outcome.status);
        j["variant"] = opts.variant;
        j["facts"] = sorted_fact_texts(outcome.instance);
        j["tgd_steps"] = outcome.tgd_steps;
        nlohmann::json steps = nlohmann::json::array();
        {
            std::istringstream lines(outcome.transcript_jsonl());
            std::string line;
            while (std::getline(lines, line))
                steps.push_back(nlohmann::json::parse(line));
        }
        j["steps"] = steps;
        if (outcome.failure)
            j["failure"] = {{"a", outcome.failure->a.text()}, {"b", outcome.failure->b.text()}};
        else
            j["failure"] = nullptr;
        out << j.dump(2) << "\n";
    } else {
        for (const std::string& text : sorted_fact_texts(outcome.instance)) out << text << "\n";
        err << "status: " << chase_status_name(outcome.status) << "\n";
    }
    if (outcome.status == ChaseStatus::Failed) return kExitUnsat;
    if (outcome.status == ChaseStatus::StepLimitExceeded) return kExitStepLimit;
    return kExitOk;
}

int cmd_query(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    Program program;
    if (!load(opts, program, err)) return kExitParse;
    if (program.queries.empty()) {
        err << "no queries in " << opts.program_path << "\n";
        return kExitParse;
    }
    ReasonOptions options;
    options.limits.max_tgd_steps = opts.limit;
    options.force_unsafe = opts.force_unsafe;
    options.tgd_only = opts.tgd_only;
    if (opts.batch_threshold > 0) options.batch_threshold = opts.batch_threshold;
    Instance db = program.database();

    std::vector<ReasoningResult> results;
    std::optional<ChaseHResult> pipeline;
    if (opts.variant == "standard") {
        for (const Query& q : program.queries) {
            auto r = answer_with_standard_chase(db, program, q, options.limits);
            if (!r) {
                err << "standard chase exceeded the step limit\n";
                return kExitStepLimit;
            }
            results.push_back(std::move(*r));
        }
    } else {
        pipeline = chase_h(db, program, options);
        for (const Query& q : program.queries)
            results.push_back(answer_query(*pipeline, q, options));
    }

    for (const ReasoningResult& r : results) {
        if (r.status == ReasonStatus::NotCertified) {
            for (const std::string& note : r.notes) err << note << "\n";
            for (const WardViolation& v : r.ward_violations) err << "  " << v.text() << "\n";
            for (const SafetyWitness& w : r.safety_witnesses) err << "  " << w.text() << "\n";
            return kExitRejected;
        }
        if (r.status == ReasonStatus::StepLimit) {
            err << "chase exceeded the step limit\n";
            return kExitStepLimit;
        }
    }

    if (opts.format == "json") {
        nlohmann::json j;
        nlohmann::json answers = nlohmann::json::array();
        for (size_t i = 0; i < results.size(); ++i) {
            const ReasoningResult& r = results[i];
            nlohmann::json entry;
            entry["query"] = print_query(program.queries[i]);
            entry["type"] = r.boolean ? "bcq" : "cq";
            entry["status"] = reason_status_name(r.status);
            if (r.boolean) {
                entry["answer"] = r.bcq_answer;
            } else {
                nlohmann::json outputs = nlohmann::json::array();
                for (const Term& v : r.output_vars) outputs.push_back(v.text());
                entry["outputs"] = outputs;
                nlohmann::json tuples = nlohmann::json::array();
                for (const auto& tuple : r.tuples) {
                    nlohmann::json row = nlohmann::json::array();
                    for (const Term& t : tuple) row.push_back(t.text());
                    tuples.push_back(row);
                }
                entry["tuples"] = tuples;
            }
            nlohmann::json notes = nlohmann::json::array();
            for (const std::string& note : r.notes) notes.push_back(note);
            entry["notes"] = notes;
            answers.push_back(entry);
        }
        j["answers"] = answers;
        j["stats"] = stats_json(results.empty() ? ReasonStats{} : results.front().stats);
        if (pipeline && !options.tgd_only) j["unification"] = nlohmann::json::parse(pipeline->egd.to_json());
        out << j.dump(2) << "\n";
    } else if (opts.format == "csv") {
        for (size_t i = 0; i < results.size(); ++i) {
            const ReasoningResult& r = results[i];
            if (i) out << "\n";
            if (r.boolean) {
                out << "answer\n" << (r.bcq_answer ? "true" : "false") << "\n";
                continue;
            }
            for (size_t v = 0; v < r.output_vars.size(); ++v)
                out << (v ? "," : "") << r.output_vars[v].text();
            out << "\n";
            for (const auto& tuple : r.tuples) {
                for (size_t v = 0; v < tuple.size(); ++v) out << (v ? "," : "") << tuple[v].text();
                out << "\n";
            }
        }
    } else {
        for (size_t i = 0; i < results.size(); ++i) {
            const ReasoningResult& r = results[i];
            out << print_query(program.queries[i]) << "\n";
            for (const std::string& note : r.notes) err << note << "\n";
            if (r.boolean) {
                out << (r.bcq_answer ? "true" : "false") << "\n";
            } else if (r.status == ReasonStatus::Unsatisfiable) {
                out << "unsatisfiable\n";
            } else {
                for (const auto& tuple : r.tuples) {
                    for (size_t v = 0; v < tuple.size(); ++v)
                        out << (v ? "," : "") << tuple[v].text();
                    out << "\n";
                }
            }
        }
    }
    return kExitOk;
}

int cmd_check(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    Program program;
    if (!load(opts, program, err)) return kExitParse;
    WardedVerdict verdict = check_warded(program);
    if (!verdict.warded) {
        err << "satisfiability checking requires a warded TGD set\n";
        return kExitRejected;
    }
    ChaseLimits limits{opts.limit};
    Instance db = program.database();

    std::optional<bool> encoding_sat;
    std::optional<bool> direct_sat;
    if (opts.method == "encoding" || opts.method == "both")
        encoding_sat = check_satisfiability(db, program, limits);
    if (opts.method == "direct" || opts.method == "both") {
        ChaseOutcome tgd_chase = relaxed_warded_chase(db, program.tgds_only(), limits);
        EgdFixpointResult fix = egd_fixpoint(tgd_chase.instance, program, {});
        direct_sat = !fix.failed;
    }
    if (encoding_sat && direct_sat && *encoding_sat != *direct_sat) {
        err << "satisfiability routes disagree: encoding="
            << (*encoding_sat ? "satisfiable" : "unsatisfiable")
            << " direct=" << (*direct_sat ? "satisfiable" : "unsatisfiable") << "\n";
        return kExitRejected;
    }
    bool satisfiable = encoding_sat ? *encoding_sat : *direct_sat;
    if (opts.format == "json") {
        nlohmann::json j;
        j["satisfiable"] = satisfiable;
        j["method"] = opts.method;
        out << j.dump(2) << "\n";
    } else {
        out << (satisfiable ? "satisfiable" : "unsatisfiable") << "\n";
    }
    return satisfiable ? kExitOk : kExitUnsat;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"reasoner for existential rules with equality constraints"};
    app.require_subcommand(1);

    CommonOptions analyze_opts, chase_opts, query_opts, check_opts;

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "static rule analysis");
    add_common(analyze_cmd, analyze_opts);
    analyze_cmd->add_option("--format", analyze_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* chase_cmd = app.add_subcommand("chase", "materialize the chase");
    add_common(chase_cmd, chase_opts);
    chase_cmd->add_option("--variant", chase_opts.variant, "standard|warded|relaxed")
        ->check(CLI::IsMember({"standard", "warded", "relaxed"}));
    chase_cmd->add_option("--format", chase_opts.format, "text|json|dot")
        ->check(CLI::IsMember({"text", "json", "dot"}));

    CLI::App* query_cmd = app.add_subcommand("query", "answer the queries in the program");
    add_common(query_cmd, query_opts);
    query_cmd->add_option("--variant", query_opts.variant, "relaxed|standard")
        ->check(CLI::IsMember({"relaxed", "standard"}));
    query_cmd->add_flag("--tgd-only", query_opts.tgd_only, "skip the EGD fixpoint");
    query_cmd->add_option("--format", query_opts.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    CLI::App* check_cmd = app.add_subcommand("check", "decide satisfiability");
    add_common(check_cmd, check_opts);
    check_cmd->add_option("--method", check_opts.method, "encoding|direct|both")
        ->check(CLI::IsMember({"encoding", "direct", "both"}));
    check_cmd->add_option("--format", check_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_opts, out, err);
        if (chase_cmd->parsed()) return cmd_chase(chase_opts, out, err);
        if (query_cmd->parsed()) return cmd_query(query_opts, out, err);
        if (check_cmd->parsed()) return cmd_check(check_opts, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    }
    err << app.help();
    return kExitParse;
}

} // namespace dlge

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"

#include "dlge/analysis.hpp"
#include "dlge/chase.hpp"
#include "dlge/egd.hpp"
#include "dlge/reason.hpp"
#include "dlge/syntax.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<int64_t>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<uint64_t>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(json_to_py(item));
        return out;
    }
    case nlohmann::json::value_t::object: {
        py::dict out;
        for (auto it = j.begin(); it != j.end(); ++it)
            out[py::str(it.key())] = json_to_py(it.value());
        return out;
    }
    default: return py::none();
    }
}

dlge::Program parse_or_throw(const std::string& text) {
    dlge::ParseResult parsed = dlge::parse_program(text);
    if (!parsed.ok()) {
        std::ostringstream msg;
        for (const dlge::Diagnostic& d : parsed.errors) msg << d.text() << "\n";
        throw py::value_error(msg.str());
    }
    return std::move(*parsed.program);
}

dlge::ChaseOutcome run_chase(const dlge::Program& p, const std::string& variant, size_t limit) {
    dlge::ChaseLimits limits{limit};
    dlge::Instance db = p.database();
    if (variant == "standard") return dlge::standard_chase(db, p, limits);
    if (variant == "warded") return dlge::warded_chase(db, p.tgds_only(), limits);
    if (variant == "relaxed") return dlge::relaxed_warded_chase(db, p.tgds_only(), limits);
    throw py::value_error("unknown chase variant: " + variant);
}

py::dict reasoning_result_to_py(const dlge::ReasoningResult& r, const dlge::Query& q) {
    py::dict out;
    out["query"] = dlge::print_query(q);
    out["type"] = r.boolean ? "bcq" : "cq";
    out["status"] = dlge::reason_status_name(r.status);
    if (r.boolean) {
        out["answer"] = r.bcq_answer;
    } else {
        py::list tuples;
        for (const auto& tuple : r.tuples) {
            py::list row;
            for (const dlge::Term& t : tuple) row.append(t.text());
            tuples.append(row);
        }
        out["tuples"] = tuples;
        py::list outputs;
        for (const dlge::Term& v : r.output_vars) outputs.append(v.text());
        out["outputs"] = outputs;
    }
    py::list notes;
    for (const std::string& note : r.notes) notes.append(note);
    out["notes"] = notes;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "reasoner for existential rules (TGDs) with equality constraints (EGDs)";

    py::class_<dlge::Program>(m, "Program")
        .def("__str__", [](const dlge::Program& p) { return dlge::print_program(p); })
        .def_property_readonly("num_tgds", [](const dlge::Program& p) { return p.tgds.size(); })
        .def_property_readonly("num_egds", [](const dlge::Program& p) { return p.egds.size(); })
        .def_property_readonly("num_facts", [](const dlge::Program& p) { return p.facts.size(); })
        .def_property_readonly("num_queries",
                               [](const dlge::Program& p) { return p.queries.size(); });

    m.def("parse", &parse_or_throw, py::arg("text"), "Parse a program from rule-language text.");
    m.def(
        "load",
        [](const std::string& path) {
            dlge::ParseResult parsed = dlge::parse_program_file(path);
            if (!parsed.ok()) {
                std::ostringstream msg;
                for (const dlge::Diagnostic& d : parsed.errors) msg << d.text() << "\n";
                throw py::value_error(msg.str());
            }
            return std::move(*parsed.program);
        },
        py::arg("path"), "Load a program file.");

    m.def(
        "validate",
        [](const dlge::Program& p) {
            std::vector<std::string> out;
            for (const dlge::Diagnostic& d : dlge::validate(p)) out.push_back(d.text());
            return out;
        },
        py::arg("program"), "Structural diagnostics; empty when well-formed.");

    m.def(
        "analyze",
        [](const dlge::Program& p) {
            return json_to_py(nlohmann::json::parse(dlge::analyze(p).to_json()));
        },
        py::arg("program"),
        "Affected/tainted positions, wardedness and the safe-taintedness verdict.");

    m.def(
        "chase",
        [](const dlge::Program& p, const std::string& variant, size_t limit) {
            dlge::ChaseOutcome outcome = run_chase(p, variant, limit);
            py::dict out;
            out["status"] = dlge::chase_status_name(outcome.status);
            py::list facts;
            std::vector<std::string> texts;
            for (const dlge::Atom& a : outcome.instance.atoms()) texts.push_back(a.text());
            std::sort(texts.begin(), texts.end());
            for (const std::string& t : texts) facts.append(t);
            out["facts"] = facts;
            out["tgd_steps"] = outcome.tgd_steps;
            return out;
        },
        py::arg("program"), py::arg("variant") = "relaxed", py::arg("limit") = 10000,
        "Materialize the chase; variant is standard, warded or relaxed.");

    m.def(
        "chase_dot",
        [](const dlge::Program& p, const std::string& variant, size_t limit, bool clusters) {
            dlge::ChaseOutcome outcome = run_chase(p, variant, limit);
            return dlge::export_dot(outcome.graph, outcome.instance, {clusters});
        },
        py::arg("program"), py::arg("variant") = "relaxed", py::arg("limit") = 10000,
        py::arg("clusters") = true, "Chase graph in DOT form.");

    m.def(
        "check_satisfiable",
        [](const dlge::Program& p, size_t limit) {
            return dlge::check_satisfiability(p.database(), p, dlge::ChaseLimits{limit});
        },
        py::arg("program"), py::arg("limit") = 10000,
        "Encoding-based satisfiability check.");

    m.def(
        "answer",
        [](const dlge::Program& p, bool force_unsafe, bool tgd_only, bool constants_only,
           size_t limit) {
            dlge::ReasonOptions options;
            options.force_unsafe = force_unsafe;
            options.tgd_only = tgd_only;
            options.constants_only = constants_only;
            options.limits.max_tgd_steps = limit;
            dlge::ChaseHResult pipeline = dlge::chase_h(p.database(), p, options);
            py::list out;
            for (const dlge::Query& q : p.queries)
                out.append(reasoning_result_to_py(dlge::answer_query(pipeline, q, options), q));
            return out;
        },
        py::arg("program"), py::arg("force_unsafe") = false, py::arg("tgd_only") = false,
        py::arg("constants_only") = false, py::arg("limit") = 10000,
        "Answer every query in the program over the unified chase.");

    m.def(
        "verify_harmless",
        [](const dlge::Program& p, size_t limit) {
            dlge::HarmlessnessReport report =
                dlge::verify_harmlessness_on_instance(p.database(), p, dlge::ChaseLimits{limit});
            py::dict out;
            switch (report.verdict) {
            case dlge::HarmlessnessReport::Verdict::Confirmed: out["verdict"] = "confirmed"; break;
            case dlge::HarmlessnessReport::Verdict::Witness: out["verdict"] = "witness"; break;
            default: out["verdict"] = "inconclusive"; break;
            }
            out["detail"] = report.detail;
            py::list uncovered;
            for (const dlge::Atom& a : report.uncovered) uncovered.append(a.text());
            out["uncovered"] = uncovered;
            return out;
        },
        py::arg("program"), py::arg("limit") = 10000,
        "Brute-force harmlessness check on this database.");
}

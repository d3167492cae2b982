#include "support/fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixtures {

std::string program_path(const std::string& name) {
    return std::string(DLGE_PROGRAMS_DIR) + "/" + name + ".dlge";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

dlge::Program load(const std::string& name) {
    return parse(read_file(program_path(name)));
}

dlge::Program parse(const std::string& text) {
    dlge::ParseResult parsed = dlge::parse_program(text);
    if (!parsed.ok()) {
        std::string msg = "fixture does not parse:";
        for (const dlge::Diagnostic& d : parsed.errors) msg += "\n  " + d.text();
        throw std::runtime_error(msg);
    }
    return std::move(*parsed.program);
}

const std::vector<std::string>& all_programs() {
    static const std::vector<std::string> names = {
        "intro",
        "clusters_shared_attribute",
        "clusters_key",
        "split_merge",
        "clusters_siblings",
        "fusion_triple",
        "reverse_link",
        "pair_clusters",
    };
    return names;
}

} // namespace fixtures

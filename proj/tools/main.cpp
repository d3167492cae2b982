#include <iostream>
#include <string>
#include <vector>

#include "dlge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dlge::run_cli(args, std::cout, std::cerr);
}

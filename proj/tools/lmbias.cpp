#include <iostream>
#include <string>
#include <vector>

#include "lmbias/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lmbias::cli::run_cli(args, std::cout, std::cerr);
}

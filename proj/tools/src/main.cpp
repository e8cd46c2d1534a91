#include <iostream>
#include <string>
#include <vector>

#include "tlsdyn/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tlsdyn::cli::run_cli(args, std::cout, std::cerr);
}

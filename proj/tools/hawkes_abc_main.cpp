#include <iostream>
#include <string>
#include <vector>

#include "hawkes_abc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hawkes_abc::run_command(args, std::cout, std::cerr);
}

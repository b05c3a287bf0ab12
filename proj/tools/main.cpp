#include <iostream>
#include <string>
#include <vector>

#include "structlearn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return structlearn::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "gsr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gsr::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "radar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return radar::cli::dispatch(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "pvfree/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pvfree::execute_command(args, std::cout, std::cerr).exit_code;
}

#include <iostream>
#include <string>
#include <vector>

#include "limitends/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return limitends::run_cli(args, std::cout, std::cerr);
}

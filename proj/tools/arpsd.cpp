#include <iostream>
#include <string>
#include <vector>

#include "arpsd/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return arpsd::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "ivtf_cli/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return ivtf::cli::run(args, std::cout, std::cerr);
}

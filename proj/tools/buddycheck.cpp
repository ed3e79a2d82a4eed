#include "buddy/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return buddy::run_cli(argc, argv, std::cout, std::cerr);
}

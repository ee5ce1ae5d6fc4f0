#include <iostream>

#include "mpa/cli.hpp"

int main(int argc, char **argv)
{
    return mpa::run_cli(argc, argv, std::cout, std::cerr);
}

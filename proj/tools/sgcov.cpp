#include "sgcov/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sgcov::cli::main_entry(argc, argv, std::cout, std::cerr);
}

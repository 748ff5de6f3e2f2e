#include "idealforge/cli.hpp"

#include <iostream>

int main(int argc, char ** argv)
{
    return idealforge::main_entry(argc, argv, std::cout, std::cerr);
}

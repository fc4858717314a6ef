#include <iostream>

#include "morl/cli.hpp"

int main(int argc, char **argv) { return morl::parse_and_dispatch(argc, argv, std::cout, std::cerr); }

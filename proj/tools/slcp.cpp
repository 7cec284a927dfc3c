#include <iostream>

#include "slcp/cli.hpp"

int main(int argc, char** argv) { return slcp::run_cli(argc, argv, std::cout, std::cerr); }

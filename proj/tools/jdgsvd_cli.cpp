#include <iostream>

#include "jdgsvd/cli.hpp"

int main(int argc, char** argv) { return jdgsvd::run_cli(argc, argv, std::cout, std::cerr); }

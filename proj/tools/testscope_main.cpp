#include <iostream>

#include "testscope/app/cli.hpp"

int main(int argc, char** argv) { return testscope::run_cli(argc, argv, std::cout, std::cerr); }

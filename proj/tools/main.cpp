#include <iostream>

#include "qionize/cli.hpp"

int main(int argc, char** argv) { return qionize::cli_main(argc, argv, std::cout, std::cerr); }

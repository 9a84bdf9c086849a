#include <iostream>

#include "odf/commands.hpp"

int main(int argc, char** argv) { return odf::run_cli(argc, argv, std::cout, std::cerr); }
